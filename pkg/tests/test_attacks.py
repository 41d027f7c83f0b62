import random

import pytest

from entshift.attacks import (
    AttackError,
    EntityInventory,
    NoEligibleEntityError,
    NoEntityTokensError,
    NoLongerFormError,
    attack_corpus,
    concat_sent,
    cross_category,
    ent_typos,
    harvest_inventory,
    swap_longer,
)
from entshift.conll import Corpus, EntitySpan, Sentence, Token, extract_spans, is_bio_valid


def sent(pairs, sent_id=0, doc_id=None):
    return Sentence(tuple(Token(t, l) for t, l in pairs), sent_id=sent_id, doc_id=doc_id)


def levenshtein(a, b):
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


TABLE_CORPUS = Corpus((
    sent([("graduate", "O"), ("in", "O"), ("Brazil", "B-LOC")], 0),
    sent([("Munich", "B-ORG"), ("Re", "I-ORG"), ("says", "O")], 1),
    sent([("Colts", "B-ORG"), ("won", "O")], 2),
    sent([("Tony", "B-PER"), ("Siragusa", "I-PER"), ("played", "O")], 3),
))


class TestConcat:
    def test_lengths_and_spans(self):
        a = sent([(f"a{i}", "O") for i in range(6)] + [("Lima", "B-LOC")])
        b = sent([("Bonn", "B-LOC"), ("and", "O"), ("Rome", "B-LOC"), ("x", "O"), ("y", "O")])
        c = concat_sent(a, b)
        assert len(c) == 12
        shifted = [EntitySpan(s.start + len(a), s.end + len(a), s.etype) for s in extract_spans(b)]
        assert extract_spans(c) == extract_spans(a) + shifted

    def test_identity_with_empty_tail(self):
        a = sent([("x", "O")])
        assert concat_sent(a, sent([("y", "O")])).texts() == ("x", "y")

    def test_span_count_additive(self):
        rng = random.Random(0)
        types = ["PER", "ORG", "LOC", "MISC"]
        for _ in range(1000):
            def rand_sent():
                toks = []
                for i in range(rng.randint(1, 6)):
                    if rng.random() < 0.4:
                        toks.append((f"e{i}", "B-" + rng.choice(types)))
                    else:
                        toks.append((f"w{i}", "O"))
                return sent(toks)
            a, b = rand_sent(), rand_sent()
            c = concat_sent(a, b)
            assert is_bio_valid(c.labels())
            assert len(extract_spans(c)) == len(extract_spans(a)) + len(extract_spans(b))


class TestTypos:
    def test_one_edit_labels_unchanged(self):
        s = sent([("graduate", "O"), ("Brazil", "B-LOC")])
        out = ent_typos(s, random.Random(3))
        assert out.labels() == s.labels()
        assert out.texts()[0] == "graduate"
        assert levenshtein(out.texts()[1], "Brazil") == 1

    def test_no_entities(self):
        with pytest.raises(NoEntityTokensError):
            ent_typos(sent([("all", "O"), ("plain", "O")]), random.Random(0))

    def test_edit_distance_exactly_one(self):
        s = sent([("Munich", "B-ORG"), ("Re", "I-ORG"), ("says", "O")])
        for trial in range(10_000):
            out = ent_typos(s, random.Random(trial))
            changed = [(a, b) for a, b in zip(s.texts(), out.texts()) if a != b]
            assert len(changed) == 1
            assert levenshtein(*changed[0]) == 1
            assert out.labels() == s.labels()

    def test_single_char_token_never_emptied(self):
        s = sent([("a", "B-ORG")])
        for trial in range(200):
            out = ent_typos(s, random.Random(trial))
            assert len(out.texts()[0]) >= 1


class TestCrossCategory:
    def test_replacement_relabeled(self):
        inv = EntityInventory({"ORG": (("Munich", "Re"),)})
        s = sent([("in", "O"), ("Brazil", "B-LOC")])
        out = cross_category(s, inv, random.Random(1))
        assert out.texts() == ("in", "Munich", "Re")
        assert out.labels() == ("O", "B-ORG", "I-ORG")

    def test_single_type_inventory(self):
        inv = EntityInventory({"LOC": (("Bonn",),)})
        s = sent([("Brazil", "B-LOC")])
        with pytest.raises(NoEligibleEntityError):
            cross_category(s, inv, random.Random(0))

    def test_validity_many_trials(self):
        inv = harvest_inventory(TABLE_CORPUS)
        s = sent([("The", "O"), ("Colts", "B-ORG"), ("beat", "O"), ("Bonn", "B-LOC")])
        for trial in range(10_000):
            out = cross_category(s, inv, random.Random(trial))
            assert is_bio_valid(out.labels())
            before, after = extract_spans(s), extract_spans(out)
            assert len(after) == len(before)
            type_changes = [i for i, (x, y) in enumerate(zip(before, after)) if x.etype != y.etype]
            assert len(type_changes) == 1


class TestSwapLonger:
    def test_longer_swap(self):
        inv = EntityInventory({"ORG": (("Bayern", "Munich", "FC"),)})
        s = sent([("Colts", "B-ORG"), ("won", "O")])
        out = swap_longer(s, inv, random.Random(0))
        assert extract_spans(out) == [EntitySpan(0, 3, "ORG")]

    def test_no_longer_form(self):
        inv = EntityInventory({"ORG": (("Colts",),)})
        s = sent([("Colts", "B-ORG")])
        with pytest.raises(NoLongerFormError):
            swap_longer(s, inv, random.Random(0))

    def test_always_strictly_longer(self):
        inv = harvest_inventory(TABLE_CORPUS)
        s = sent([("Colts", "B-ORG"), ("beat", "O"), ("Bonn", "B-LOC")])
        # ORG pool has the 2-token "Munich Re"; LOC pool has only 1-token forms
        for trial in range(10_000):
            out = swap_longer(s, inv, random.Random(trial))
            before = {(sp.start, sp.etype): sp.length() for sp in extract_spans(s)}
            grown = [sp for sp in extract_spans(out)
                     if sp.length() > before.get((sp.start, sp.etype), 99)]
            assert len(grown) == 1
            assert grown[0].etype == "ORG"


class TestAttackCorpus:
    def test_methods_and_percent(self):
        corpus = TABLE_CORPUS
        attacked, records = attack_corpus(corpus, "typos", percent=100, seed=0)
        assert len(records) == 4
        assert all(r.method == "typos" for r in records)

    def test_concat_pairs_within_doc(self):
        corpus = Corpus((sent([("a", "O")], 0, doc_id="d0"),
                         sent([("b", "O")], 1, doc_id="d0"),
                         sent([("c", "O")], 2, doc_id="d1")))
        attacked, records = attack_corpus(corpus, "concat", percent=100, seed=0)
        assert [r.source_sent_id for r in records] == [0]
        assert records[0].result.texts() == ("a", "b")

    def test_mix_deterministic(self):
        runs = []
        for _ in range(2):
            attacked, records = attack_corpus(TABLE_CORPUS, "mix", percent=100, seed=4)
            runs.append([(r.method, r.result.texts()) for r in records])
        assert runs[0] == runs[1]

    def test_mix_weights_validated(self):
        with pytest.raises(AttackError):
            attack_corpus(TABLE_CORPUS, "mix", weights={"typos": -1})

    def test_unknown_method(self):
        with pytest.raises(AttackError):
            attack_corpus(TABLE_CORPUS, "backdoor")

    def test_outputs_bio_valid(self):
        for method in ("typos", "crosscategory", "swaplonger", "mix"):
            attacked, _ = attack_corpus(TABLE_CORPUS, method, percent=100, seed=1)
            for s in attacked.sentences:
                assert is_bio_valid(s.labels())
