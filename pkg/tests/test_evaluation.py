import random

import pytest

from entshift.augment import AugmentConfig, augment_corpus
from entshift.conll import Corpus, EntitySpan, Sentence, Token, apply_spans, extract_spans
from entshift.evaluation import (
    AlignmentMismatchError,
    NoSharedItemsError,
    agreement,
    entity_f1,
    format_report,
    per_transition_report,
)
from entshift.phrases import load_default_library


def sent(pairs, i=0):
    return Sentence(tuple(Token(t, l) for t, l in pairs), sent_id=i)


def random_pair(rng, n_sentences=4, max_len=10):
    """Aligned random gold/pred corpora over the same token grid."""
    gold, pred = [], []
    for i in range(n_sentences):
        n = rng.randint(1, max_len)
        texts = [f"t{j}" for j in range(n)]

        def rand_spans():
            spans, j = [], 0
            while j < n:
                if rng.random() < 0.45:
                    end = min(n, j + rng.randint(1, 3))
                    spans.append(EntitySpan(j, end, rng.choice(["PER", "ORG", "LOC", "MISC"])))
                    j = end
                else:
                    j += 1
            return spans

        gold.append(apply_spans(texts, rand_spans(), sent_id=i))
        pred.append(apply_spans(texts, rand_spans(), sent_id=i))
    return Corpus(tuple(gold)), Corpus(tuple(pred))


def brute_force_counts(gold, pred):
    """Independent oracle: set intersection over (sent, start, end, type)."""
    g = {(i, s.start, s.end, s.etype)
         for i, gs in enumerate(gold.sentences) for s in extract_spans(gs)}
    p = {(i, s.start, s.end, s.etype)
         for i, ps in enumerate(pred.sentences) for s in extract_spans(ps)}
    return len(g), len(p), len(g & p)


class TestEntityF1:
    def test_perfect(self):
        c = Corpus((sent([("a", "B-PER"), ("b", "I-PER"), ("c", "O")]),))
        report = entity_f1(c, c)
        assert report.micro.precision == report.micro.recall == report.micro.f1 == 1.0

    def test_all_o_prediction(self):
        gold = Corpus((sent([("a", "B-PER"), ("b", "O")]),))
        pred = Corpus((sent([("a", "O"), ("b", "O")]),))
        report = entity_f1(gold, pred)
        assert report.micro.precision == 0.0
        assert report.micro.recall == 0.0
        assert report.micro.f1 == 0.0

    def test_boundary_error_not_credited(self):
        gold = Corpus((sent([("a", "B-PER"), ("b", "I-PER"), ("c", "O")]),))
        pred = Corpus((sent([("a", "B-PER"), ("b", "O"), ("c", "O")]),))
        report = entity_f1(gold, pred)
        assert report.micro.matched == 0

    def test_type_error_not_credited(self):
        gold = Corpus((sent([("a", "B-PER")]),))
        pred = Corpus((sent([("a", "B-ORG")]),))
        assert entity_f1(gold, pred).micro.matched == 0

    def test_matches_brute_force_oracle(self):
        rng = random.Random(99)
        for _ in range(1000):
            gold, pred = random_pair(rng)
            report = entity_f1(gold, pred)
            n_gold, n_pred, n_match = brute_force_counts(gold, pred)
            assert report.micro.gold == n_gold
            assert report.micro.pred == n_pred
            assert report.micro.matched == n_match

    def test_micro_equals_type_sums(self):
        rng = random.Random(5)
        gold, pred = random_pair(rng, n_sentences=10)
        report = entity_f1(gold, pred)
        assert report.micro.gold == sum(s.gold for s in report.per_type.values())
        assert report.micro.pred == sum(s.pred for s in report.per_type.values())
        assert report.micro.matched == sum(s.matched for s in report.per_type.values())

    def test_swap_symmetry(self):
        rng = random.Random(6)
        gold, pred = random_pair(rng)
        fwd = entity_f1(gold, pred)
        rev = entity_f1(pred, gold)
        assert fwd.micro.precision == rev.micro.recall
        assert fwd.micro.recall == rev.micro.precision

    def test_sentence_order_invariance(self):
        rng = random.Random(7)
        gold, pred = random_pair(rng, n_sentences=6)
        order = list(range(6))
        rng.shuffle(order)
        gold2 = Corpus(tuple(gold.sentences[i] for i in order))
        pred2 = Corpus(tuple(pred.sentences[i] for i in order))
        assert entity_f1(gold, pred).micro == entity_f1(gold2, pred2).micro

    def test_alignment_errors(self):
        one = Corpus((sent([("a", "O")]),))
        two = Corpus((sent([("a", "O")]), sent([("b", "O")], 1)))
        with pytest.raises(AlignmentMismatchError):
            entity_f1(one, two)
        short = Corpus((sent([("a", "O")]),))
        long = Corpus((sent([("a", "O"), ("b", "O")]),))
        with pytest.raises(AlignmentMismatchError):
            entity_f1(short, long)

    def test_format_report(self):
        c = Corpus((sent([("a", "B-PER")]),))
        text = format_report(entity_f1(c, c))
        assert "micro" in text and "PER" in text


class TestPerTransition:
    def test_partition_counts(self):
        sentences = [sent([(f"e{i}", "B-LOC"), ("w", "O")], i) for i in range(10)]
        corpus = Corpus(tuple(sentences))
        lib = load_default_library()
        augmented, records = augment_corpus(
            corpus, AugmentConfig(lib, transitions=("to_org", "to_per"), percent=100, seed=1))
        reports = per_transition_report(augmented, augmented, records)
        assert set(reports) == {r.transition for r in records}
        total_gold = sum(rep.micro.gold for rep in reports.values())
        assert total_gold == entity_f1(augmented, augmented).micro.gold

    def test_single_transition_key(self):
        sentences = [sent([(f"e{i}", "B-LOC")], i) for i in range(4)]
        corpus = Corpus(tuple(sentences))
        augmented, records = augment_corpus(
            corpus, AugmentConfig(load_default_library(), transitions=("to_org",), percent=100, seed=2))
        reports = per_transition_report(augmented, augmented, records)
        assert list(reports) == ["to_org"]

    def test_alignment_required(self):
        corpus = Corpus((sent([("a", "B-LOC")]),))
        augmented, records = augment_corpus(
            corpus, AugmentConfig(load_default_library(), transitions=("to_org",), seed=0))
        with pytest.raises(AlignmentMismatchError):
            per_transition_report(Corpus(()), Corpus(()), records)


class TestAgreement:
    def test_identical(self):
        a = {i: "high" for i in range(10)}
        assert agreement(a, dict(a)) == 1.0

    def test_39_of_50(self):
        a = {i: "high" for i in range(50)}
        b = {i: ("high" if i < 39 else "low") for i in range(50)}
        assert agreement(a, b) == pytest.approx(0.78)

    def test_disjoint(self):
        with pytest.raises(NoSharedItemsError):
            agreement({1: "high"}, {2: "high"})

    def test_partial_overlap(self):
        a = {1: "high", 2: "low", 3: "high"}
        b = {2: "low", 3: "low", 4: "high"}
        assert agreement(a, b) == pytest.approx(0.5)
