"""Comparison NER attacks: sentence concatenation, entity typos,
cross-category entity swaps, and longer-entity swaps.

Unlike the guided transitions, these edits either keep the gold label
semantics (concat, typos, swap_longer) or substitute whole entities from
a harvested inventory (cross_category).  All four preserve BIO validity.
"""

import json
import random
import string
from dataclasses import dataclass, replace

from .conll import Corpus, Sentence, Token, extract_spans, is_entity_label
from .augment import select_by_priority, NoEligibleExamplesError

METHODS = ("concat", "typos", "crosscategory", "swaplonger")

_LETTERS = string.ascii_letters


class AttackError(ValueError):
    pass


class NoEntityTokensError(AttackError):
    pass


class NoEligibleEntityError(AttackError):
    pass


class NoLongerFormError(AttackError):
    pass


@dataclass(frozen=True)
class EntityInventory:
    """Multiset of entity surface forms per type, harvested from a corpus."""

    forms: dict[str, tuple[tuple[str, ...], ...]]

    def for_type(self, etype: str) -> tuple[tuple[str, ...], ...]:
        return self.forms.get(etype, ())

    def other_types(self, etype: str) -> list[tuple[str, tuple[str, ...]]]:
        pool = []
        for t, forms in sorted(self.forms.items()):
            if t != etype:
                pool += [(t, f) for f in forms]
        return pool


def harvest_inventory(corpus: Corpus) -> EntityInventory:
    forms: dict[str, list[tuple[str, ...]]] = {}
    for sentence in corpus.sentences:
        texts = sentence.texts()
        for span in extract_spans(sentence):
            forms.setdefault(span.etype, []).append(tuple(texts[span.start:span.end]))
    return EntityInventory({t: tuple(v) for t, v in forms.items()})


def concat_sent(a: Sentence, b: Sentence) -> Sentence:
    """Append b's tokens after a's; labels carry over unchanged."""
    return replace(a, tokens=a.tokens + b.tokens)


def ent_typos(sentence: Sentence, rng: random.Random) -> Sentence:
    """Apply one character edit (replace/delete/insert) to one entity token."""
    positions = [i for i, t in enumerate(sentence.tokens) if is_entity_label(t.label)]
    if not positions:
        raise NoEntityTokensError("sentence has no entity tokens")
    i = positions[rng.randrange(len(positions))]
    word = sentence.tokens[i].text
    ops = ["replace", "insert"] if len(word) == 1 else ["replace", "delete", "insert"]
    op = ops[rng.randrange(len(ops))]
    if op == "replace":
        j = rng.randrange(len(word))
        c = rng.choice(_LETTERS)
        while c == word[j]:
            c = rng.choice(_LETTERS)
        edited = word[:j] + c + word[j + 1:]
    elif op == "delete":
        j = rng.randrange(len(word))
        edited = word[:j] + word[j + 1:]
    else:
        j = rng.randrange(len(word) + 1)
        edited = word[:j] + rng.choice(_LETTERS) + word[j:]
    tokens = list(sentence.tokens)
    tokens[i] = replace(tokens[i], text=edited)
    return replace(sentence, tokens=tuple(tokens))


def _replace_span(sentence, span, form, etype) -> Sentence:
    labels = ["B-" + etype] + ["I-" + etype] * (len(form) - 1)
    tokens = list(sentence.tokens[:span.start])
    tokens += [Token(t, l) for t, l in zip(form, labels)]
    tokens += list(sentence.tokens[span.end:])
    return replace(sentence, tokens=tuple(tokens))


def cross_category(sentence: Sentence, inventory: EntityInventory,
                   rng: random.Random) -> Sentence:
    """Swap one entity for an inventory form of a different type."""
    spans = [s for s in extract_spans(sentence) if inventory.other_types(s.etype)]
    if not spans:
        raise NoEligibleEntityError("no entity has a differently-typed replacement")
    span = spans[rng.randrange(len(spans))]
    etype, form = rng.choice(inventory.other_types(span.etype))
    return _replace_span(sentence, span, form, etype)


def swap_longer(sentence: Sentence, inventory: EntityInventory,
                rng: random.Random) -> Sentence:
    """Swap one entity for a strictly longer same-type inventory form."""
    candidates = []
    for span in extract_spans(sentence):
        longer = [f for f in inventory.for_type(span.etype) if len(f) > span.length()]
        if longer:
            candidates.append((span, longer))
    if not candidates:
        raise NoLongerFormError("no entity has a strictly longer same-type form")
    span, longer = candidates[rng.randrange(len(candidates))]
    form = longer[rng.randrange(len(longer))]
    return _replace_span(sentence, span, form, span.etype)


def _concat_partner(corpus, sent_id) -> Sentence | None:
    if sent_id + 1 >= len(corpus.sentences):
        return None
    nxt = corpus.sentences[sent_id + 1]
    if nxt.doc_id != corpus.sentences[sent_id].doc_id:
        return None
    return nxt


def _applicable(corpus, sentence, method, inventory) -> bool:
    if method == "concat":
        return _concat_partner(corpus, sentence.sent_id) is not None
    if method == "typos":
        return any(is_entity_label(t.label) for t in sentence.tokens)
    if method == "crosscategory":
        return any(inventory.other_types(s.etype) for s in extract_spans(sentence))
    if method == "swaplonger":
        return any(len(f) > s.length()
                   for s in extract_spans(sentence)
                   for f in inventory.for_type(s.etype))
    raise AttackError(f"unknown attack method: {method}")


@dataclass(frozen=True)
class AttackRecord:
    source_sent_id: int
    method: str
    result: Sentence

    def to_json(self) -> str:
        return json.dumps({
            "source_sent_id": self.source_sent_id,
            "method": self.method,
            "tokens": list(self.result.texts()),
            "labels": list(self.result.labels()),
        }, ensure_ascii=False)


def attack_corpus(corpus: Corpus, method: str, percent: int = 100, seed: int = 0,
                  inventory: EntityInventory | None = None,
                  weights: dict[str, float] | None = None
                  ) -> tuple[Corpus, list[AttackRecord]]:
    """Apply one attack (or a weighted 'mix') to percent% of the sentences
    it can touch, with the same seeded nested selection as the guided
    augmentation."""
    if method != "mix" and method not in METHODS:
        raise AttackError(f"unknown attack method: {method}")
    if inventory is None:
        inventory = harvest_inventory(corpus)
    if method == "mix":
        weights = weights or {m: 1.0 for m in METHODS}
        if any(w < 0 for w in weights.values()) or sum(weights.values()) <= 0:
            raise AttackError(f"bad mix weights: {weights}")
        methods = tuple(m for m in METHODS if weights.get(m, 0) > 0)
    else:
        methods = (method,)

    eligible = {}
    for sentence in corpus.sentences:
        usable = [m for m in methods if _applicable(corpus, sentence, m, inventory)]
        if usable:
            eligible[sentence.sent_id] = usable
    if not eligible:
        raise NoEligibleExamplesError(f"no sentence is attackable with {method}")

    records = []
    for sent_id in select_by_priority(eligible, percent, seed):
        rng = random.Random(f"attack:{seed}:{sent_id}")
        usable = eligible[sent_id]
        if len(usable) == 1:
            chosen = usable[0]
        else:
            w = [weights[m] for m in usable]
            chosen = rng.choices(usable, weights=w, k=1)[0]
        sentence = corpus.sentences[sent_id]
        if chosen == "concat":
            result = concat_sent(sentence, _concat_partner(corpus, sent_id))
        elif chosen == "typos":
            result = ent_typos(sentence, rng)
        elif chosen == "crosscategory":
            result = cross_category(sentence, inventory, rng)
        else:
            result = swap_longer(sentence, inventory, rng)
        records.append(AttackRecord(sent_id, chosen, result))
    attacked = Corpus(tuple(r.result for r in records), source=corpus.source)
    return attacked, records


def write_attack_records(records, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(rec.to_json() + "\n")
