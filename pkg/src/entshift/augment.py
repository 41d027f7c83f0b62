"""Rule-based entity-type transitions for adversarial NER augmentation.

Three transitions flip an entity's type by editing its tokens and,
optionally, inserting a type-consistent context right after it:

* ``to_org``: a single-token LOC or PER entity grows an organization
  word phrase before or after it ("Brazil" -> "Brazil University").
* ``to_loc``: an ORG entity loses an organization-forming prefix or
  suffix phrase ("Munich Re" -> "Munich").
* ``to_per``: a single-token ORG or LOC entity gets a surname appended
  ("Colts" -> "Colts Zardari").

Inserted entity tokens carry the target type's B/I labels; inserted
context tokens are labeled O; everything else is left untouched.  The
resulting sentence is adversarial in the sense that the edited entity's
ground-truth type now differs from the source type while most of the
surface form survives.
"""

import json
import random
from dataclasses import dataclass, field, replace

from .conll import (
    Corpus,
    EntitySpan,
    Sentence,
    Token,
    extract_spans,
)
from .phrases import (
    CONTEXT_AFTER,
    ORG_FORMING,
    TOKEN_AFTER,
    TOKEN_BEFORE,
    PhraseLibrary,
    Phrase,
    sample_phrase,
    sample_token_change,
)

TO_ORG = "to_org"
TO_LOC = "to_loc"
TO_PER = "to_per"
TRANSITIONS = (TO_ORG, TO_LOC, TO_PER)

TARGET_TYPE = {TO_ORG: "ORG", TO_LOC: "LOC", TO_PER: "PER"}
SOURCE_TYPES = {TO_ORG: ("LOC", "PER"), TO_LOC: ("ORG",), TO_PER: ("ORG", "LOC")}

# The ORG context is not always applied; LOC and PER contexts are.
DEFAULT_CONTEXT_PROB = {TO_ORG: 0.5, TO_LOC: 1.0, TO_PER: 1.0}


class AugmentError(ValueError):
    pass


class NoEligibleExamplesError(AugmentError):
    pass


@dataclass(frozen=True)
class EligibleSite:
    """One entity span that satisfies a transition's eligibility rule.

    For ``to_loc`` the matched organization-forming phrase and the side
    it sits on ("prefix"/"suffix") are recorded at eligibility time.
    """

    sent_id: int
    span: EntitySpan
    transition: str
    matched_phrase: Phrase | None = None
    matched_side: str | None = None


@dataclass(frozen=True)
class AugmentationRecord:
    """Provenance of one applied transition."""

    source_sent_id: int
    transition: str
    span: EntitySpan
    inserted: dict[str, Phrase] = field(default_factory=dict)
    deleted: dict[str, Phrase] = field(default_factory=dict)
    context_applied: bool = False
    result: Sentence = None

    def to_json(self) -> str:
        payload = {
            "source_sent_id": self.source_sent_id,
            "transition": self.transition,
            "span": [self.span.start, self.span.end, self.span.etype],
            "inserted": {role: list(p) for role, p in self.inserted.items()},
            "deleted": {role: list(p) for role, p in self.deleted.items()},
            "context_applied": self.context_applied,
            "tokens": list(self.result.texts()),
            "labels": list(self.result.labels()),
        }
        return json.dumps(payload, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "AugmentationRecord":
        d = json.loads(line)
        result = Sentence(
            tuple(Token(t, l) for t, l in zip(d["tokens"], d["labels"])),
            sent_id=d["source_sent_id"],
        )
        return cls(
            source_sent_id=d["source_sent_id"],
            transition=d["transition"],
            span=EntitySpan(*d["span"][:2], d["span"][2]),
            inserted={role: tuple(p) for role, p in d["inserted"].items()},
            deleted={role: tuple(p) for role, p in d["deleted"].items()},
            context_applied=d["context_applied"],
            result=result,
        )


def write_records(records, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(rec.to_json() + "\n")


def read_records(path) -> list[AugmentationRecord]:
    with open(path, encoding="utf-8") as f:
        return [AugmentationRecord.from_json(line) for line in f if line.strip()]


@dataclass
class AugmentConfig:
    library: PhraseLibrary
    transitions: tuple[str, ...] = TRANSITIONS
    percent: int = 100
    context_prob: dict[str, float] = None
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.percent <= 100:
            raise AugmentError(f"percent must be in (0, 100]: {self.percent}")
        unknown = set(self.transitions) - set(TRANSITIONS)
        if unknown:
            raise AugmentError(f"unknown transitions: {sorted(unknown)}")
        probs = dict(DEFAULT_CONTEXT_PROB)
        probs.update(self.context_prob or {})
        if any(not 0 <= p <= 1 for p in probs.values()):
            raise AugmentError(f"context probabilities must be in [0, 1]: {probs}")
        self.context_prob = probs


def _org_forming_match(entity_tokens, library) -> tuple[Phrase, str] | None:
    """Longest organization-forming prefix/suffix of the token run.

    Prefix wins over an equally long suffix; at least one entity token
    must survive the deletion.
    """
    best = None
    for phrase in library.get("LOC", ORG_FORMING):
        n = len(phrase)
        if n >= len(entity_tokens):
            continue
        if tuple(entity_tokens[:n]) == phrase:
            key = (n, 1)
            if best is None or key > best[0]:
                best = (key, phrase, "prefix")
        if tuple(entity_tokens[-n:]) == phrase:
            key = (n, 0)
            if best is None or key > best[0]:
                best = (key, phrase, "suffix")
    if best is None:
        return None
    return best[1], best[2]


def find_eligible(sentence: Sentence, transition: str,
                  library: PhraseLibrary) -> list[EligibleSite]:
    """All entity spans of the sentence meeting the transition's rule."""
    if transition not in TRANSITIONS:
        raise AugmentError(f"unknown transition: {transition}")
    sites = []
    texts = sentence.texts()
    for span in extract_spans(sentence):
        if span.etype not in SOURCE_TYPES[transition]:
            continue
        if transition in (TO_ORG, TO_PER):
            if span.length() == 1:
                sites.append(EligibleSite(sentence.sent_id, span, transition))
        else:
            match = _org_forming_match(texts[span.start:span.end], library)
            if match is not None:
                phrase, side = match
                sites.append(EligibleSite(sentence.sent_id, span, transition,
                                          matched_phrase=phrase, matched_side=side))
    return sites


def _entity_tokens(texts, etype) -> tuple[Token, ...]:
    labels = ["B-" + etype] + ["I-" + etype] * (len(texts) - 1)
    return tuple(Token(t, l) for t, l in zip(texts, labels))


def _rebuild(sentence, span, entity_tokens, context: Phrase | None) -> Sentence:
    tokens = list(sentence.tokens[:span.start])
    tokens += list(entity_tokens)
    if context:
        tokens += [Token(t, "O") for t in context]
    tokens += list(sentence.tokens[span.end:])
    return replace(sentence, tokens=tuple(tokens))


def _maybe_context(library, etype, rng, context_prob) -> Phrase | None:
    if rng.random() < context_prob:
        return sample_phrase(library, etype, CONTEXT_AFTER, rng)
    return None


def transition_to_org(sentence: Sentence, site: EligibleSite, library: PhraseLibrary,
                      rng: random.Random, context_prob: float = None) -> AugmentationRecord:
    """Insert an organization word phrase around a single-token entity."""
    if context_prob is None:
        context_prob = DEFAULT_CONTEXT_PROB[TO_ORG]
    role, phrase = sample_token_change(library, "ORG", rng)
    original = sentence.tokens[site.span.start].text
    if role == TOKEN_BEFORE:
        texts = (*phrase, original)
    else:
        texts = (original, *phrase)
    context = _maybe_context(library, "ORG", rng, context_prob)
    result = _rebuild(sentence, site.span, _entity_tokens(texts, "ORG"), context)
    inserted = {role: phrase}
    if context:
        inserted[CONTEXT_AFTER] = context
    return AugmentationRecord(sentence.sent_id, TO_ORG, site.span,
                              inserted=inserted, context_applied=context is not None,
                              result=result)


def transition_to_loc(sentence: Sentence, site: EligibleSite, library: PhraseLibrary,
                      rng: random.Random, context_prob: float = None) -> AugmentationRecord:
    """Delete the matched organization-forming phrase, leaving a location."""
    if context_prob is None:
        context_prob = DEFAULT_CONTEXT_PROB[TO_LOC]
    n = len(site.matched_phrase)
    entity_texts = [t.text for t in sentence.tokens[site.span.start:site.span.end]]
    if site.matched_side == "prefix":
        remaining = entity_texts[n:]
    else:
        remaining = entity_texts[:-n]
    context = _maybe_context(library, "LOC", rng, context_prob)
    result = _rebuild(sentence, site.span, _entity_tokens(remaining, "LOC"), context)
    inserted = {CONTEXT_AFTER: context} if context else {}
    return AugmentationRecord(sentence.sent_id, TO_LOC, site.span,
                              inserted=inserted, deleted={ORG_FORMING: site.matched_phrase},
                              context_applied=context is not None, result=result)


def transition_to_per(sentence: Sentence, site: EligibleSite, library: PhraseLibrary,
                      rng: random.Random, context_prob: float = None) -> AugmentationRecord:
    """Append a surname to a single-token entity, making it a person."""
    if context_prob is None:
        context_prob = DEFAULT_CONTEXT_PROB[TO_PER]
    surname = sample_phrase(library, "PER", TOKEN_AFTER, rng)
    original = sentence.tokens[site.span.start].text
    context = _maybe_context(library, "PER", rng, context_prob)
    result = _rebuild(sentence, site.span, _entity_tokens((original, *surname), "PER"), context)
    inserted = {TOKEN_AFTER: surname}
    if context:
        inserted[CONTEXT_AFTER] = context
    return AugmentationRecord(sentence.sent_id, TO_PER, site.span,
                              inserted=inserted, context_applied=context is not None,
                              result=result)


_APPLY = {TO_ORG: transition_to_org, TO_LOC: transition_to_loc, TO_PER: transition_to_per}


def apply_transition(sentence: Sentence, site: EligibleSite, library: PhraseLibrary,
                     rng: random.Random, context_prob: float = None) -> AugmentationRecord:
    return _APPLY[site.transition](sentence, site, library, rng, context_prob)


def _sentence_rng(seed: int, sent_id: int) -> random.Random:
    # str seeding hashes through sha512: stable across processes and platforms
    return random.Random(f"{seed}:{sent_id}")


def selection_count(percent: int, n_eligible: int) -> int:
    return round(percent * n_eligible / 100)


def select_by_priority(ids, percent: int, seed: int) -> list[int]:
    """Pick round(percent% of ids), nested across percents for one seed.

    Each id gets a seeded priority; the lowest-priority ids win, so the
    selection at a smaller percent is a subset of a larger one.
    """
    ids = list(ids)
    n_pick = selection_count(percent, len(ids))
    priorities = {i: _sentence_rng(seed, i).random() for i in ids}
    winners = sorted(ids, key=lambda i: (priorities[i], i))[:n_pick]
    return sorted(winners)


def augment_corpus(corpus: Corpus, config: AugmentConfig
                   ) -> tuple[Corpus, list[AugmentationRecord]]:
    """Augment percent% of the eligible sentences, one transition each.

    A sentence is eligible if any enabled transition has a site in it;
    the applied site is drawn uniformly over all its sites.  The returned
    corpus holds only the augmented sentences (concatenate with the
    originals for adversarial training); records carry full provenance.
    """
    sites_by_sent: dict[int, list[EligibleSite]] = {}
    for sentence in corpus.sentences:
        sites = []
        for transition in config.transitions:
            sites.extend(find_eligible(sentence, transition, config.library))
        if sites:
            sites_by_sent[sentence.sent_id] = sites
    if not sites_by_sent:
        raise NoEligibleExamplesError("no sentence has an eligible entity")

    selected = select_by_priority(sites_by_sent, config.percent, config.seed)
    records = []
    for sent_id in selected:
        rng = _sentence_rng(config.seed, sent_id)
        rng.random()  # burn the priority draw so edit draws stay aligned
        sites = sites_by_sent[sent_id]
        site = sites[rng.randrange(len(sites))]
        prob = config.context_prob[site.transition]
        records.append(apply_transition(corpus.sentences[sent_id], site,
                                        config.library, rng, prob))
    augmented = Corpus(tuple(rec.result for rec in records), source=corpus.source)
    return augmented, records
