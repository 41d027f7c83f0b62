"""CoNLL-format NER corpora: tokens, BIO labels, entity spans, and the
conversions between them.

The four-type CoNLL tag set (PER, ORG, LOC, MISC) is the native label
space of every downstream component.  Corpora with other type inventories
(e.g. OntoNotes) can be parsed with ``entity_types=None`` and brought into
the native space with :func:`map_entity_types`.
"""

import random
from dataclasses import dataclass, replace

ENTITY_TYPES = ("PER", "ORG", "LOC", "MISC")

CLS = "[CLS]"
SEP = "[SEP]"
PAD = "[PAD]"
SPECIAL_LABELS = (CLS, SEP, PAD)

# Fixed label inventory shared with the tagger: O + B/I per type + specials.
LABELS = (
    "O",
    "B-PER", "I-PER",
    "B-ORG", "I-ORG",
    "B-LOC", "I-LOC",
    "B-MISC", "I-MISC",
    CLS, SEP, PAD,
)
LABEL_INDEX = {label: i for i, label in enumerate(LABELS)}

SOURCE_TAGS = ("ID-train", "ID-dev", "ID-test", "CS", "OOD-train", "OOD-test", "synthetic")

DOCSTART = "-DOCSTART-"


class ConllError(ValueError):
    """Base class for corpus-format errors."""


class EmptyInputError(ConllError):
    pass


class UnknownTagError(ConllError):
    pass


class BioViolationError(ConllError):
    pass


class SpecialLabelError(ConllError):
    pass


class OverlappingSpansError(ConllError):
    pass


class SpanOutOfRangeError(ConllError):
    pass


class UnmappedTypeError(ConllError):
    pass


class InsufficientExamplesError(ConllError):
    pass


def label_type(label: str) -> str | None:
    """Entity type carried by a B-/I- label, None for O and specials."""
    if label.startswith(("B-", "I-")):
        return label[2:]
    return None


def is_entity_label(label: str) -> bool:
    return label.startswith(("B-", "I-"))


def _label_ok(label: str, entity_types) -> bool:
    if label == "O" or label in SPECIAL_LABELS:
        return True
    if not label.startswith(("B-", "I-")) or len(label) <= 2:
        return False
    return entity_types is None or label[2:] in entity_types


@dataclass(frozen=True)
class Token:
    """One token with its BIO label.

    ``extras`` holds any middle CoNLL columns (POS, chunk) verbatim so a
    parsed file round-trips byte-identically.
    """

    text: str
    label: str = "O"
    extras: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.text or any(c.isspace() for c in self.text):
            raise ConllError(f"token text must be non-empty and whitespace-free: {self.text!r}")
        if not _label_ok(self.label, None):
            raise UnknownTagError(f"not a BIO label: {self.label!r}")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    doc_id: str | None = None
    sent_id: int = 0

    def texts(self) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens)

    def labels(self) -> tuple[str, ...]:
        return tuple(t.label for t in self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True, order=True)
class EntitySpan:
    """Half-open token range [start, end) with one entity type."""

    start: int
    end: int
    etype: str

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise SpanOutOfRangeError(f"bad span bounds ({self.start}, {self.end})")
        if not self.etype:
            raise ConllError("span needs a non-empty entity type")

    def length(self) -> int:
        return self.end - self.start


@dataclass
class Corpus:
    """Ordered sentences with a provenance tag; sent_ids always 0..n-1."""

    sentences: tuple[Sentence, ...]
    source: str = "synthetic"

    def __post_init__(self):
        if self.source not in SOURCE_TAGS:
            raise ConllError(f"unknown corpus source tag: {self.source!r}")
        sentences = tuple(self.sentences)
        if any(s.sent_id != i for i, s in enumerate(sentences)):
            sentences = tuple(replace(s, sent_id=i) for i, s in enumerate(sentences))
        self.sentences = sentences

    def __len__(self) -> int:
        return len(self.sentences)


def bio_problems(labels, entity_types=ENTITY_TYPES) -> list[tuple[int, str]]:
    """(index, message) pairs for every BIO violation in a label sequence."""
    problems = []
    prev = "O"
    for i, label in enumerate(labels):
        if not _label_ok(label, entity_types):
            problems.append((i, f"unknown tag {label!r}"))
            prev = "O"
            continue
        if label in SPECIAL_LABELS:
            problems.append((i, f"special label {label} in sentence body"))
            prev = "O"
            continue
        if label.startswith("I-") and label_type(prev) != label[2:]:
            problems.append((i, f"{label} does not continue a {label[2:]} entity"))
        prev = label if label.startswith(("B-", "I-")) else "O"
    return problems


def is_bio_valid(labels, entity_types=ENTITY_TYPES) -> bool:
    return not bio_problems(labels, entity_types)


def validate_bio(labels, entity_types=ENTITY_TYPES, where: str = "") -> None:
    problems = bio_problems(labels, entity_types)
    if problems:
        i, msg = problems[0]
        prefix = f"{where}: " if where else ""
        raise BioViolationError(f"{prefix}token {i}: {msg}")


def repair_bio(labels) -> tuple[str, ...]:
    """Turn orphan I-X labels into B-X; leaves everything else alone."""
    repaired = []
    prev = "O"
    for label in labels:
        if label.startswith("I-") and label_type(prev) != label[2:]:
            label = "B-" + label[2:]
        repaired.append(label)
        prev = label
    return tuple(repaired)


def parse_conll(text: str, repair: bool = False, source: str = "synthetic",
                entity_types=ENTITY_TYPES) -> Corpus:
    """Parse 2-4 column CoNLL text (token first, NER tag last).

    Blank lines separate sentences; ``-DOCSTART-`` lines open a new
    document and are consumed, not emitted as tokens.  With ``repair``
    orphan I-X tags become B-X instead of raising BioViolationError.
    ``entity_types=None`` accepts any B-/I- type name (OntoNotes input).
    """
    if not text.strip():
        raise EmptyInputError("no CoNLL content in input")

    sentences: list[Sentence] = []
    tokens: list[Token] = []
    doc_id: str | None = None
    n_docs = 0
    prev_label = "O"

    def flush():
        nonlocal tokens, prev_label
        if tokens:
            sentences.append(Sentence(tuple(tokens), doc_id=doc_id, sent_id=len(sentences)))
        tokens = []
        prev_label = "O"

    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            flush()
            continue
        cols = line.split()
        if cols[0] == DOCSTART:
            flush()
            doc_id = f"d{n_docs}"
            n_docs += 1
            continue
        if not 2 <= len(cols) <= 4:
            raise ConllError(f"line {lineno}: expected 2-4 columns, got {len(cols)}")
        text_col, tag = cols[0], cols[-1]
        if not _label_ok(tag, entity_types) or tag in SPECIAL_LABELS:
            raise UnknownTagError(f"line {lineno}: unknown tag {tag!r}")
        if tag.startswith("I-") and label_type(prev_label) != tag[2:]:
            if repair:
                tag = "B-" + tag[2:]
            else:
                raise BioViolationError(
                    f"line {lineno}: {cols[-1]} does not continue a {cols[-1][2:]} entity")
        tokens.append(Token(text_col, tag, tuple(cols[1:-1])))
        prev_label = tag
    flush()

    return Corpus(tuple(sentences), source=source)


def serialize_conll(corpus: Corpus) -> str:
    """Inverse of parse_conll on tokens, labels, and sentence boundaries."""
    blocks = []
    prev_doc = None
    for s in corpus.sentences:
        lines = []
        for i, tok in enumerate(s.tokens):
            if tok.label in SPECIAL_LABELS:
                raise SpecialLabelError(
                    f"sentence {s.sent_id}: special label {tok.label} cannot be serialized")
            lines.append(" ".join((tok.text, *tok.extras, tok.label)))
        validate_bio(s.labels(), entity_types=None, where=f"sentence {s.sent_id}")
        if s.doc_id is not None and s.doc_id != prev_doc:
            blocks.append(f"{DOCSTART} O")
        prev_doc = s.doc_id
        blocks.append("\n".join(lines))
    if not blocks:
        return ""
    return "\n\n".join(blocks) + "\n"


def extract_spans(sentence: Sentence) -> list[EntitySpan]:
    """Maximal B-X (I-X)* runs of a BIO-valid sentence, sorted by start."""
    spans: list[EntitySpan] = []
    start = None
    etype = None
    for i, label in enumerate(sentence.labels()):
        if label.startswith("B-"):
            if start is not None:
                spans.append(EntitySpan(start, i, etype))
            start, etype = i, label[2:]
        elif label.startswith("I-"):
            continue
        else:
            if start is not None:
                spans.append(EntitySpan(start, i, etype))
            start = None
    if start is not None:
        spans.append(EntitySpan(start, len(sentence), etype))
    return spans


def apply_spans(texts, spans, doc_id: str | None = None, sent_id: int = 0) -> Sentence:
    """Build a sentence from raw token texts plus disjoint entity spans."""
    texts = list(texts)
    labels = ["O"] * len(texts)
    last_end = -1
    for span in sorted(spans):
        if span.end > len(texts):
            raise SpanOutOfRangeError(f"span {span} exceeds sentence length {len(texts)}")
        if span.start < last_end:
            raise OverlappingSpansError(f"span {span} overlaps a previous span")
        last_end = span.end
        labels[span.start] = "B-" + span.etype
        for i in range(span.start + 1, span.end):
            labels[i] = "I-" + span.etype
    tokens = tuple(Token(t, lab) for t, lab in zip(texts, labels))
    return Sentence(tokens, doc_id=doc_id, sent_id=sent_id)


DEFAULT_TYPE_MAPPING = {
    "PERSON": "PER",
    "ORG": "ORG",
    "GPE": "LOC",
    "LOC": "LOC",
    "FAC": "LOC",
    "NORP": "MISC",
    "PRODUCT": "MISC",
    "EVENT": "MISC",
    "WORK_OF_ART": "MISC",
    "LAW": "MISC",
    "LANGUAGE": "MISC",
    "DATE": "DROP",
    "TIME": "DROP",
    "PERCENT": "DROP",
    "MONEY": "DROP",
    "QUANTITY": "DROP",
    "ORDINAL": "DROP",
    "CARDINAL": "DROP",
}

_MAP_TARGETS = ENTITY_TYPES + ("DROP",)


def load_type_mapping(text: str) -> dict[str, str]:
    """Parse SOURCE<TAB>TARGET lines; TARGET in {PER,ORG,LOC,MISC,DROP}."""
    mapping = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 2:
            raise ConllError(f"mapping line {lineno}: expected SOURCE<TAB>TARGET")
        src, dst = parts
        if dst not in _MAP_TARGETS:
            raise ConllError(f"mapping line {lineno}: target {dst!r} not in {_MAP_TARGETS}")
        mapping[src] = dst
    return mapping


def map_entity_types(sentence: Sentence, mapping: dict[str, str] | None = None) -> Sentence:
    """Rewrite entity types per mapping; DROP targets become O.

    Default mapping folds OntoNotes types onto the CoNLL four.
    """
    if mapping is None:
        mapping = DEFAULT_TYPE_MAPPING
    tokens = []
    for tok in sentence.tokens:
        etype = label_type(tok.label)
        if etype is None:
            tokens.append(tok)
            continue
        target = mapping.get(etype)
        if target is None:
            raise UnmappedTypeError(f"no mapping for entity type {etype!r}")
        label = "O" if target == "DROP" else tok.label[:2] + target
        tokens.append(replace(tok, label=label))
    return replace(sentence, tokens=tuple(tokens))


def map_corpus_types(corpus: Corpus, mapping: dict[str, str] | None = None,
                     source: str | None = None) -> Corpus:
    mapped = tuple(map_entity_types(s, mapping) for s in corpus.sentences)
    return Corpus(mapped, source=source or corpus.source)


def entity_token_ratio(sentence: Sentence) -> float:
    if not sentence.tokens:
        return 0.0
    n_entity = sum(1 for t in sentence.tokens if is_entity_label(t.label))
    return n_entity / len(sentence.tokens)


def filter_by_entity_ratio(corpus: Corpus, min_ratio: float) -> Corpus:
    """Keep sentences whose entity-token fraction is strictly above min_ratio."""
    if not 0 <= min_ratio < 1:
        raise ConllError(f"min_ratio must be in [0, 1): {min_ratio}")
    kept = tuple(s for s in corpus.sentences if entity_token_ratio(s) > min_ratio)
    return Corpus(kept, source=corpus.source)


def sample_fewshot(corpus: Corpus, k: int, rng: random.Random) -> Corpus:
    """Draw k sentences per entity type (without replacement within a type).

    A sentence is in a type's pool if it contains at least one entity of
    that type; one sentence may be drawn for several types and appears
    once in the result.
    """
    if k < 0:
        raise ConllError(f"k must be >= 0: {k}")
    if k == 0:
        return Corpus((), source=corpus.source)
    pools: dict[str, list[Sentence]] = {t: [] for t in ENTITY_TYPES}
    for s in corpus.sentences:
        present = {label_type(t.label) for t in s.tokens if is_entity_label(t.label)}
        for etype in present:
            if etype in pools:
                pools[etype].append(s)
    chosen: set[int] = set()
    for etype in ENTITY_TYPES:
        pool = pools[etype]
        if len(pool) < k:
            raise InsufficientExamplesError(
                f"need {k} sentences containing {etype}, corpus has {len(pool)}")
        chosen.update(s.sent_id for s in rng.sample(pool, k))
    picked = tuple(s for s in corpus.sentences if s.sent_id in chosen)
    return Corpus(picked, source=corpus.source)
