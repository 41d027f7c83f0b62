"""The expert word-phrase sets that drive the entity-type transitions.

Six sets, keyed by (target entity type, role):

* (ORG, token_before/token_after) -- words inserted around a single-token
  entity to make it an organization ("University of" X, X "Department").
* (ORG, context_after)            -- organization-flavored contexts.
* (LOC, org_forming)              -- phrases whose removal from an ORG
  entity leaves a location ("Munich Re" -> "Munich").
* (LOC, context_after)            -- location-flavored contexts.
* (PER, token_after)              -- surnames appended to form a person.
* (PER, context_after)            -- person-flavored contexts.

The bundled sets under ``entshift/data/phrases`` are synthetic replicas
sized to match the published expert sets; load your own directory to use
different ones.
"""

import math
import random
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

TOKEN_BEFORE = "token_before"
TOKEN_AFTER = "token_after"
CONTEXT_AFTER = "context_after"
ORG_FORMING = "org_forming"

ROLES = (TOKEN_BEFORE, TOKEN_AFTER, CONTEXT_AFTER, ORG_FORMING)

# phrase = pre-tokenized tuple of whitespace-free token texts
Phrase = tuple[str, ...]

# filename -> (entity type, "token" for marker files, else the role)
SET_FILES = {
    "org_token.txt": ("ORG", "token"),
    "org_context.txt": ("ORG", CONTEXT_AFTER),
    "loc_orgforming.txt": ("LOC", ORG_FORMING),
    "loc_context.txt": ("LOC", CONTEXT_AFTER),
    "per_token.txt": ("PER", "token"),
    "per_context.txt": ("PER", CONTEXT_AFTER),
}


class PhraseSetError(ValueError):
    pass


class MissingSetFileError(PhraseSetError):
    pass


class EmptySetError(PhraseSetError):
    pass


class DuplicatePhraseWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PhraseLibrary:
    """Immutable phrase sets; ``provenance`` records any hold-out split."""

    sets: dict[tuple[str, str], tuple[Phrase, ...]]
    provenance: str = "full"

    def get(self, etype: str, role: str) -> tuple[Phrase, ...]:
        return self.sets.get((etype, role), ())

    def size(self, etype: str, role: str) -> int:
        return len(self.get(etype, role))

    def sizes(self) -> dict[tuple[str, str], int]:
        return {key: len(phrases) for key, phrases in sorted(self.sets.items())}


def _parse_line(line: str, marked: bool, where: str) -> tuple[str | None, Phrase]:
    role = None
    if marked:
        head, sep, rest = line.partition("|")
        if not sep or head not in ("before", "after"):
            raise PhraseSetError(f"{where}: token-change lines need a before|/after| marker")
        role = TOKEN_BEFORE if head == "before" else TOKEN_AFTER
        line = rest
    tokens = tuple(line.split())
    if not tokens:
        raise PhraseSetError(f"{where}: empty phrase")
    return role, tokens


def load_library(directory) -> PhraseLibrary:
    """Load the six set files from a directory (layout in SET_FILES)."""
    directory = Path(directory)
    sets: dict[tuple[str, str], list[Phrase]] = {}
    for filename, (etype, kind) in SET_FILES.items():
        path = directory / filename
        if not path.exists():
            raise MissingSetFileError(f"phrase set file missing: {path}")
        marked = kind == "token"
        n_loaded = 0
        for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            role, phrase = _parse_line(line, marked, f"{filename}:{lineno}")
            key = (etype, role if marked else kind)
            bucket = sets.setdefault(key, [])
            if phrase in bucket:
                warnings.warn(f"{filename}:{lineno}: duplicate phrase {' '.join(phrase)!r}",
                              DuplicatePhraseWarning)
                continue
            bucket.append(phrase)
            n_loaded += 1
        if n_loaded == 0:
            raise EmptySetError(f"{filename} contains no phrases")
    return PhraseLibrary({k: tuple(v) for k, v in sets.items()}, provenance="full")


def save_library(library: PhraseLibrary, directory) -> None:
    """Write a library back out in the load_library file layout."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for filename, (etype, kind) in SET_FILES.items():
        lines = []
        if kind == "token":
            for role, marker in ((TOKEN_BEFORE, "before"), (TOKEN_AFTER, "after")):
                lines += [f"{marker}|{' '.join(p)}" for p in library.get(etype, role)]
        else:
            lines += [" ".join(p) for p in library.get(etype, kind)]
        (directory / filename).write_text("\n".join(lines) + "\n", encoding="utf-8")


def default_library_dir() -> Path:
    return Path(resources.files("entshift") / "data" / "phrases")


def load_default_library() -> PhraseLibrary:
    """The bundled replica sets (sizes 44 / 42 / 82 / 16 / 152 / 49)."""
    return load_library(default_library_dir())


def split_holdout(library: PhraseLibrary, fraction: float,
                  rng: random.Random) -> tuple[PhraseLibrary, PhraseLibrary]:
    """Partition every set: ceil(fraction * n) phrases held out, rest kept.

    Held-out phrases never reach training-side augmentation; the split is
    per set, order-preserving, and deterministic under a seeded rng.
    """
    if not 0 <= fraction < 1:
        raise PhraseSetError(f"hold-out fraction must be in [0, 1): {fraction}")
    train: dict[tuple[str, str], tuple[Phrase, ...]] = {}
    heldout: dict[tuple[str, str], tuple[Phrase, ...]] = {}
    for key in sorted(library.sets):
        phrases = library.sets[key]
        n_held = math.ceil(fraction * len(phrases) - 1e-9)
        held_idx = set(rng.sample(range(len(phrases)), n_held))
        heldout[key] = tuple(p for i, p in enumerate(phrases) if i in held_idx)
        train[key] = tuple(p for i, p in enumerate(phrases) if i not in held_idx)
    return (PhraseLibrary(train, provenance="train-split"),
            PhraseLibrary(heldout, provenance="heldout-split"))


def sample_phrase(library: PhraseLibrary, etype: str, role: str,
                  rng: random.Random) -> Phrase:
    """Uniform draw from one set."""
    phrases = library.get(etype, role)
    if not phrases:
        raise EmptySetError(f"no phrases for ({etype}, {role}) in {library.provenance} library")
    return phrases[rng.randrange(len(phrases))]


def sample_token_change(library: PhraseLibrary, etype: str,
                        rng: random.Random) -> tuple[str, Phrase]:
    """Uniform draw over the union of a type's before/after insertion sets."""
    pool = [(TOKEN_BEFORE, p) for p in library.get(etype, TOKEN_BEFORE)]
    pool += [(TOKEN_AFTER, p) for p in library.get(etype, TOKEN_AFTER)]
    if not pool:
        raise EmptySetError(f"no token-change phrases for {etype}")
    return pool[rng.randrange(len(pool))]
