#!/usr/bin/env python3
"""The six expert word-phrase sets and the hold-out protocol.

Holding out a quarter of each set before augmenting the training data is
what lets the challenge set probe generalization: the challenge set is
built with the full sets, so a model that merely memorized the training
phrases stumbles on the held-out ones.
"""

import random

from entshift.phrases import (
    CONTEXT_AFTER,
    ORG_FORMING,
    TOKEN_AFTER,
    TOKEN_BEFORE,
    load_default_library,
    sample_phrase,
    split_holdout,
)

library = load_default_library()

print("bundled replica set sizes:")
for (etype, role), size in library.sizes().items():
    print(f"  ({etype:<3}, {role:<13}) {size:>4}")
total = sum(library.sizes().values())
print(f"  total {total}")

# ---------------------------------------------------------------------------
# Sampling is uniform within a set and always caller-seeded.

rng = random.Random(3)
print("\nsample draws:")
print("  ORG token-after :", " ".join(sample_phrase(library, "ORG", TOKEN_AFTER, rng)))
print("  ORG token-before:", " ".join(sample_phrase(library, "ORG", TOKEN_BEFORE, rng)))
print("  LOC org-forming :", " ".join(sample_phrase(library, "LOC", ORG_FORMING, rng)))
print("  PER context     :", " ".join(sample_phrase(library, "PER", CONTEXT_AFTER, rng)))

# ---------------------------------------------------------------------------
# 25% hold-out: ceil(0.25 * n) phrases per set go to the held-out side;
# train and held-out partition each set exactly.

train, heldout = split_holdout(library, 0.25, random.Random(42))
print("\nafter a 25% hold-out split:")
for key in sorted(library.sets):
    n = len(library.get(*key))
    print(f"  {key}: {n} = {len(train.get(*key))} train + {len(heldout.get(*key))} heldout")

overlap = sum(len(set(train.get(*k)) & set(heldout.get(*k))) for k in library.sets)
print(f"\ntrain/heldout overlap: {overlap} phrases (must be 0)")
print(f"provenance tags: {train.provenance!r} / {heldout.provenance!r}")
