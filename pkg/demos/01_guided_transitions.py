#!/usr/bin/env python3
"""Walk through the three guided entity-type transitions.

Each transition edits an entity so its gold type changes while most of
the surface form stays put: that is what makes the output adversarial
for a tagger that memorized token/type pairs.
"""

import random

from entshift.augment import (
    AugmentConfig,
    augment_corpus,
    find_eligible,
    transition_to_loc,
    transition_to_org,
    transition_to_per,
)
from entshift.conll import parse_conll
from entshift.phrases import load_default_library

library = load_default_library()
rng = random.Random(7)

# ---------------------------------------------------------------------------
# A tiny corpus in standard CoNLL layout: token column first, tag last.

corpus = parse_conll("""\
Every O
year O
, O
500 O
new O
plastic O
surgeons O
graduate O
in O
Brazil B-LOC
. O

Munich B-ORG
Re I-ORG
says O
to O
split O
stock O
. O

The O
Colts B-ORG
won O
. O
""")

# ---------------------------------------------------------------------------
# 1. Location -> Organization: a single-token LOC grows an org word phrase.

brazil = corpus.sentences[0]
site = find_eligible(brazil, "to_org", library)[0]
record = transition_to_org(brazil, site, library, rng)
print("to_org:")
print("  before:", " ".join(brazil.texts()))
print("  after: ", " ".join(record.result.texts()))
print("  edit:  ", record.inserted)

# ---------------------------------------------------------------------------
# 2. Organization -> Location: deleting an organization-forming phrase
#    ("Re") leaves a plain location, optionally with a location context.

munich = corpus.sentences[1]
site = find_eligible(munich, "to_loc", library)[0]
record = transition_to_loc(munich, site, library, rng)
print("\nto_loc:")
print("  before:", " ".join(munich.texts()))
print("  after: ", " ".join(record.result.texts()))
print("  deleted:", record.deleted, " inserted:", record.inserted)

# ---------------------------------------------------------------------------
# 3. Organization -> Person: append a surname, optionally a person context.

colts = corpus.sentences[2]
site = find_eligible(colts, "to_per", library)[0]
record = transition_to_per(colts, site, library, rng)
print("\nto_per:")
print("  before:", " ".join(colts.texts()))
print("  after: ", " ".join(record.result.texts()))
print("  labels:", " ".join(record.result.labels()))

# ---------------------------------------------------------------------------
# Corpus-level augmentation: pick a percentage of the eligible sentences
# (seeded, and nested across percentages) and apply one transition each.

for percent in (10, 50, 100):
    cfg = AugmentConfig(library, percent=percent, seed=11)
    augmented, records = augment_corpus(corpus, cfg)
    chosen = sorted(r.source_sent_id for r in records)
    print(f"\npercent={percent:>3}: augmented sentences {chosen}")
    for rec in records:
        print(f"  [{rec.transition}] {' '.join(rec.result.texts())}")
