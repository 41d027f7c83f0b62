#!/usr/bin/env python3
"""The four comparison attacks: concat, typos, cross-category, swap-longer.

These are blunter than the guided transitions: typos and concatenation
keep every label, while the two swap attacks substitute whole entities
from an inventory harvested out of the corpus itself.
"""

import random

from entshift.attacks import (
    attack_corpus,
    concat_sent,
    cross_category,
    ent_typos,
    harvest_inventory,
    swap_longer,
)
from entshift.conll import parse_conll

corpus = parse_conll("""\
-DOCSTART- O

Munich B-ORG
Re I-ORG
says O
to O
split O
stock O
. O

Tony B-PER
Siragusa I-PER
played O
in O
Brazil B-LOC
. O

Colts B-ORG
won O
. O
""")

inventory = harvest_inventory(corpus)
print("harvested inventory:")
for etype, forms in sorted(inventory.forms.items()):
    print(f"  {etype}: {[' '.join(f) for f in forms]}")

rng = random.Random(5)
munich, tony, colts = corpus.sentences

print("\nconcat_sent:")
print("  ", " ".join(concat_sent(munich, tony).texts()))

print("\nent_typos (one character edit inside an entity):")
for _ in range(3):
    print("  ", " ".join(ent_typos(tony, rng).texts()))

print("\ncross_category (entity swapped for a differently-typed form):")
for _ in range(3):
    out = cross_category(tony, inventory, rng)
    print("  ", " ".join(out.texts()), "|", " ".join(out.labels()))

print("\nswap_longer (entity swapped for a strictly longer same-type form):")
out = swap_longer(colts, inventory, rng)
print("  ", " ".join(out.texts()), "|", " ".join(out.labels()))

# ---------------------------------------------------------------------------
# Corpus-level application mirrors the guided engine: seeded selection of
# percent% of the attackable sentences, one record per edit.

attacked, records = attack_corpus(corpus, "mix", percent=100, seed=9)
print("\nmixed attack over the corpus:")
for rec in records:
    print(f"  [{rec.method}] {' '.join(rec.result.texts())}")
