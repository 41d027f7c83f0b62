#!/usr/bin/env python3
"""Entity-level scoring: exact span matches, per-type and per-transition."""

import random

from entshift.augment import AugmentConfig, augment_corpus
from entshift.conll import Corpus, Sentence, Token
from entshift.evaluation import agreement, entity_f1, format_report, per_transition_report
from entshift.phrases import load_default_library


def sent(pairs, i=0):
    return Sentence(tuple(Token(t, l) for t, l in pairs), sent_id=i)


gold = Corpus((
    sent([("Tony", "B-PER"), ("Siragusa", "I-PER"), ("joined", "O"), ("Colts", "B-ORG")], 0),
    sent([("Munich", "B-ORG"), ("Re", "I-ORG"), ("in", "O"), ("Bonn", "B-LOC")], 1),
))
pred = Corpus((
    # boundary error on the person, org correct
    sent([("Tony", "B-PER"), ("Siragusa", "O"), ("joined", "O"), ("Colts", "B-ORG")], 0),
    # type error on the location
    sent([("Munich", "B-ORG"), ("Re", "I-ORG"), ("in", "O"), ("Bonn", "B-ORG")], 1),
))

report = entity_f1(gold, pred)
print(format_report(report))
print("\nonly exact (start, end, type) triples count: the clipped person span")
print("and the mistyped location earn nothing.")

# ---------------------------------------------------------------------------
# Per-transition breakdown of a challenge split, via the provenance records.

originals = Corpus(tuple(
    sent([(f"Loc{i}", "B-LOC"), ("said", "O")], i) if i % 2 else
    sent([(f"Org{i}", "B-ORG"), ("Re", "I-ORG"), ("fell", "O")], i)
    for i in range(8)))
challenge, records = augment_corpus(
    originals, AugmentConfig(load_default_library(), percent=100, seed=4))

perfect = challenge  # pretend the model nailed everything
print("\nchallenge-split counts by transition:")
for transition, rep in per_transition_report(challenge, perfect, records).items():
    print(f"  {transition:<7} gold spans {rep.micro.gold:>2}  F1 {rep.micro.f1:.2f}")

# ---------------------------------------------------------------------------
# Inter-annotator agreement is a plain fraction over shared items.

ann1 = {f"item{i}": "high" for i in range(50)}
ann2 = {f"item{i}": ("high" if i < 39 else "low") for i in range(50)}
print(f"\nagreement over the 50-item pilot: {agreement(ann1, ann2):.2f}")
