"""Synthetic templated corpora for demos, fixtures, and desk-scale runs.

Entity names are invented, so the fixtures carry no third-party data.
Train and test splits share the same entity pools (new combinations per
sentence), which lets a small memorizing tagger do well in-distribution
while staying fully exposed to entity-type flips.
"""

import random

from .conll import Corpus, Sentence, Token

PER_POOL = (
    "Abreno", "Bastari", "Corvek", "Delmaro", "Estavan", "Ferroni", "Galdos",
    "Hastrel", "Ivarsen", "Jorvik", "Kelsano", "Lumeda", "Morvath", "Narbel",
)
LOC_POOL = (
    "Bratava", "Cordenia", "Drelmont", "Elvara", "Fornesia", "Gravano", "Helmira",
    "Istriel", "Jelgath", "Kormina", "Lestara", "Mirenta", "Norvalia", "Ostreva",
)
ORG_POOL = (
    "Zentrix", "Cobratel", "Danforth", "Meditron", "Quorvex", "Sularon", "Trivanta",
    "Ulbrecht", "Vendara", "Wexcorp",
)
# multi-token orgs built so the guided to_loc transition can strip them
ORG_SUFFIXES = ("Re", "Telecom", "Motors", "Steel", "Airlines")
MISC_POOL = (("Vortex", "Cup"), ("Solstice", "Games"), ("Meridian", "Prize"))

_TEMPLATES = (
    ("per_loc", ("{PER}", "visited", "{LOC}", "on", "Friday", ".")),
    ("per_org", ("{PER}", "joined", "{ORG}", "last", "season", ".")),
    ("org_only", ("{ORG}", "shares", "fell", "sharply", ".")),
    ("orgm_loc", ("{ORGM}", "cut", "jobs", "in", "{LOC}", ".")),
    ("say_org", ("analysts", "said", "{ORG}", "beat", "forecasts", ".")),
    ("loc_only", ("{LOC}", "exports", "rose", "in", "March", ".")),
    ("per_loc2", ("{PER}", "met", "reporters", "in", "{LOC}", ".")),
    ("misc_loc", ("the", "{MISC}", "opens", "in", "{LOC}", ".")),
    ("orgm_per", ("{ORGM}", "named", "{PER}", "as", "chairman", ".")),
    ("loc_org", ("officials", "from", "{LOC}", "praised", "{ORG}", ".")),
)


def _fill(slot, rng):
    """(texts, labels) for one template slot."""
    if slot == "{PER}":
        return [rng.choice(PER_POOL)], ["B-PER"]
    if slot == "{LOC}":
        return [rng.choice(LOC_POOL)], ["B-LOC"]
    if slot == "{ORG}":
        return [rng.choice(ORG_POOL)], ["B-ORG"]
    if slot == "{ORGM}":
        if rng.random() < 0.5:
            texts = ["Bank", "of", rng.choice(LOC_POOL)]
        else:
            texts = [rng.choice(LOC_POOL), rng.choice(ORG_SUFFIXES)]
        return texts, ["B-ORG"] + ["I-ORG"] * (len(texts) - 1)
    if slot == "{MISC}":
        texts = list(rng.choice(MISC_POOL))
        return texts, ["B-MISC"] + ["I-MISC"] * (len(texts) - 1)
    return [slot], ["O"]


def synthetic_sentence(rng: random.Random, sent_id: int = 0) -> Sentence:
    _, template = _TEMPLATES[rng.randrange(len(_TEMPLATES))]
    tokens = []
    for slot in template:
        texts, labels = _fill(slot, rng)
        tokens += [Token(t, l) for t, l in zip(texts, labels)]
    return Sentence(tuple(tokens), sent_id=sent_id)


def synthetic_corpus(n: int, seed: int = 0, source: str = "synthetic") -> Corpus:
    rng = random.Random(seed)
    return Corpus(tuple(synthetic_sentence(rng, i) for i in range(n)), source=source)


def synthetic_split(n_train: int = 500, n_test: int = 150,
                    seed: int = 13) -> tuple[Corpus, Corpus]:
    """Disjointly seeded train/test corpora over shared entity pools."""
    train = synthetic_corpus(n_train, seed=seed, source="ID-train")
    test = synthetic_corpus(n_test, seed=seed + 1, source="ID-test")
    return train, test
