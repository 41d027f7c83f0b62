"""Expert-guided entity-type transitions, mixup training, and challenge-set
curation for NER corpora in CoNLL format."""

__version__ = "0.1.0"
