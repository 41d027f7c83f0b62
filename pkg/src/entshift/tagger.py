"""A small from-scratch sequence tagger with hidden-space mixup.

Architecture: hash-bucketed embeddings followed by ``depth`` identical
residual blocks.  Block m+1 maps the hidden sequence h^m to

    h^{m+1}_i = tanh(W [h_{i-1}; h_i; h_{i+1}] + b) + h^m_i

with zero vectors past the sentence boundaries, then a linear projection
onto the 12-label inventory (O, B/I per type, and the special labels
that make mixup over unequal lengths possible).

Mixup runs two token-id sequences through the first m blocks, linearly
interpolates the two hidden sequences with a weight lam in [0.5, 1], and
continues the remaining blocks on the mixture alone; the label rows are
interpolated with the same weight.  Token ids themselves are never
interpolated.  Gradients are computed analytically (see ``grad``) and
are checked against central finite differences in the test suite.
"""

import hashlib
import json
import random
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .conll import (
    CLS,
    LABELS,
    LABEL_INDEX,
    PAD,
    SEP,
    Corpus,
    Sentence,
    repair_bio,
)
from .mixup import LengthMismatchError, MixupConfig, mix_labels, sample_lambda

CLS_ID, SEP_ID, PAD_ID = 0, 1, 2
N_SPECIAL_IDS = 3

PAD_LABEL = LABEL_INDEX[PAD]
N_TAG_LABELS = 9  # O plus B-/I- per type; prediction argmax is restricted to these

MODES = ("plain", "at", "at_dropout", "at_mixup")

REFERENCE_DEPTH = 12
REFERENCE_MIX_LAYERS = (8, 9, 10)


class TaggerError(ValueError):
    pass


@dataclass
class TaggerConfig:
    vocab_size: int = 1 << 16
    dim: int = 32
    depth: int = 12
    mix_layers: tuple[int, ...] | None = None
    n_labels: int = len(LABELS)
    learning_rate: float = 0.5
    epochs: int = 10
    batch_size: int = 8
    dropout: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.dim < 1 or self.depth < 2 or self.vocab_size <= N_SPECIAL_IDS:
            raise TaggerError("dim >= 1, depth >= 2, vocab_size > 3 required")
        if self.n_labels != len(LABELS):
            raise TaggerError(f"label inventory is fixed at {len(LABELS)}")
        if self.mix_layers is not None:
            self.mix_layers = tuple(self.mix_layers)
            if not self.mix_layers or any(not 1 <= m < self.depth for m in self.mix_layers):
                raise TaggerError(f"mix layers must be a non-empty subset of 1..{self.depth - 1}")
        if not 0 <= self.dropout < 1:
            raise TaggerError(f"dropout must be in [0, 1): {self.dropout}")

    def resolved_mix_layers(self) -> tuple[int, ...]:
        """Configured layers, or the reference set rescaled to this depth."""
        if self.mix_layers is not None:
            return self.mix_layers
        scaled = sorted({min(max(round(m * self.depth / REFERENCE_DEPTH), 1), self.depth - 1)
                         for m in REFERENCE_MIX_LAYERS})
        return tuple(scaled)


@dataclass
class TaggerParams:
    emb: np.ndarray    # (vocab, dim)
    w: np.ndarray      # (depth, dim, 3*dim)
    b: np.ndarray      # (depth, dim)
    w_out: np.ndarray  # (n_labels, dim)
    b_out: np.ndarray  # (n_labels,)

    def copy(self) -> "TaggerParams":
        return TaggerParams(self.emb.copy(), self.w.copy(), self.b.copy(),
                            self.w_out.copy(), self.b_out.copy())


def init_params(cfg: TaggerConfig) -> TaggerParams:
    rng = np.random.default_rng(cfg.seed)
    d = cfg.dim
    return TaggerParams(
        emb=rng.normal(0.0, 0.5, (cfg.vocab_size, d)),
        w=rng.normal(0.0, 1.0 / np.sqrt(3 * d), (cfg.depth, d, 3 * d)),
        b=np.zeros((cfg.depth, d)),
        w_out=rng.normal(0.0, 1.0 / np.sqrt(d), (cfg.n_labels, d)),
        b_out=np.zeros(cfg.n_labels),
    )


def zero_grads(params: TaggerParams) -> TaggerParams:
    return TaggerParams(np.zeros_like(params.emb), np.zeros_like(params.w),
                        np.zeros_like(params.b), np.zeros_like(params.w_out),
                        np.zeros_like(params.b_out))


def token_id(text: str, vocab_size: int) -> int:
    """Deterministic hash bucket; ids 0..2 are reserved for specials."""
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return N_SPECIAL_IDS + int.from_bytes(digest, "big") % (vocab_size - N_SPECIAL_IDS)


def encode_tokens(texts, cfg: TaggerConfig) -> np.ndarray:
    """Token ids with [CLS] in front and [SEP] at the back."""
    ids = [CLS_ID] + [token_id(t, cfg.vocab_size) for t in texts] + [SEP_ID]
    return np.array(ids, dtype=np.int64)


def wrap_labels(labels) -> tuple[str, ...]:
    return (CLS, *labels, SEP)


def one_hot(labels) -> np.ndarray:
    y = np.zeros((len(labels), len(LABELS)))
    for i, label in enumerate(labels):
        y[i, LABEL_INDEX[label]] = 1.0
    return y


def pad_pair(ids_a, y_a, ids_b, y_b):
    """Pad the shorter sequence with PAD ids carrying PAD labels."""
    n = max(len(ids_a), len(ids_b))

    def pad(ids, y):
        if len(ids) == n:
            return ids, y
        extra = n - len(ids)
        ids = np.concatenate([ids, np.full(extra, PAD_ID, dtype=np.int64)])
        tail = np.zeros((extra, y.shape[1]))
        tail[:, PAD_LABEL] = 1.0
        return ids, np.vstack([y, tail])

    ids_a, y_a = pad(ids_a, y_a)
    ids_b, y_b = pad(ids_b, y_b)
    return ids_a, y_a, ids_b, y_b


@dataclass(frozen=True)
class MixedExample:
    """A pair of aligned id sequences with an interpolated label target.

    ``ids_a`` is the anchor the mixture stays closest to (lam >= 0.5).
    Plain, unmixed sentences are represented as self-pairs with lam = 1.
    """

    ids_a: np.ndarray
    ids_b: np.ndarray
    lam: float
    layer: int
    target: np.ndarray


def plain_example(ids: np.ndarray, target: np.ndarray) -> MixedExample:
    return MixedExample(ids, ids, 1.0, 0, target)


def _is_plain(ex: MixedExample) -> bool:
    return ex.lam == 1.0 and ex.ids_b is ex.ids_a


def make_pairs(originals: Corpus, records, mixcfg: MixupConfig, cfg: TaggerConfig,
               rng: random.Random, ood: bool = False) -> list[MixedExample]:
    """Two mixed examples per (original, augmented) pair.

    One is anchored at the original sentence, one at the augmented one,
    each with its own beta distribution; the mix layer is drawn uniformly
    per example.  Sequences get [CLS]/[SEP] appended first, then the
    shorter one is padded with PAD.
    """
    layers = cfg.resolved_mix_layers()
    examples = []
    for rec in records:
        orig = originals.sentences[rec.source_sent_id]
        ids_o = encode_tokens(orig.texts(), cfg)
        y_o = one_hot(wrap_labels(orig.labels()))
        ids_g = encode_tokens(rec.result.texts(), cfg)
        y_g = one_hot(wrap_labels(rec.result.labels()))
        ids_o, y_o, ids_g, y_g = pad_pair(ids_o, y_o, ids_g, y_g)
        for anchor in ("orig", "aug"):
            alpha, beta = mixcfg.params_for(anchor, ood=ood)
            lam = sample_lambda(alpha, beta, rng)
            layer = layers[rng.randrange(len(layers))]
            if anchor == "orig":
                ids_x, y_x, ids_y, y_y = ids_o, y_o, ids_g, y_g
            else:
                ids_x, y_x, ids_y, y_y = ids_g, y_g, ids_o, y_o
            examples.append(MixedExample(ids_x, ids_y, lam, layer,
                                         mix_labels(y_x, y_y, lam)))
    return examples


# ---------------------------------------------------------------------------
# forward / backward


def _block_forward(w_m, b_m, h, mask=None):
    n, d = h.shape
    padded = np.zeros((n + 2, d))
    padded[1:-1] = h
    ctx = np.concatenate([padded[:-2], padded[1:-1], padded[2:]], axis=1)
    t = np.tanh(ctx @ w_m.T + b_m)
    t_out = t if mask is None else t * mask
    return t_out + h, ctx, t


def _block_backward(w_m, ctx, t, dh_out, mask=None):
    """Gradient through one residual block; returns (dh_in, dw, db)."""
    dt = dh_out if mask is None else dh_out * mask
    dz = dt * (1.0 - t * t)
    dw = dz.T @ ctx
    db = dz.sum(axis=0)
    dctx = dz @ w_m
    d = dh_out.shape[1]
    dh = dh_out.copy()
    dh[:-1] += dctx[1:, :d]
    dh += dctx[:, d:2 * d]
    dh[1:] += dctx[:-1, 2 * d:]
    return dh, dw, db


@dataclass
class _Trace:
    """Cached activations of one branch of a forward pass."""

    hiddens: list      # h^lo .. h^hi
    ctxs: list
    ts: list
    masks: list


def _run_blocks(params, h, lo, hi, masks=None):
    trace = _Trace([h], [], [], [])
    for m in range(lo, hi):
        mask = None if masks is None else masks[m]
        h, ctx, t = _block_forward(params.w[m], params.b[m], h, mask)
        trace.hiddens.append(h)
        trace.ctxs.append(ctx)
        trace.ts.append(t)
        trace.masks.append(mask)
    return trace


def _softmax_rows(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def _log_softmax_rows(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


@dataclass
class Forward:
    hiddens: list[np.ndarray]  # h^0 .. h^depth, each (n, dim)
    logits: np.ndarray         # (n, n_labels)
    probs: np.ndarray


def forward(params: TaggerParams, ids: np.ndarray) -> Forward:
    """Run the full stack on one id sequence (specials already appended)."""
    if len(ids) == 0:
        raise TaggerError("empty token sequence")
    depth = params.w.shape[0]
    trace = _run_blocks(params, params.emb[np.asarray(ids)], 0, depth)
    logits = trace.hiddens[-1] @ params.w_out.T + params.b_out
    return Forward(trace.hiddens, logits, _softmax_rows(logits))


def forward_mixed(params: TaggerParams, ids_a: np.ndarray, ids_b: np.ndarray,
                  lam: float, layer: int) -> Forward:
    """Interpolate the two hidden sequences after ``layer`` blocks, then
    finish the stack on the mixture.  Returns the mixture's hidden states
    from the interpolation point on."""
    ids_a = np.asarray(ids_a)
    ids_b = np.asarray(ids_b)
    if ids_a.shape != ids_b.shape:
        raise LengthMismatchError(f"sequences differ in length: {len(ids_a)} vs {len(ids_b)}")
    depth = params.w.shape[0]
    trace_a = _run_blocks(params, params.emb[ids_a], 0, layer)
    trace_b = _run_blocks(params, params.emb[ids_b], 0, layer)
    h_mix = lam * trace_a.hiddens[-1] + (1.0 - lam) * trace_b.hiddens[-1]
    trace_m = _run_blocks(params, h_mix, layer, depth)
    logits = trace_m.hiddens[-1] @ params.w_out.T + params.b_out
    return Forward(trace_m.hiddens, logits, _softmax_rows(logits))


def loss(probs: np.ndarray, target: np.ndarray) -> float:
    """Mean cross-entropy over positions whose target is not pure PAD."""
    probs = np.asarray(probs, dtype=float)
    target = np.asarray(target, dtype=float)
    if probs.shape != target.shape:
        raise LengthMismatchError(f"shapes differ: {probs.shape} vs {target.shape}")
    mask = target[:, PAD_LABEL] < 1.0 - 1e-12
    if not mask.any():
        return 0.0
    logp = np.log(np.maximum(probs, 1e-300))
    ce = -(target * logp).sum(axis=1)
    return float(ce[mask].mean())


def _example_grad(params, ex: MixedExample, grads, dropout=0.0, np_rng=None):
    """Accumulate one example's gradients into ``grads``; returns its loss."""
    depth = params.w.shape[0]
    masks = None
    if dropout > 0.0 and np_rng is not None and _is_plain(ex):
        keep = 1.0 - dropout
        n, d = len(ex.ids_a), params.emb.shape[1]
        masks = [(np_rng.random((n, d)) < keep) / keep for _ in range(depth)]

    if _is_plain(ex):
        h0 = params.emb[ex.ids_a]
        emb_stage = [(ex.ids_a, 1.0)]
        trace_head = None
        trace = _run_blocks(params, h0, 0, depth, masks)
    else:
        trace_a = _run_blocks(params, params.emb[ex.ids_a], 0, ex.layer)
        trace_b = _run_blocks(params, params.emb[ex.ids_b], 0, ex.layer)
        h_mix = ex.lam * trace_a.hiddens[-1] + (1.0 - ex.lam) * trace_b.hiddens[-1]
        emb_stage = [(ex.ids_a, ex.lam), (ex.ids_b, 1.0 - ex.lam)]
        trace_head = (trace_a, trace_b)
        trace = _run_blocks(params, h_mix, ex.layer, depth)

    logits = trace.hiddens[-1] @ params.w_out.T + params.b_out
    logp = _log_softmax_rows(logits)
    mask = ex.target[:, PAD_LABEL] < 1.0 - 1e-12
    n_masked = int(mask.sum())
    if n_masked == 0:
        return 0.0
    ex_loss = float(-(ex.target * logp)[mask].sum() / n_masked)

    dlogits = (np.exp(logp) - ex.target) * (mask[:, None] / n_masked)
    grads.w_out += dlogits.T @ trace.hiddens[-1]
    grads.b_out += dlogits.sum(axis=0)
    dh = dlogits @ params.w_out

    lo = 0 if _is_plain(ex) else ex.layer
    for k in reversed(range(lo, depth)):
        i = k - lo
        dh, dw, db = _block_backward(params.w[k], trace.ctxs[i], trace.ts[i],
                                     dh, trace.masks[i])
        grads.w[k] += dw
        grads.b[k] += db

    if trace_head is None:
        np.add.at(grads.emb, ex.ids_a, dh)
    else:
        for (ids, weight), head in zip(emb_stage, trace_head):
            dh_branch = weight * dh
            for k in reversed(range(0, ex.layer)):
                dh_branch, dw, db = _block_backward(params.w[k], head.ctxs[k],
                                                    head.ts[k], dh_branch)
                grads.w[k] += dw
                grads.b[k] += db
            np.add.at(grads.emb, ids, dh_branch)
    return ex_loss


def grad(params: TaggerParams, batch, dropout: float = 0.0,
         np_rng=None) -> tuple[float, TaggerParams]:
    """Analytic gradients of the batch-mean loss w.r.t. every parameter.

    Gradient flows through both branches of a mixed example, weighted by
    lam and (1 - lam) below the interpolation point.
    """
    if not batch:
        raise TaggerError("empty batch")
    grads = zero_grads(params)
    total = 0.0
    for ex in batch:
        total += _example_grad(params, ex, grads, dropout=dropout, np_rng=np_rng)
    scale = 1.0 / len(batch)
    for arr in (grads.emb, grads.w, grads.b, grads.w_out, grads.b_out):
        arr *= scale
    return total * scale, grads


def sgd_step(params: TaggerParams, grads: TaggerParams, lr: float) -> None:
    params.emb -= lr * grads.emb
    params.w -= lr * grads.w
    params.b -= lr * grads.b
    params.w_out -= lr * grads.w_out
    params.b_out -= lr * grads.b_out


# ---------------------------------------------------------------------------
# training


@dataclass
class TrainResult:
    params: TaggerParams
    history: list[dict] = field(default_factory=list)


def _singles(corpus: Corpus, cfg: TaggerConfig, skip_ids=frozenset()) -> list[MixedExample]:
    out = []
    for s in corpus.sentences:
        if s.sent_id in skip_ids:
            continue
        ids = encode_tokens(s.texts(), cfg)
        out.append(plain_example(ids, one_hot(wrap_labels(s.labels()))))
    return out


def train(corpus: Corpus, cfg: TaggerConfig, mode: str = "plain",
          augmented: Corpus | None = None, records=None,
          mixcfg: MixupConfig | None = None,
          ood_corpus: Corpus | None = None, ood_records=None) -> TrainResult:
    """Mini-batch SGD in one of four modes.

    plain       original sentences only
    at          originals plus all augmented sentences
    at_dropout  same data as ``at`` with dropout (0.5 unless configured)
    at_mixup    each (original, augmented) pair is replaced by its two
                mixed examples; untouched originals train as usual, so
                the number of data points matches ``at``

    With ``ood_corpus``/``ood_records`` the same recipe is applied to the
    extra out-of-domain sentences (mixed with the ood beta parameters).
    """
    if mode not in MODES:
        raise TaggerError(f"unknown training mode: {mode!r}")
    if mode != "plain":
        if augmented is None and records:
            augmented = Corpus(tuple(r.result for r in records), source=corpus.source)
        if mode == "at_mixup" and not records:
            raise TaggerError("at_mixup needs augmentation records")
        if mode in ("at", "at_dropout") and augmented is None:
            raise TaggerError(f"{mode} needs an augmented corpus")
    if mixcfg is None:
        mixcfg = MixupConfig()

    dropout = cfg.dropout
    if mode == "at_dropout" and dropout == 0.0:
        dropout = 0.5

    fixed: list[MixedExample] = []
    if mode == "plain":
        fixed += _singles(corpus, cfg)
    elif mode in ("at", "at_dropout"):
        fixed += _singles(corpus, cfg) + _singles(augmented, cfg)
        if ood_corpus is not None:
            fixed += _singles(ood_corpus, cfg)
            if ood_records:
                aug_ood = Corpus(tuple(r.result for r in ood_records), source=ood_corpus.source)
                fixed += _singles(aug_ood, cfg)
    else:
        skip = frozenset(r.source_sent_id for r in records)
        fixed += _singles(corpus, cfg, skip_ids=skip)
        if ood_corpus is not None:
            skip_ood = frozenset(r.source_sent_id for r in (ood_records or ()))
            fixed += _singles(ood_corpus, cfg, skip_ids=skip_ood)

    py_rng = random.Random(cfg.seed)
    np_rng = np.random.default_rng(cfg.seed + 1)
    params = init_params(cfg)
    result = TrainResult(params)
    for epoch in range(cfg.epochs):
        examples = list(fixed)
        if mode == "at_mixup":
            examples += make_pairs(corpus, records, mixcfg, cfg, py_rng)
            if ood_corpus is not None and ood_records:
                examples += make_pairs(ood_corpus, ood_records, mixcfg, cfg,
                                       py_rng, ood=True)
        py_rng.shuffle(examples)
        losses = []
        for i in range(0, len(examples), cfg.batch_size):
            batch = examples[i:i + cfg.batch_size]
            batch_loss, grads = grad(params, batch, dropout=dropout, np_rng=np_rng)
            sgd_step(params, grads, cfg.learning_rate)
            losses.append(batch_loss)
        result.history.append({"epoch": epoch, "loss": float(np.mean(losses))})
    return result


def predict(params: TaggerParams, sentence: Sentence, cfg: TaggerConfig) -> Sentence:
    """Argmax over the non-special labels, then orphan-I repair."""
    ids = encode_tokens(sentence.texts(), cfg)
    fwd = forward(params, ids)
    body = fwd.probs[1:-1, :N_TAG_LABELS]
    labels = repair_bio(tuple(LABELS[i] for i in body.argmax(axis=1)))
    tokens = tuple(replace(tok, label=label) for tok, label in zip(sentence.tokens, labels))
    return replace(sentence, tokens=tokens)


def predict_corpus(params: TaggerParams, corpus: Corpus, cfg: TaggerConfig) -> Corpus:
    return Corpus(tuple(predict(params, s, cfg) for s in corpus.sentences),
                  source=corpus.source)


# ---------------------------------------------------------------------------
# checkpoints and metrics

CHECKPOINT_VERSION = 1


def save_model(path, params: TaggerParams, cfg: TaggerConfig) -> None:
    np.savez_compressed(path, version=CHECKPOINT_VERSION,
                        config=json.dumps(asdict(cfg)),
                        emb=params.emb, w=params.w, b=params.b,
                        w_out=params.w_out, b_out=params.b_out)


def load_model(path) -> tuple[TaggerParams, TaggerConfig]:
    data = np.load(path, allow_pickle=False)
    if int(data["version"]) != CHECKPOINT_VERSION:
        raise TaggerError(f"unsupported checkpoint version: {data['version']}")
    raw = json.loads(str(data["config"]))
    if raw.get("mix_layers") is not None:
        raw["mix_layers"] = tuple(raw["mix_layers"])
    cfg = TaggerConfig(**raw)
    params = TaggerParams(data["emb"], data["w"], data["b"], data["w_out"], data["b_out"])
    return params, cfg


def write_metrics(path, rows) -> None:
    """rows: dicts with epoch, split, loss, f1 (missing values allowed)."""
    import csv

    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=["epoch", "split", "loss", "f1"])
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in ("epoch", "split", "loss", "f1")})
