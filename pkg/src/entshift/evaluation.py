"""Entity-level precision/recall/F1 with exact span matching.

A predicted span counts only if its (start, end, type) triple equals a
gold span's.  Counting follows the classic streaming chunk-evaluation
scheme: a chunk is credited when it starts and ends at the same positions
in gold and prediction with the same type.  P or R with a zero
denominator is reported as 0, as is F1 when P + R = 0.
"""

import json
from dataclasses import asdict, dataclass

from .conll import Corpus, ENTITY_TYPES, label_type


class EvalError(ValueError):
    pass


class AlignmentMismatchError(EvalError):
    pass


class NoSharedItemsError(EvalError):
    pass


@dataclass(frozen=True)
class Scores:
    precision: float
    recall: float
    f1: float
    gold: int
    pred: int
    matched: int


def _scores(gold: int, pred: int, matched: int) -> Scores:
    p = matched / pred if pred else 0.0
    r = matched / gold if gold else 0.0
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return Scores(p, r, f1, gold, pred, matched)


@dataclass(frozen=True)
class EvalReport:
    micro: Scores
    per_type: dict[str, Scores]

    def to_json(self) -> str:
        return json.dumps({"micro": asdict(self.micro),
                           "per_type": {t: asdict(s) for t, s in self.per_type.items()}},
                          indent=2)


def _chunk_states(labels):
    """Yield (starts_here, etype) per position plus a terminating O."""
    for label in labels:
        kind = label[0] if label.startswith(("B-", "I-")) else "O"
        yield kind, label_type(label)
    yield "O", None


def entity_f1(gold: Corpus, pred: Corpus) -> EvalReport:
    """Micro and per-type exact-span scores over aligned corpora."""
    if len(gold) != len(pred):
        raise AlignmentMismatchError(
            f"sentence counts differ: {len(gold)} gold vs {len(pred)} predicted")
    gold_n = {t: 0 for t in ENTITY_TYPES}
    pred_n = {t: 0 for t in ENTITY_TYPES}
    match_n = {t: 0 for t in ENTITY_TYPES}
    for gs, ps in zip(gold.sentences, pred.sentences):
        if len(gs) != len(ps):
            raise AlignmentMismatchError(
                f"sentence {gs.sent_id}: token counts differ ({len(gs)} vs {len(ps)})")
        in_correct = None
        g_prev = p_prev = "O"
        for (g_kind, g_t), (p_kind, p_t) in zip(_chunk_states(gs.labels()),
                                                _chunk_states(ps.labels())):
            g_end = g_prev != "O" and g_kind != "I"
            p_end = p_prev != "O" and p_kind != "I"
            if in_correct is not None:
                if g_end and p_end:
                    match_n[in_correct] += 1
                    in_correct = None
                elif g_end != p_end:
                    in_correct = None
            g_start = g_kind == "B"
            p_start = p_kind == "B"
            if g_start:
                gold_n[g_t] = gold_n.get(g_t, 0) + 1
            if p_start:
                pred_n[p_t] = pred_n.get(p_t, 0) + 1
            if g_start and p_start and g_t == p_t:
                in_correct = g_t
            g_prev = g_kind
            p_prev = p_kind
    per_type = {t: _scores(gold_n[t], pred_n[t], match_n.get(t, 0)) for t in sorted(gold_n)}
    micro = _scores(sum(gold_n.values()), sum(pred_n.values()), sum(match_n.values()))
    return EvalReport(micro, per_type)


def per_transition_report(gold: Corpus, pred: Corpus, records) -> dict[str, EvalReport]:
    """Evaluation partitioned by the transition that produced each sentence."""
    if len(records) != len(gold):
        raise AlignmentMismatchError(
            f"{len(records)} records do not align with {len(gold)} sentences")
    by_transition: dict[str, list[int]] = {}
    for i, rec in enumerate(records):
        by_transition.setdefault(rec.transition, []).append(i)
    out = {}
    for transition, idxs in sorted(by_transition.items()):
        sub_gold = Corpus(tuple(gold.sentences[i] for i in idxs), source=gold.source)
        sub_pred = Corpus(tuple(pred.sentences[i] for i in idxs), source=pred.source)
        out[transition] = entity_f1(sub_gold, sub_pred)
    return out


def agreement(a: dict, b: dict) -> float:
    """Fraction of shared items on which two annotators agree."""
    shared = a.keys() & b.keys()
    if not shared:
        raise NoSharedItemsError("annotators share no items")
    return sum(a[k] == b[k] for k in shared) / len(shared)


def format_report(report: EvalReport) -> str:
    lines = [f"{'type':<8} {'P':>8} {'R':>8} {'F1':>8} {'gold':>6} {'pred':>6} {'match':>6}"]
    rows = list(report.per_type.items()) + [("micro", report.micro)]
    for name, s in rows:
        lines.append(f"{name:<8} {s.precision:>8.4f} {s.recall:>8.4f} {s.f1:>8.4f} "
                     f"{s.gold:>6} {s.pred:>6} {s.matched:>6}")
    return "\n".join(lines)
