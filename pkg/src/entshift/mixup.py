"""Mixing-ratio sampling and label interpolation.

A mixing weight is drawn from Beta(alpha, beta) and folded upward with
``max(lam, 1 - lam)`` so the mixed point always sits closer to its anchor
sequence.  Two beta distributions are used per setting: one for examples
anchored at the original sentence, one for those anchored at the
augmented sentence.  Few-shot training adds a second pair for the
out-of-domain examples.
"""

import random
from dataclasses import dataclass

import numpy as np

# (alpha, beta) for original-anchored draws, keyed by augmentation percent
BETA_ORIG_BY_PERCENT = {
    10: (130.0, 9.0),
    30: (150.0, 5.0),
    50: (130.0, 7.0),
    100: (150.0, 5.0),
}
BETA_AUG_DEFAULT = (200.0, 5.0)
BETA_OOD_ORIG_DEFAULT = (200.0, 5.0)
BETA_OOD_AUG_DEFAULT = (130.0, 7.0)


class MixupError(ValueError):
    pass


class LengthMismatchError(MixupError):
    pass


@dataclass(frozen=True)
class MixupConfig:
    """Beta parameters per anchor side; the ood pair is few-shot only."""

    alpha_orig: float = 150.0
    beta_orig: float = 5.0
    alpha_aug: float = 200.0
    beta_aug: float = 5.0
    alpha_orig_ood: float | None = None
    beta_orig_ood: float | None = None
    alpha_aug_ood: float | None = None
    beta_aug_ood: float | None = None

    def __post_init__(self):
        for name in ("alpha_orig", "beta_orig", "alpha_aug", "beta_aug",
                     "alpha_orig_ood", "beta_orig_ood", "alpha_aug_ood", "beta_aug_ood"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise MixupError(f"{name} must be positive: {value}")

    def params_for(self, anchor: str, ood: bool = False) -> tuple[float, float]:
        if anchor not in ("orig", "aug"):
            raise MixupError(f"anchor must be 'orig' or 'aug': {anchor}")
        if ood:
            alpha = getattr(self, f"alpha_{anchor}_ood")
            beta = getattr(self, f"beta_{anchor}_ood")
            if alpha is None or beta is None:
                raise MixupError("config has no ood beta parameters (few-shot mode only)")
            return alpha, beta
        return getattr(self, f"alpha_{anchor}"), getattr(self, f"beta_{anchor}")


def config_for_percent(percent: int, fewshot: bool = False) -> MixupConfig:
    """Default beta parameters for an augmentation percent setting.

    Percents outside the tabulated {10, 30, 50, 100} fall back to the
    nearest tabulated setting (larger wins a tie).
    """
    if percent in BETA_ORIG_BY_PERCENT:
        key = percent
    else:
        key = min(BETA_ORIG_BY_PERCENT, key=lambda k: (abs(k - percent), -k))
    alpha_orig, beta_orig = BETA_ORIG_BY_PERCENT[key]
    alpha_aug, beta_aug = BETA_AUG_DEFAULT
    if not fewshot:
        return MixupConfig(alpha_orig, beta_orig, alpha_aug, beta_aug)
    return MixupConfig(alpha_orig, beta_orig, alpha_aug, beta_aug,
                       *BETA_OOD_ORIG_DEFAULT, *BETA_OOD_AUG_DEFAULT)


def sample_lambda(alpha: float, beta: float, rng: random.Random) -> float:
    """Draw from Beta(alpha, beta) folded into [0.5, 1]."""
    if alpha <= 0 or beta <= 0:
        raise MixupError(f"beta parameters must be positive: ({alpha}, {beta})")
    lam = rng.betavariate(alpha, beta)
    return max(lam, 1.0 - lam)


def mix_labels(y: np.ndarray, y_other: np.ndarray, lam: float) -> np.ndarray:
    """lam * y + (1 - lam) * y_other, rowwise over label distributions."""
    y = np.asarray(y, dtype=float)
    y_other = np.asarray(y_other, dtype=float)
    if y.shape != y_other.shape:
        raise LengthMismatchError(f"label shapes differ: {y.shape} vs {y_other.shape}")
    return lam * y + (1.0 - lam) * y_other
