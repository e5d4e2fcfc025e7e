"""Quantile transform to a standard normal, with exact inverse.

Fitted on the training window only; maps any value through the
piecewise-linear empirical CDF of the training quantiles and then the
normal inverse CDF. Out-of-range values clamp instead of producing
infinite deviates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDistribution, TooFewSamples
from .normal import normal_cdf, normal_ppf, normal_ppf_array

DEFAULT_N_QUANTILES = 1000
DEFAULT_CLIP_EPS = 1e-7


@dataclass(frozen=True)
class QuantileMap:
    """Fitted empirical-quantile-to-normal transform."""

    reference: np.ndarray
    clip_eps: float = DEFAULT_CLIP_EPS

    def __post_init__(self):
        ref = np.asarray(self.reference, dtype=np.float64)
        if ref.ndim != 1 or len(ref) < 2:
            raise ValueError("reference grid needs at least 2 values")
        if np.any(np.diff(ref) < 0):
            raise ValueError("reference grid must be sorted ascending")
        if not 0.0 < self.clip_eps < 0.5:
            raise ValueError("clip_eps must lie in (0, 0.5)")
        ref = ref.copy()
        ref.setflags(write=False)
        object.__setattr__(self, "reference", ref)

    @property
    def n_quantiles(self) -> int:
        return len(self.reference)

    @property
    def _probs(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, len(self.reference))


def fit_quantile_map(
    training: np.ndarray,
    n_quantiles: int = DEFAULT_N_QUANTILES,
    clip_eps: float = DEFAULT_CLIP_EPS,
) -> QuantileMap:
    """Fit the reference grid: min(n_quantiles, sample size) evenly spaced
    linear-interpolated order statistics of the training values."""
    x = np.asarray(training, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("training values must be one-dimensional")
    if not np.all(np.isfinite(x)):
        raise ValueError("training values must be finite")
    if len(x) < 2:
        raise TooFewSamples(f"need at least 2 values, got {len(x)}")
    if n_quantiles < 2:
        raise ValueError("n_quantiles must be >= 2")
    if x.max() == x.min():
        raise DegenerateDistribution("training data has zero-width support")
    m = min(n_quantiles, len(x))
    reference = np.quantile(x, np.linspace(0.0, 1.0, m))
    return QuantileMap(reference, clip_eps)


def transform_values(qmap: QuantileMap, xs: np.ndarray) -> np.ndarray:
    """Map values to normal deviates; monotone, clamped at clip_eps."""
    x = np.asarray(xs, dtype=np.float64)
    p = np.interp(x, qmap.reference, qmap._probs)
    np.clip(p, qmap.clip_eps, 1.0 - qmap.clip_eps, out=p)
    return normal_ppf_array(p)


def inverse_transform_values(qmap: QuantileMap, zs: np.ndarray) -> np.ndarray:
    """Exact inverse on the interior; deviates beyond the clip boundary
    clamp to the training minimum / maximum."""
    z = np.asarray(zs, dtype=np.float64)
    ref = qmap.reference
    out = np.empty(len(z), dtype=np.float64)
    lo_p, hi_p = qmap.clip_eps, 1.0 - qmap.clip_eps
    probs = qmap._probs
    for i, zi in enumerate(z):
        p = normal_cdf(float(zi))
        if p <= lo_p:
            out[i] = ref[0]
        elif p >= hi_p:
            out[i] = ref[-1]
        else:
            out[i] = np.interp(p, probs, ref)
    return out
