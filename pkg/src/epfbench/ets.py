"""Trend forecaster for the deseasonalized series: exponential smoothing
with the model kind chosen by small-sample-corrected AIC.

Three candidates are fitted by one-step-ahead SSE (simple smoothing,
linear trend, damped trend); smoothing parameters are optimized by
Nelder-Mead from a fixed 3-point grid start per parameter, so the whole
selection is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import ets_sse
from .errors import OptimizationFailed, SeriesTooShort

SES, HOLT, DAMPED = "SES", "Holt", "DampedHolt"
_KIND_ID = {SES: 0, HOLT: 1, DAMPED: 2}

_ALPHA_BOUNDS = (1e-4, 1.0 - 1e-4)
_BETA_BOUNDS = (1e-4, 1.0 - 1e-4)
_PHI_BOUNDS = (0.8, 0.99)
_ALPHA_STARTS = (0.1, 0.5, 0.9)
_BETA_STARTS = (0.1, 0.5, 0.9)
_PHI_STARTS = (0.83, 0.90, 0.97)

# floor keeps AICc finite when a model fits exactly (e.g. a pure ramp)
_SSE_FLOOR = 1e-12


@dataclass(frozen=True)
class EtsModel:
    kind: str
    alpha: float
    beta: float | None
    phi: float | None
    level: float
    trend_state: float | None
    aicc: float
    sse: float

    @property
    def n_params(self) -> int:
        # free smoothing parameters + initial states
        return {SES: 2, HOLT: 4, DAMPED: 5}[self.kind]


def _expit(x: float) -> float:
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _to_bounded(x: float, lo: float, hi: float) -> float:
    return lo + (hi - lo) * _expit(x)


def _from_bounded(p: float, lo: float, hi: float) -> float:
    return math.log((p - lo) / (hi - p))


def _nelder_mead(f, x0: np.ndarray, max_iter: int) -> tuple[np.ndarray, float]:
    """Deterministic Nelder-Mead with standard coefficients."""
    d = len(x0)
    pts = [np.array(x0, dtype=np.float64)]
    for i in range(d):
        p = pts[0].copy()
        p[i] += 0.25
        pts.append(p)
    vals = [f(p) for p in pts]

    for _ in range(max_iter):
        order = sorted(range(d + 1), key=lambda k: (vals[k], k))
        pts = [pts[k] for k in order]
        vals = [vals[k] for k in order]
        if vals[-1] - vals[0] <= 1e-10 * (1.0 + abs(vals[0])):
            break
        centroid = np.mean(pts[:-1], axis=0)
        reflected = centroid + (centroid - pts[-1])
        f_r = f(reflected)
        if f_r < vals[0]:
            expanded = centroid + 2.0 * (centroid - pts[-1])
            f_e = f(expanded)
            if f_e < f_r:
                pts[-1], vals[-1] = expanded, f_e
            else:
                pts[-1], vals[-1] = reflected, f_r
        elif f_r < vals[-2]:
            pts[-1], vals[-1] = reflected, f_r
        else:
            if f_r < vals[-1]:
                contracted = centroid + 0.5 * (reflected - centroid)
                f_c = f(contracted)
                better = f_c <= f_r
            else:
                contracted = centroid + 0.5 * (pts[-1] - centroid)
                f_c = f(contracted)
                better = f_c < vals[-1]
            if better:
                pts[-1], vals[-1] = contracted, f_c
            else:
                for i in range(1, d + 1):
                    pts[i] = pts[0] + 0.5 * (pts[i] - pts[0])
                    vals[i] = f(pts[i])
    order = sorted(range(d + 1), key=lambda k: (vals[k], k))
    return pts[order[0]], vals[order[0]]


def _aicc(sse: float, n: int, k: int) -> float:
    if n - k - 1 <= 0:
        return math.inf
    sse = max(sse, _SSE_FLOOR)
    return n * math.log(sse / n) + 2.0 * k * n / (n - k - 1)


def _fit_kind(y: np.ndarray, kind: str) -> EtsModel | None:
    kid = _KIND_ID[kind]
    if kind == SES:
        bounds = [_ALPHA_BOUNDS]
        start_grid = [(a,) for a in _ALPHA_STARTS]
    elif kind == HOLT:
        bounds = [_ALPHA_BOUNDS, _BETA_BOUNDS]
        start_grid = [(a, b) for a in _ALPHA_STARTS for b in _BETA_STARTS]
    else:
        bounds = [_ALPHA_BOUNDS, _BETA_BOUNDS, _PHI_BOUNDS]
        start_grid = [
            (a, b, p)
            for a in _ALPHA_STARTS
            for b in _BETA_STARTS
            for p in _PHI_STARTS
        ]

    def objective(x: np.ndarray) -> float:
        params = [_to_bounded(float(v), *bd) for v, bd in zip(x, bounds)]
        alpha = params[0]
        beta = params[1] if len(params) > 1 else 0.0
        phi = params[2] if len(params) > 2 else 1.0
        sse, _, _ = ets_sse(y, kid, alpha, beta, phi)
        return sse if math.isfinite(sse) else math.inf

    best_x: np.ndarray | None = None
    best_sse = math.inf
    for start in start_grid:
        x0 = np.array(
            [_from_bounded(p, *bd) for p, bd in zip(start, bounds)]
        )
        x, val = _nelder_mead(objective, x0, max_iter=200 * len(bounds))
        if val < best_sse:
            best_sse = val
            best_x = x
    if best_x is None or not math.isfinite(best_sse):
        return None

    params = [_to_bounded(float(v), *bd) for v, bd in zip(best_x, bounds)]
    alpha = params[0]
    beta = params[1] if len(params) > 1 else None
    phi = params[2] if len(params) > 2 else None
    sse, level, trend = ets_sse(
        y, kid, alpha, beta if beta is not None else 0.0,
        phi if phi is not None else 1.0,
    )
    n_err = len(y) - 1
    k = {SES: 2, HOLT: 4, DAMPED: 5}[kind]
    return EtsModel(
        kind=kind,
        alpha=alpha,
        beta=beta,
        phi=phi,
        level=level,
        trend_state=None if kind == SES else trend,
        aicc=_aicc(sse, n_err, k),
        sse=sse,
    )


def ets_select_fit(series: np.ndarray) -> EtsModel:
    """Fit all three kinds and return the one with the smallest AICc.

    Ties keep the earlier candidate in SES < Holt < DampedHolt order,
    which also means fewer parameters.
    """
    y = np.asarray(series, dtype=np.float64)
    if len(y) < 10:
        raise SeriesTooShort(f"need >= 10 points, got {len(y)}")
    best: EtsModel | None = None
    for kind in (SES, HOLT, DAMPED):
        model = _fit_kind(y, kind)
        if model is None or not math.isfinite(model.aicc):
            continue
        if best is None or model.aicc < best.aicc:
            best = model
    if best is None:
        raise OptimizationFailed("no smoothing model could be fitted")
    return best


def ets_forecast(model: EtsModel, horizon: int) -> np.ndarray:
    """Point forecast from the fitted states."""
    h = np.arange(1, horizon + 1, dtype=np.float64)
    if model.kind == SES:
        return np.full(horizon, model.level)
    if model.kind == HOLT:
        return model.level + h * model.trend_state
    damp = np.cumsum(model.phi ** h)
    return model.level + damp * model.trend_state
