"""Windowed supervised forecasters: elastic net, k-nearest-neighbours,
and epsilon-SVR, all trained in quantile-transformed space on one-week
inputs with one-day targets (one independent model per target hour for
the linear and kernel models).
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np

from ._kernels import enet_cd, svr_smo
from .data import HOURS_PER_DAY, HourlySeries, MarketDay
from .errors import DidNotConverge, TooFewSamples, TooShort
from .forecasters import Forecaster
from .transforms import (
    DEFAULT_N_QUANTILES,
    fit_quantile_map,
    inverse_transform_values,
    transform_values,
)

L1_RATIO_GRID = (0.1, 0.5, 0.7, 0.9, 0.95, 0.99, 1.0)
N_ALPHAS = 100
ALPHA_DECADES = 4.0
CV_FOLDS = 7
CD_TOL = 1e-6
CD_MAX_SWEEPS = 10_000
# grid-scoring fits are work-bounded: overlapping daily windows create
# near-duplicate columns, so coordinates wander in flat valleys for
# thousands of sweeps after the objective (and the validation ranking)
# has converged; CV fits therefore also stop on an objective plateau
CV_SWEEP_CAP = 1_000
CV_OBJ_TOL = 1e-7


@dataclass(frozen=True)
class WindowDataset:
    """Daily-stride supervised samples: each input row is the
    input_hours immediately preceding its target day."""

    inputs: np.ndarray
    targets: np.ndarray
    sample_days: tuple[date, ...]

    def __post_init__(self):
        inputs = np.ascontiguousarray(self.inputs, dtype=np.float64)
        targets = np.ascontiguousarray(self.targets, dtype=np.float64)
        if inputs.ndim != 2 or targets.ndim != 2:
            raise ValueError("inputs and targets must be 2-D")
        if inputs.shape[0] != targets.shape[0]:
            raise ValueError("inputs and targets row counts differ")
        if targets.shape[1] != HOURS_PER_DAY:
            raise ValueError("targets must have 24 columns")
        if len(self.sample_days) != inputs.shape[0]:
            raise ValueError("sample_days length mismatch")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)

    @property
    def n_samples(self) -> int:
        return self.inputs.shape[0]


def build_windows(
    series_values, start_day: date | None = None, input_hours: int = 168
) -> WindowDataset:
    """One sample per day: input = preceding input_hours, target = the day.

    Accepts an HourlySeries or a plain array (then start_day is required
    only if real dates matter; a synthetic epoch is used otherwise).
    """
    if isinstance(series_values, HourlySeries):
        values = series_values.values
        start_day = series_values.start_day
    else:
        values = np.asarray(series_values, dtype=np.float64)
        if start_day is None:
            start_day = date(2000, 1, 3)
    if input_hours % HOURS_PER_DAY != 0 or input_hours < HOURS_PER_DAY:
        raise ValueError("input_hours must be a positive multiple of 24")
    input_days = input_hours // HOURS_PER_DAY
    n_days = len(values) // HOURS_PER_DAY
    n_samples = n_days - input_days
    if n_samples < 1:
        raise TooShort(
            f"need more than {input_days} days to build windows, got {n_days}"
        )
    inputs = np.empty((n_samples, input_hours))
    targets = np.empty((n_samples, HOURS_PER_DAY))
    days = []
    for s in range(n_samples):
        t0 = (s + input_days) * HOURS_PER_DAY
        inputs[s] = values[t0 - input_hours : t0]
        targets[s] = values[t0 : t0 + HOURS_PER_DAY]
        days.append(start_day + timedelta(days=s + input_days))
    return WindowDataset(inputs, targets, tuple(days))


# --- elastic net --------------------------------------------------------------


@dataclass(frozen=True)
class ElasticNetModel:
    """Per-target-hour linear models with shared regularization."""

    weights: np.ndarray  # (24, n_features)
    intercepts: np.ndarray  # (24,)
    alpha: float
    l1_ratio: float

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.weights @ np.asarray(x, dtype=np.float64) + self.intercepts


def elasticnet_objective(
    x: np.ndarray, y: np.ndarray, w: np.ndarray, b: float,
    alpha: float, l1_ratio: float,
) -> float:
    """The solver's objective; shared with the test oracles."""
    n = len(y)
    resid = y - x @ w - b
    return (
        float(resid @ resid) / (2 * n)
        + alpha * l1_ratio * float(np.abs(w).sum())
        + alpha * (1 - l1_ratio) / 2 * float(w @ w)
    )


def elasticnet_fit_single(
    x: np.ndarray,
    y: np.ndarray,
    alpha: float,
    l1_ratio: float,
    w0: np.ndarray | None = None,
    max_sweeps: int = CD_MAX_SWEEPS,
    tol: float = CD_TOL,
) -> tuple[np.ndarray, float]:
    """Coordinate descent for one target; returns (weights, intercept)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    x_mean = x.mean(axis=0)
    y_mean = float(y.mean())
    xc_t = np.ascontiguousarray((x - x_mean).T)
    yc = y - y_mean
    if w0 is None:
        w0 = np.zeros(x.shape[1])
    w, sweeps, max_delta = enet_cd(
        xc_t, yc, alpha * l1_ratio, alpha * (1.0 - l1_ratio),
        w0, max_sweeps, tol,
    )
    if max_delta >= tol:
        raise DidNotConverge(
            f"coordinate descent hit {sweeps} sweeps with update {max_delta:.2e}"
        )
    intercept = y_mean - float(x_mean @ w)
    return w, intercept


def elasticnet_fit(
    data: WindowDataset, alpha: float, l1_ratio: float
) -> ElasticNetModel:
    """Fit the 24 per-hour models at fixed regularization."""
    p = data.inputs.shape[1]
    weights = np.empty((HOURS_PER_DAY, p))
    intercepts = np.empty(HOURS_PER_DAY)
    for h in range(HOURS_PER_DAY):
        weights[h], intercepts[h] = elasticnet_fit_single(
            data.inputs, data.targets[:, h], alpha, l1_ratio
        )
    return ElasticNetModel(weights, intercepts, alpha, l1_ratio)


def _alpha_path(x: np.ndarray, y_all: np.ndarray, l1_ratio: float) -> np.ndarray:
    """Descending 100-point log path from the full-shrinkage threshold
    down four decades (threshold from centred data, max across hours)."""
    xc = x - x.mean(axis=0)
    yc = y_all - y_all.mean(axis=0)
    amax = float(np.max(np.abs(xc.T @ yc))) / (len(x) * l1_ratio)
    amax = max(amax, 1e-12)
    return np.logspace(np.log10(amax), np.log10(amax) - ALPHA_DECADES, N_ALPHAS)


def elasticnet_cv_select(data: WindowDataset) -> ElasticNetModel:
    """Grid search over l1_ratio x alpha path with seven sequential
    one-day validation folds (each trained on all strictly earlier
    samples); refits the winner on every sample."""
    s = data.n_samples
    if s < 2 * CV_FOLDS:
        raise TooFewSamples(f"need >= {2 * CV_FOLDS} samples for CV, got {s}")
    x, y_all = data.inputs, data.targets

    best = None  # (mse, l1_ratio, alpha)
    for ratio in L1_RATIO_GRID:
        alphas = _alpha_path(x, y_all, ratio)
        sq_err = np.zeros(N_ALPHAS)
        for fold in range(CV_FOLDS):
            split = s - CV_FOLDS + fold
            x_tr, y_tr = x[:split], y_all[:split]
            x_val, y_val = x[split], y_all[split]
            x_mean = x_tr.mean(axis=0)
            xc_t = np.ascontiguousarray((x_tr - x_mean).T)
            for h in range(HOURS_PER_DAY):
                y_h = y_tr[:, h]
                y_mean = float(y_h.mean())
                yc = y_h - y_mean
                w = np.zeros(x.shape[1])
                for a_idx, alpha in enumerate(alphas):
                    w, _, _ = enet_cd(
                        xc_t, yc, alpha * ratio, alpha * (1.0 - ratio),
                        w, CV_SWEEP_CAP, CD_TOL, CV_OBJ_TOL,
                    )
                    pred = float((x_val - x_mean) @ w) + y_mean
                    sq_err[a_idx] += (pred - y_val[h]) ** 2
        mse = sq_err / (CV_FOLDS * HOURS_PER_DAY)
        for a_idx, alpha in enumerate(alphas):
            if best is None or mse[a_idx] < best[0]:
                best = (mse[a_idx], ratio, alpha)

    assert best is not None
    _, ratio, alpha = best
    # warm path down to the winner keeps the refit fast and deterministic
    alphas = _alpha_path(x, y_all, ratio)
    p = x.shape[1]
    weights = np.empty((HOURS_PER_DAY, p))
    intercepts = np.empty(HOURS_PER_DAY)
    x_mean = x.mean(axis=0)
    xc_t = np.ascontiguousarray((x - x_mean).T)
    for h in range(HOURS_PER_DAY):
        y_h = y_all[:, h]
        y_mean = float(y_h.mean())
        yc = y_h - y_mean
        w = np.zeros(p)
        for a in alphas:  # warm path down to the winner, work-bounded
            if a <= alpha:
                break
            w, _, _ = enet_cd(
                xc_t, yc, a * ratio, a * (1.0 - ratio),
                w, CV_SWEEP_CAP, CD_TOL, CV_OBJ_TOL,
            )
        w, _, _ = enet_cd(
            xc_t, yc, alpha * ratio, alpha * (1.0 - ratio),
            w, CD_MAX_SWEEPS, CD_TOL,
        )
        weights[h] = w
        intercepts[h] = y_mean - float(x_mean @ w)
    return ElasticNetModel(weights, intercepts, alpha, ratio)


# --- k-nearest-neighbours ------------------------------------------------------


@dataclass(frozen=True)
class KnnModel:
    stored: WindowDataset
    k: int

    def __post_init__(self):
        if not 1 <= self.k <= self.stored.n_samples:
            raise ValueError(
                f"k={self.k} outside [1, {self.stored.n_samples}]"
            )


def knn_fit(data: WindowDataset, k: int = 5) -> KnnModel:
    return KnnModel(data, min(k, data.n_samples))


def knn_forecast(model: KnnModel, query: np.ndarray) -> np.ndarray:
    """Unweighted mean of the k nearest stored targets (Euclidean);
    distance ties resolve to the lower sample index."""
    q = np.asarray(query, dtype=np.float64)
    diffs = model.stored.inputs - q
    dist_sq = np.einsum("ij,ij->i", diffs, diffs)
    order = np.argsort(dist_sq, kind="stable")[: model.k]
    return model.stored.targets[order].mean(axis=0)


# --- epsilon-SVR ---------------------------------------------------------------


@dataclass(frozen=True)
class SvrModel:
    inputs: np.ndarray
    dual_coefs: np.ndarray  # (24, n_samples), alpha - alpha* per sample
    biases: np.ndarray  # (24,)
    c: float
    epsilon: float
    gamma: float

    def predict(self, x: np.ndarray) -> np.ndarray:
        k_vec = _rbf_vector(self.inputs, np.asarray(x, dtype=np.float64), self.gamma)
        return self.dual_coefs @ k_vec + self.biases


def _rbf_matrix(x: np.ndarray, gamma: float) -> np.ndarray:
    sq = np.einsum("ij,ij->i", x, x)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.clip(d2, 0.0, None, out=d2)
    return np.exp(-gamma * d2)


def _rbf_vector(x: np.ndarray, q: np.ndarray, gamma: float) -> np.ndarray:
    diff = x - q
    return np.exp(-gamma * np.einsum("ij,ij->i", diff, diff))


def svr_dual_objective(
    kmat: np.ndarray, y: np.ndarray, beta: np.ndarray, epsilon: float
) -> float:
    """Dual objective in beta = alpha - alpha* form (to maximize);
    shared with the brute-force test oracle."""
    return float(y @ beta - 0.5 * beta @ kmat @ beta - epsilon * np.abs(beta).sum())


def svr_fit(
    data: WindowDataset,
    c: float = 1.0,
    epsilon: float = 0.1,
    gamma: float | None = None,
    tol: float = 1e-3,
    max_iter: int | None = None,
) -> SvrModel:
    """Solve the per-hour epsilon-SVR duals with the RBF kernel."""
    if data.n_samples < 2:
        raise TooFewSamples("SVR needs at least 2 samples")
    if c <= 0 or epsilon < 0:
        raise ValueError("need C > 0 and epsilon >= 0")
    x = data.inputs
    if gamma is None:
        var = float(x.var())
        gamma = 1.0 / (x.shape[1] * var) if var > 0 else 1.0
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if max_iter is None:
        max_iter = 100 * data.n_samples**2
    kmat = _rbf_matrix(x, gamma)
    duals = np.empty((HOURS_PER_DAY, data.n_samples))
    biases = np.empty(HOURS_PER_DAY)
    for h in range(HOURS_PER_DAY):
        beta, bias, _, violation = svr_smo(
            kmat, data.targets[:, h], c, epsilon, tol, max_iter
        )
        if violation >= tol:
            raise DidNotConverge(
                f"SVR hour {h}: KKT violation {violation:.2e} after cap"
            )
        duals[h] = beta
        biases[h] = bias
    return SvrModel(x.copy(), duals, biases, c, epsilon, gamma)


# --- daily pipeline -------------------------------------------------------------


ML_KINDS = ("elasticnet", "knn", "svr")


def ml_forecast_pipeline(
    kind: str,
    training,
    *,
    input_hours: int = 168,
    transform_targets: bool = True,
    n_quantiles: int = DEFAULT_N_QUANTILES,
    knn_k: int = 5,
    svr_c: float = 1.0,
    svr_epsilon: float = 0.1,
):
    """Transform, window, fit, predict the next day, map back to prices.

    The quantile map is fitted on the training window only; the forecast
    context is the final input_hours of that window.
    """
    if kind not in ML_KINDS:
        raise ValueError(f"unknown ML forecaster kind {kind!r}")
    if isinstance(training, HourlySeries):
        values = training.values
        target_day = training.end_day + timedelta(days=1)
    else:
        values = np.asarray(training, dtype=np.float64)
        target_day = None

    qmap = fit_quantile_map(values, n_quantiles)
    tvals = transform_values(qmap, values)
    windows = build_windows(tvals, input_hours=input_hours)
    if not transform_targets:
        raw_windows = build_windows(values, input_hours=input_hours)
        windows = WindowDataset(
            windows.inputs, raw_windows.targets, windows.sample_days
        )
    query = tvals[-input_hours:]

    if kind == "elasticnet":
        model = elasticnet_cv_select(windows)
        pred = model.predict(query)
    elif kind == "knn":
        pred = knn_forecast(knn_fit(windows, knn_k), query)
    else:
        svr = svr_fit(windows, c=svr_c, epsilon=svr_epsilon)
        pred = svr.predict(query)

    prices = inverse_transform_values(qmap, pred) if transform_targets else pred
    if target_day is None:
        return prices
    return MarketDay(target_day, prices)


@dataclass
class MlForecaster(Forecaster):
    kind: str = "elasticnet"
    name: str = "ElasticNet"
    input_hours: int = 168
    transform_targets: bool = True
    knn_k: int = 5
    svr_c: float = 1.0
    svr_epsilon: float = 0.1

    def forecast(self, training: HourlySeries) -> np.ndarray:
        return ml_forecast_pipeline(
            self.kind,
            training.values,
            input_hours=self.input_hours,
            transform_targets=self.transform_targets,
            knn_k=self.knn_k,
            svr_c=self.svr_c,
            svr_epsilon=self.svr_epsilon,
        )
