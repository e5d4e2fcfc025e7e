"""Seasonal-trend decomposition by loess, single- and multi-period.

The multi-period variant strips one seasonality at a time in ascending
period order, refining each component over repeated sweeps; the final
trend and remainder come from the last single-period pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import loess_smooth
from .errors import InvalidWindow, SeriesTooShort


@dataclass(frozen=True)
class StlDecomposition:
    """Additive decomposition: input = trend + sum(seasonal) + remainder."""

    trend: np.ndarray
    seasonal: dict[int, np.ndarray]
    remainder: np.ndarray
    periods: tuple[int, ...]

    def reconstruct(self) -> np.ndarray:
        total = self.trend + self.remainder
        for comp in self.seasonal.values():
            total = total + comp
        return total


@dataclass(frozen=True)
class StlConfig:
    """Smoothing windows and iteration counts for the decomposition."""

    seasonal_window: int = 13
    trend_window: int | None = None  # derived from the period when None
    inner_iters: int = 2
    robust_iters: int = 0
    sweeps: int = 2  # multi-period refinement passes

    def trend_window_for(self, period: int) -> int:
        if self.trend_window is not None:
            return self.trend_window
        # classical recommendation: smallest odd integer >=
        # 1.5 * period / (1 - 1.5 / seasonal_window)
        raw = 1.5 * period / (1.0 - 1.5 / self.seasonal_window)
        win = int(np.ceil(raw))
        if win % 2 == 0:
            win += 1
        return max(win, 3)


def _check_window(win: int, name: str) -> None:
    if win < 3 or win % 2 == 0:
        raise InvalidWindow(f"{name} must be an odd integer >= 3, got {win}")


def moving_average(x: np.ndarray, k: int) -> np.ndarray:
    """Simple moving average; output has len(x) - k + 1 entries."""
    c = np.concatenate(([0.0], np.cumsum(x)))
    return (c[k:] - c[:-k]) / k


def stl_decompose(
    series: np.ndarray,
    period: int,
    seasonal_window: int = 13,
    trend_window: int | None = None,
    inner_iters: int = 2,
    robust_iters: int = 0,
) -> StlDecomposition:
    """Classic seasonal-trend decomposition at a single period.

    Each inner pass smooths the cycle sub-series of the detrended data
    (extending one cycle at both ends), removes the low-pass component
    (moving averages of length period, period, 3), and re-estimates the
    trend by loess on the deseasonalized series. Optional outer passes
    downweight outliers with bisquare robustness weights.
    """
    y = np.asarray(series, dtype=np.float64)
    n = len(y)
    if period < 2:
        raise InvalidWindow(f"period must be >= 2, got {period}")
    if n < 2 * period:
        raise SeriesTooShort(f"need >= {2 * period} points for period {period}, got {n}")
    _check_window(seasonal_window, "seasonal_window")
    cfg = StlConfig(seasonal_window, trend_window)
    t_win = cfg.trend_window_for(period)
    _check_window(t_win, "trend_window")

    trend = np.zeros(n)
    seasonal = np.zeros(n)
    rho: np.ndarray | None = None
    for outer in range(robust_iters + 1):
        for _ in range(inner_iters):
            detrended = y - trend
            extended = np.empty(n + 2 * period)
            for p0 in range(period):
                sub = detrended[p0::period]
                sub_rho = rho[p0::period] if rho is not None else None
                extended[p0::period] = loess_smooth(
                    sub, seasonal_window, sub_rho, extend=True
                )
            low_pass = moving_average(
                moving_average(moving_average(extended, period), period), 3
            )
            seasonal = extended[period : period + n] - low_pass
            trend = loess_smooth(y - seasonal, t_win, rho)
        if outer < robust_iters:
            resid = y - trend - seasonal
            scale = 6.0 * np.median(np.abs(resid))
            if scale <= 0.0:
                rho = np.ones(n)
            else:
                u = np.clip(np.abs(resid) / scale, 0.0, 1.0)
                rho = (1.0 - u * u) ** 2

    remainder = y - trend - seasonal
    return StlDecomposition(trend, {period: seasonal}, remainder, (period,))


def mstl_decompose(
    series: np.ndarray,
    periods: tuple[int, ...] = (24, 168),
    config: StlConfig | None = None,
) -> StlDecomposition:
    """Multi-period decomposition by repeated single-period passes.

    For each sweep and each period (ascending), the period's current
    seasonal estimate is added back to the deseasonalized series, the
    single-period decomposition re-extracts it, and it is subtracted
    again. Trend and remainder come from the final pass.
    """
    cfg = config or StlConfig()
    y = np.asarray(series, dtype=np.float64)
    periods = tuple(int(p) for p in periods)
    if not periods or list(periods) != sorted(set(periods)):
        raise InvalidWindow(f"periods must be strictly ascending, got {periods}")
    if len(y) < 2 * max(periods):
        raise SeriesTooShort(
            f"need >= {2 * max(periods)} points for periods {periods}, got {len(y)}"
        )

    seasonal = {p: np.zeros(len(y)) for p in periods}
    deseas = y.copy()
    last: StlDecomposition | None = None
    for _ in range(cfg.sweeps):
        for p in periods:
            deseas = deseas + seasonal[p]
            last = stl_decompose(
                deseas,
                p,
                seasonal_window=cfg.seasonal_window,
                trend_window=cfg.trend_window,
                inner_iters=cfg.inner_iters,
                robust_iters=cfg.robust_iters,
            )
            seasonal[p] = last.seasonal[p]
            deseas = deseas - seasonal[p]

    assert last is not None
    remainder = y - last.trend
    for comp in seasonal.values():
        remainder = remainder - comp
    return StlDecomposition(last.trend, seasonal, remainder, periods)
