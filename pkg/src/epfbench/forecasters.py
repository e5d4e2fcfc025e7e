"""Native forecasters: baselines and the decomposition pipeline.

The low-level operations accept either an HourlySeries (returning a
MarketDay for the day after the context ends) or a plain value array
(returning the 24 forecast values). Forecaster classes wrap them for
the rolling backtest.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import timedelta

import numpy as np

from .data import HOURS_PER_DAY, HourlySeries, MarketDay
from .decompose import StlConfig, mstl_decompose
from .errors import ContextTooShort, EmptyContext
from .ets import ets_forecast, ets_select_fit

HORIZON = 24


def _context_values(context):
    if isinstance(context, HourlySeries):
        return context.values, context.end_day + timedelta(days=1)
    return np.asarray(context, dtype=np.float64), None


def _package(values: np.ndarray, target_day):
    if target_day is None:
        return values
    return MarketDay(target_day, values)


def naive_forecast(context, horizon: int = HORIZON):
    """Repeat the last known value over the whole horizon."""
    values, target = _context_values(context)
    if len(values) == 0:
        raise EmptyContext("cannot forecast from an empty context")
    return _package(np.full(horizon, values[-1]), target)


def seasonal_naive_forecast(context, period: int, horizon: int = HORIZON):
    """Copy the value from one period earlier (24 = previous day,
    168 = same weekday one week back)."""
    values, target = _context_values(context)
    if period < 1:
        raise ValueError(f"period must be >= 1, got {period}")
    if len(values) < period:
        raise ContextTooShort(
            f"need at least {period} context hours, got {len(values)}"
        )
    n = len(values)
    out = np.array([values[n - period + (h % period)] for h in range(horizon)])
    return _package(out, target)


def mstl_forecast(
    context,
    horizon: int = HORIZON,
    periods: tuple[int, ...] = (24, 168),
    config: StlConfig | None = None,
):
    """Decompose, extrapolate each seasonal by repeating its final cycle,
    and forecast trend + remainder with the AICc-selected smoother."""
    values, target = _context_values(context)
    decomp = mstl_decompose(values, periods, config)
    n = len(values)

    seasonal_future = np.zeros(horizon)
    deseason = values.copy()
    for period, comp in decomp.seasonal.items():
        last_cycle = comp[n - period :]
        reps = -(-horizon // period)  # ceil
        seasonal_future += np.tile(last_cycle, reps)[:horizon]
        deseason = deseason - comp

    model = ets_select_fit(deseason)
    out = ets_forecast(model, horizon) + seasonal_future
    return _package(out, target)


class Forecaster:
    """Interface used by the rolling backtest: predict the 24 hours of
    the day immediately after the training window."""

    name: str = "?"

    def forecast(self, training: HourlySeries) -> np.ndarray:
        raise NotImplementedError


@dataclass
class NaiveForecaster(Forecaster):
    name: str = "Naive"

    def forecast(self, training: HourlySeries) -> np.ndarray:
        return naive_forecast(training.values)


@dataclass
class SeasonalNaiveForecaster(Forecaster):
    period: int = HOURS_PER_DAY
    name: str = "SeasonalNaiveDay"

    def forecast(self, training: HourlySeries) -> np.ndarray:
        return seasonal_naive_forecast(training.values, self.period)


@dataclass
class MstlForecaster(Forecaster):
    periods: tuple[int, ...] = (24, 168)
    config: StlConfig = field(default_factory=StlConfig)
    name: str = "MSTL"

    def forecast(self, training: HourlySeries) -> np.ndarray:
        return mstl_forecast(training.values, periods=self.periods, config=self.config)
