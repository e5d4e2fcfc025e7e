from datetime import date

import numpy as np
import pytest

from epfbench.data import MarketDay
from epfbench.errors import ContextTooShort, EmptyContext
from epfbench.forecasters import (
    MstlForecaster,
    NaiveForecaster,
    SeasonalNaiveForecaster,
    mstl_forecast,
    naive_forecast,
    seasonal_naive_forecast,
)

from .conftest import make_series


def test_naive_repeats_last_value():
    out = naive_forecast(np.array([1.0, 2.0, 42.0]))
    assert np.array_equal(out, np.full(24, 42.0))


def test_naive_handles_negative_prices():
    out = naive_forecast(np.array([10.0, -5.0]))
    assert np.array_equal(out, np.full(24, -5.0))


def test_naive_empty_context():
    with pytest.raises(EmptyContext):
        naive_forecast(np.array([]))


def test_naive_on_series_returns_market_day():
    series = make_series(3)
    out = naive_forecast(series)
    assert isinstance(out, MarketDay)
    assert out.date == date(2024, 1, 4)
    assert np.array_equal(out.hours, np.full(24, series.values[-1]))


def test_seasonal_naive_day_copies_last_day():
    context = np.arange(1.0, 169.0)  # one week: 1..168
    out = seasonal_naive_forecast(context, 24)
    assert np.array_equal(out, np.arange(145.0, 169.0))


def test_seasonal_naive_week_copies_lag_168():
    context = np.arange(1.0, 169.0)
    out = seasonal_naive_forecast(context, 168)
    assert np.array_equal(out, np.arange(1.0, 25.0))


def test_seasonal_naive_context_too_short():
    with pytest.raises(ContextTooShort):
        seasonal_naive_forecast(np.zeros(100), 168)


def test_seasonal_naive_day_equals_last_24_values():
    rng = np.random.default_rng(0)
    context = rng.normal(size=24 * 30)
    out = seasonal_naive_forecast(context, 24)
    assert np.array_equal(out, context[-24:])


def test_mstl_forecast_on_weekly_periodic_signal():
    t = np.arange(168.0)
    week = (
        50
        + 8 * np.sin(2 * np.pi * t / 24)
        + 5 * np.sin(2 * np.pi * t / 168)
        + 2 * np.sin(4 * np.pi * t / 168)
    )
    context = np.tile(week, 12)
    out = mstl_forecast(context)
    expected = week[:24]
    rel = np.abs(out - expected).max() / np.abs(expected).max()
    assert rel < 0.02


def test_mstl_forecast_constant_series():
    out = mstl_forecast(np.full(672, 9.25))
    assert np.abs(out - 9.25).max() < 1e-6


def test_mstl_forecast_contract_on_random_input():
    rng = np.random.default_rng(13)
    out = mstl_forecast(rng.normal(30, 10, 2016))
    assert out.shape == (24,)
    assert np.all(np.isfinite(out))


def test_mstl_forecast_shift_equivariance():
    series = make_series(28, noise=1.0).values
    base = mstl_forecast(series)
    shifted = mstl_forecast(series + 100.0)
    assert np.abs((shifted - 100.0) - base).max() < 1e-6


def test_forecaster_classes_produce_24_values(series_120d):
    training = series_120d
    for model in (
        NaiveForecaster(),
        SeasonalNaiveForecaster(24, "SeasonalNaiveDay"),
        SeasonalNaiveForecaster(168, "SeasonalNaiveWeek"),
        MstlForecaster(),
    ):
        out = model.forecast(training)
        assert out.shape == (24,)
        assert np.all(np.isfinite(out))
