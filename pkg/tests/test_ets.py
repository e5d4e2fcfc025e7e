import numpy as np
import pytest

from epfbench.errors import SeriesTooShort
from epfbench.ets import DAMPED, HOLT, SES, ets_forecast, ets_select_fit


def test_constant_series_forecasts_the_constant():
    series = np.full(50, 13.5)
    model = ets_select_fit(series)
    forecast = ets_forecast(model, 24)
    assert np.abs(forecast - 13.5).max() < 1e-9
    assert model.kind == SES  # AICc tie resolves to the smallest model


def test_linear_ramp_selects_trend_model_and_extends_it():
    series = 2.0 * np.arange(60)
    model = ets_select_fit(series)
    assert model.kind in (HOLT, DAMPED)
    forecast = ets_forecast(model, 24)
    expected = 2.0 * np.arange(60, 84)
    assert np.abs(forecast - expected).max() <= 0.01 * np.abs(expected).max()


def test_white_noise_mostly_selects_ses():
    rng = np.random.default_rng(77)
    wins = 0
    trials = 200
    for _ in range(trials):
        series = rng.standard_normal(100)
        if ets_select_fit(series).kind == SES:
            wins += 1
    assert wins >= 0.9 * trials


def test_fit_is_deterministic():
    rng = np.random.default_rng(3)
    series = rng.normal(10, 2, 120)
    a = ets_select_fit(series)
    b = ets_select_fit(series)
    assert a == b


def test_parameters_stay_in_open_intervals():
    rng = np.random.default_rng(4)
    for seed in range(5):
        series = np.cumsum(np.random.default_rng(seed).normal(0, 1, 80)) + 50
        model = ets_select_fit(series)
        assert 0.0 < model.alpha < 1.0
        assert np.isfinite(model.aicc)
        if model.beta is not None:
            assert 0.0 < model.beta < 1.0
        if model.phi is not None:
            assert 0.8 < model.phi < 0.99
    del rng


def test_short_series_rejected():
    with pytest.raises(SeriesTooShort):
        ets_select_fit(np.zeros(9))


def test_damped_forecast_levels_off():
    # a damped model's increments must shrink geometrically
    from epfbench.ets import EtsModel

    model = EtsModel(kind=DAMPED, alpha=0.5, beta=0.1, phi=0.9,
                     level=10.0, trend_state=1.0, aicc=0.0, sse=1.0)
    fc = ets_forecast(model, 5)
    inc = np.diff(fc)
    assert np.allclose(inc, [0.9**2, 0.9**3, 0.9**4, 0.9**5])
    assert fc[0] == pytest.approx(10.0 + 0.9)
