"""Benchmark harness for day-ahead electricity price forecasting."""

from ._kernels import BACKEND
from .data import HourlySeries, MarketDay, RawObservation
from .evaluation import (
    DmResult,
    ForecastRecord,
    LossSeries,
    compute_mae,
    compute_rmse,
    compute_smape,
    daily_l1_losses,
    dm_matrix,
    dm_test,
    metric_table,
    rolling_backtest,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DmResult",
    "ForecastRecord",
    "HourlySeries",
    "LossSeries",
    "MarketDay",
    "RawObservation",
    "__version__",
    "compute_mae",
    "compute_rmse",
    "compute_smape",
    "daily_l1_losses",
    "dm_matrix",
    "dm_test",
    "metric_table",
    "rolling_backtest",
]
