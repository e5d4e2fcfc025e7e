"""Rolling daily backtest, error metrics, and forecast comparison.

Metrics aggregate over every (day, hour) pair; model comparison reduces
each day's 24 hourly errors to one daily loss via the 1-norm and applies
a one-sided test of equal predictive accuracy on the loss differential.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import date, timedelta

import numpy as np

from .adapter import ExternalModelForecaster
from .data import HOURS_PER_DAY, HourlySeries, slice_window
from .errors import (
    AdapterError,
    DateMisaligned,
    DegenerateLosses,
    DuplicateDay,
    EmptyInput,
    LengthMismatch,
    MissingDay,
    OutOfRange,
)
from .forecasters import Forecaster
from .normal import normal_cdf  # noqa: F401  (part of this module's API)


@dataclass(frozen=True)
class ForecastRecord:
    """One (model, target day): 24 predictions aligned with 24 actuals."""

    model: str
    zone: str
    target_date: date
    predictions: np.ndarray
    actuals: np.ndarray

    def __post_init__(self):
        for name in ("predictions", "actuals"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.shape != (HOURS_PER_DAY,):
                raise ValueError(f"{name} must hold exactly 24 values")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite values")
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class LossSeries:
    """Per-day 1-norm losses for one model, date-aligned."""

    model: str
    zone: str
    dates: tuple[date, ...]
    daily_losses: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.daily_losses, dtype=np.float64)
        if len(arr) != len(self.dates):
            raise ValueError("losses and dates length mismatch")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "daily_losses", arr)


@dataclass(frozen=True)
class DmResult:
    model_x: str
    model_y: str
    n_days: int
    statistic: float
    p_value: float


def _stack_errors(records: list[ForecastRecord]) -> np.ndarray:
    if not records:
        raise EmptyInput("no forecast records")
    return np.stack([r.actuals - r.predictions for r in records])


def compute_mae(records: list[ForecastRecord]) -> float:
    """Mean absolute error over all 24 x len(records) pairs."""
    return float(np.mean(np.abs(_stack_errors(records))))


def compute_rmse(records: list[ForecastRecord]) -> float:
    """Root mean squared error over all pairs."""
    return float(np.sqrt(np.mean(_stack_errors(records) ** 2)))


def compute_smape(records: list[ForecastRecord]) -> float:
    """Symmetric MAPE in percent: |y-yhat| / (|y|+|yhat|), a 0/0 term
    counting as 0. No factor 2, so the result is bounded by 100."""
    if not records:
        raise EmptyInput("no forecast records")
    total = 0.0
    count = 0
    for r in records:
        num = np.abs(r.actuals - r.predictions)
        den = np.abs(r.actuals) + np.abs(r.predictions)
        terms = np.divide(num, den, out=np.zeros_like(num), where=den != 0.0)
        total += float(terms.sum())
        count += len(terms)
    return 100.0 * total / count


def daily_l1_losses(records: list[ForecastRecord]) -> LossSeries:
    """Sum of absolute hourly errors per day, date-ordered; the records
    must form one contiguous run of distinct days for one model."""
    if not records:
        raise EmptyInput("no forecast records")
    ordered = sorted(records, key=lambda r: r.target_date)
    dates = [r.target_date for r in ordered]
    for prev, cur in zip(dates, dates[1:]):
        if cur == prev:
            raise DuplicateDay(f"duplicate record for {cur}")
        if (cur - prev).days != 1:
            raise MissingDay(f"missing day(s) between {prev} and {cur}")
    losses = np.array(
        [float(np.abs(r.actuals - r.predictions).sum()) for r in ordered]
    )
    return LossSeries(ordered[0].model, ordered[0].zone, tuple(dates), losses)


def dm_test(loss_x: LossSeries, loss_y: LossSeries) -> DmResult:
    """One-sided test on the daily loss differential x - y.

    The statistic is sqrt(N) * mean(d) / sd(d) with the sample standard
    deviation; its CDF under the standard normal is the p-value, so a
    small p means model x is significantly more accurate than model y.
    """
    n = len(loss_x.daily_losses)
    if n != len(loss_y.daily_losses):
        raise LengthMismatch(
            f"{len(loss_x.daily_losses)} vs {len(loss_y.daily_losses)} days"
        )
    if n < 2:
        raise LengthMismatch(f"need at least 2 days, got {n}")
    if loss_x.dates != loss_y.dates:
        raise DateMisaligned(f"{loss_x.model} and {loss_y.model} dates differ")
    delta = loss_x.daily_losses - loss_y.daily_losses
    mean = float(np.mean(delta))
    sd = float(np.std(delta, ddof=1))
    if sd == 0.0:
        raise DegenerateLosses("zero-variance loss differential")
    statistic = math.sqrt(n) * mean / sd
    # route both signs through one complement so that swapping the
    # models yields exactly 1 - p (the complement of a float in [0.5, 1)
    # is exact, so the identity holds bit for bit in both directions)
    upper = 1.0 - normal_cdf(-abs(statistic))
    p_value = upper if statistic > 0.0 else 1.0 - upper
    return DmResult(loss_x.model, loss_y.model, n, statistic, p_value)


# --- rolling backtest ---------------------------------------------------------


@dataclass(frozen=True)
class FailureRecord:
    model: str
    zone: str
    target_date: date | None
    reason: str


@dataclass
class BacktestResult:
    zone: str
    test_days: tuple[date, ...]
    model_names: tuple[str, ...]
    records: list[ForecastRecord] = field(default_factory=list)
    failures: list[FailureRecord] = field(default_factory=list)
    aborted_models: set[str] = field(default_factory=set)

    def records_for(self, model: str) -> list[ForecastRecord]:
        return [r for r in self.records if r.model == model]

    def completeness(self, model: str) -> float:
        return len(self.records_for(model)) / len(self.test_days)

    def complete_models(self) -> list[str]:
        return [m for m in self.model_names if self.completeness(m) == 1.0]


_POOL_SERIES: HourlySeries | None = None
_POOL_MODELS: list[Forecaster] | None = None
_POOL_TRAIN_DAYS = 0


def _pool_init(series: HourlySeries, models: list[Forecaster], train_days: int):
    global _POOL_SERIES, _POOL_MODELS, _POOL_TRAIN_DAYS
    _POOL_SERIES = series
    _POOL_MODELS = models
    _POOL_TRAIN_DAYS = train_days


def _pool_task(task: tuple[int, date]):
    model_idx, day = task
    training = slice_window(
        _POOL_SERIES, day - timedelta(days=1), _POOL_TRAIN_DAYS
    )
    try:
        values = _POOL_MODELS[model_idx].forecast(training)
        return model_idx, day, np.asarray(values, dtype=np.float64), None
    except Exception as exc:  # per-(model, day) failure policy
        return model_idx, day, None, f"{type(exc).__name__}: {exc}"


def rolling_backtest(
    series: HourlySeries,
    models: list[Forecaster],
    test_start: date,
    test_end: date,
    train_days: int = 84,
    input_hours: int = 168,
    jobs: int = 1,
) -> BacktestResult:
    """Daily rolling-origin evaluation.

    For each target day, every model is given the train_days-long window
    ending the previous day (trainable models refit on it) and its 24
    forecasts are recorded against the day's actuals. Per-(model, day)
    failures are recorded and excluded; a fatal adapter error marks the
    whole external model's results absent. Data-coverage problems abort.
    """
    if test_end < test_start:
        raise OutOfRange(f"empty test span {test_start}..{test_end}")
    first_needed = test_start - timedelta(days=train_days)
    if not series.covers(first_needed, test_end):
        raise OutOfRange(
            f"series covers [{series.start_day}, {series.end_day}], "
            f"need [{first_needed}, {test_end}]"
        )
    if input_hours > train_days * HOURS_PER_DAY:
        raise OutOfRange("input_hours exceeds the training window")

    n_days = (test_end - test_start).days + 1
    days = [test_start + timedelta(days=i) for i in range(n_days)]
    result = BacktestResult(
        zone=series.zone,
        test_days=tuple(days),
        model_names=tuple(m.name for m in models),
    )

    native = [
        (i, m) for i, m in enumerate(models)
        if not isinstance(m, ExternalModelForecaster)
    ]
    external = [
        (i, m) for i, m in enumerate(models)
        if isinstance(m, ExternalModelForecaster)
    ]

    outcome: dict[tuple[int, date], tuple[np.ndarray | None, str | None]] = {}

    if jobs > 1 and native:
        tasks = [(i, day) for i, _ in native for day in days]
        with ProcessPoolExecutor(
            max_workers=jobs,
            initializer=_pool_init,
            initargs=(series, models, train_days),
        ) as pool:
            for model_idx, day, values, err in pool.map(
                _pool_task, tasks, chunksize=8
            ):
                outcome[(model_idx, day)] = (values, err)
    else:
        _pool_init(series, models, train_days)
        for i, _ in native:
            for day in days:
                model_idx, day, values, err = _pool_task((i, day))
                outcome[(model_idx, day)] = (values, err)

    for i, model in external:
        try:
            with model:
                for day in days:
                    training = slice_window(
                        series, day - timedelta(days=1), train_days
                    )
                    try:
                        values = model.forecast(training)
                        outcome[(i, day)] = (values, None)
                    except AdapterError:
                        raise
                    except Exception as exc:
                        outcome[(i, day)] = (
                            None, f"{type(exc).__name__}: {exc}"
                        )
        except AdapterError as exc:
            # fatal: the model's results are absent, including earlier days
            for day in days:
                outcome[(i, day)] = (None, f"{type(exc).__name__}: {exc}")
            result.aborted_models.add(model.name)

    for i, model in enumerate(models):
        for day in days:
            values, err = outcome[(i, day)]
            if values is None:
                result.failures.append(
                    FailureRecord(model.name, series.zone, day, err or "failed")
                )
                continue
            try:
                record = ForecastRecord(
                    model=model.name,
                    zone=series.zone,
                    target_date=day,
                    predictions=values,
                    actuals=series.day_values(day),
                )
            except ValueError as exc:
                result.failures.append(
                    FailureRecord(model.name, series.zone, day, str(exc))
                )
                continue
            result.records.append(record)
    return result


# --- aggregation ----------------------------------------------------------------


@dataclass(frozen=True)
class MetricRow:
    model: str
    zone: str
    mae: float
    rmse: float
    smape: float
    n_days: int
    completeness: float
    ranks: dict[str, int | None] = field(default_factory=dict)


def metric_table(
    records: list[ForecastRecord],
    model_order: list[str] | None = None,
    expected_days: int | None = None,
) -> list[MetricRow]:
    """One row per (model, zone) with rank annotations 1/2/3 for the
    three smallest values per (zone, metric)."""
    groups: dict[tuple[str, str], list[ForecastRecord]] = {}
    order: list[tuple[str, str]] = []
    for r in records:
        key = (r.model, r.zone)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(r)
    if model_order:
        order.sort(
            key=lambda k: (k[1], model_order.index(k[0])
                           if k[0] in model_order else len(model_order))
        )

    rows = []
    for model, zone in order:
        recs = groups[(model, zone)]
        n_days = len(recs)
        expected = expected_days if expected_days is not None else n_days
        rows.append(
            MetricRow(
                model=model,
                zone=zone,
                mae=compute_mae(recs),
                rmse=compute_rmse(recs),
                smape=compute_smape(recs),
                n_days=n_days,
                completeness=n_days / expected if expected else 0.0,
                ranks={},
            )
        )

    zones = {row.zone for row in rows}
    for zone in zones:
        zone_rows = [row for row in rows if row.zone == zone]
        for metric in ("mae", "rmse", "smape"):
            ordered = sorted(
                range(len(zone_rows)), key=lambda i: getattr(zone_rows[i], metric)
            )
            for pos, i in enumerate(ordered, start=1):
                zone_rows[i].ranks[metric] = pos if pos <= 3 else None
    return rows


@dataclass(frozen=True)
class DmMatrix:
    models: tuple[str, ...]
    zone: str
    p_values: np.ndarray  # (m, m), NaN marks absent entries

    def entry(self, x: str, y: str) -> float:
        return float(
            self.p_values[self.models.index(x), self.models.index(y)]
        )


def dm_matrix(losses: list[LossSeries]) -> DmMatrix:
    """Pairwise p-values: entry (x, y) tests whether model x's forecasts
    are significantly more accurate than model y's. Diagonal and
    degenerate pairs are absent (NaN)."""
    if len(losses) < 2:
        raise EmptyInput("need at least 2 models for a comparison matrix")
    m = len(losses)
    p = np.full((m, m), np.nan)
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            try:
                p[i, j] = dm_test(losses[i], losses[j]).p_value
            except DegenerateLosses:
                pass
    return DmMatrix(tuple(ls.model for ls in losses), losses[0].zone, p)
