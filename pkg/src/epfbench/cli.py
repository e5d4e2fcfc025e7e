"""Command-line entry points: ingest, run, dm, report.

Exit codes for `run`: 0 full success, 2 partial model failures,
1 configuration or data errors.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .adapter import ExternalModelForecaster
from .config import RunConfig, load_config
from .data import (
    normalize_dst,
    parse_entsoe_csv,
    read_canonical,
    write_canonical,
)
from .errors import BenchmarkError
from .evaluation import (
    ForecastRecord,
    daily_l1_losses,
    dm_matrix,
    metric_table,
    rolling_backtest,
)
from .forecasters import (
    Forecaster,
    MstlForecaster,
    NaiveForecaster,
    SeasonalNaiveForecaster,
)
from .ml import MlForecaster
from .report import (
    dm_heatmap_svg,
    read_records_csv,
    write_dm_csv,
    write_metrics_csv,
    write_records_csv,
)

NATIVE_MODELS = (
    "Naive",
    "SeasonalNaiveDay",
    "SeasonalNaiveWeek",
    "MSTL",
    "ElasticNet",
    "KNNRegressor",
    "SVR",
)


def build_forecaster(spec: str, config: RunConfig, index: int) -> Forecaster:
    """Instantiate a model from its spec string.

    Native names are listed in NATIVE_MODELS; anything else must be
    ``external:<command>`` or ``external:name=<label>:<command>``.
    """
    if spec == "Naive":
        return NaiveForecaster()
    if spec == "SeasonalNaiveDay":
        return SeasonalNaiveForecaster(period=24, name="SeasonalNaiveDay")
    if spec == "SeasonalNaiveWeek":
        return SeasonalNaiveForecaster(period=168, name="SeasonalNaiveWeek")
    if spec == "MSTL":
        return MstlForecaster()
    if spec == "ElasticNet":
        return MlForecaster(
            kind="elasticnet", name="ElasticNet",
            input_hours=config.input_hours,
            transform_targets=config.transform_targets,
        )
    if spec == "KNNRegressor":
        return MlForecaster(
            kind="knn", name="KNNRegressor",
            input_hours=config.input_hours,
            transform_targets=config.transform_targets,
        )
    if spec == "SVR":
        return MlForecaster(
            kind="svr", name="SVR",
            input_hours=config.input_hours,
            transform_targets=config.transform_targets,
        )
    if spec.startswith("external:"):
        rest = spec[len("external:"):]
        name = f"external{index}"
        if rest.startswith("name="):
            name, _, rest = rest[len("name="):].partition(":")
        return ExternalModelForecaster(
            command=shlex.split(rest),
            name=name,
            input_hours=config.input_hours,
            timeout=config.external_timeout,
        )
    raise ValueError(
        f"unknown model spec {spec!r}; native names: {', '.join(NATIVE_MODELS)}"
    )


def execute_run(config: RunConfig) -> int:
    """Ingest-check, backtest, metrics, comparison matrices, artifacts."""
    config.validate()
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    # data presence is checked for every zone before any model runs
    series_by_zone = {}
    for zone in config.zones:
        path = Path(config.data_dir) / f"{zone}.csv"
        if not path.exists():
            raise BenchmarkError(f"zone {zone}: canonical data missing at {path}")
        series_by_zone[zone] = read_canonical(path, zone)

    all_records: list[ForecastRecord] = []
    all_rows = []
    any_failures = False
    n_days = (config.test_end - config.test_start).days + 1

    for zone in config.zones:
        series = series_by_zone[zone]
        models = [
            build_forecaster(spec, config, i + 1)
            for i, spec in enumerate(config.models)
        ]
        result = rolling_backtest(
            series,
            models,
            config.test_start,
            config.test_end,
            train_days=config.train_days,
            input_hours=config.input_hours,
            jobs=config.jobs,
        )
        for failure in result.failures:
            any_failures = True
            print(
                f"warning: {failure.model}/{failure.zone}/{failure.target_date}: "
                f"{failure.reason}",
                file=sys.stderr,
            )
        all_records.extend(result.records)
        all_rows.extend(
            metric_table(
                result.records,
                model_order=list(result.model_names),
                expected_days=n_days,
            )
        )

        complete = result.complete_models()
        if len(complete) >= 2:
            losses = [
                daily_l1_losses(result.records_for(m)) for m in complete
            ]
            matrix = dm_matrix(losses)
            write_dm_csv(matrix, out_dir / f"dm_{zone}.csv")
            dm_heatmap_svg(
                matrix, out_dir / f"dm_{zone}.svg", config.dm_threshold
            )

    write_records_csv(all_records, out_dir / "records.csv")
    write_metrics_csv(all_rows, out_dir / "metrics.csv")
    meta = {
        "config": config.to_dict(),
        "versions": {
            "epfbench": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "kernel_backend": BACKEND,
        },
        "decisions": {
            "dm_variance": "plain sample variance, no HAC correction",
            "smape_zero_rule": "0/0 terms count as 0",
            "failed_forecast_policy": "excluded from metrics and DM alignment",
        },
        "started_at": datetime.now(timezone.utc).isoformat(),
    }
    (out_dir / "run_meta.json").write_text(
        json.dumps(meta, indent=2) + "\n", encoding="utf-8"
    )
    return 2 if any_failures else 0


def _cmd_ingest(args) -> int:
    report = parse_entsoe_csv(
        args.input,
        args.zone,
        ts_col=args.ts_col,
        price_col=args.price_col,
        tz=args.tz,
        delimiter=args.delimiter,
    )
    series = normalize_dst(report.observations)
    out = Path(args.output) if args.output else Path(f"{args.zone}.csv")
    if out.is_dir():
        out = out / f"{args.zone}.csv"
    write_canonical(series, out)
    print(
        f"{args.zone}: {series.n_days} days "
        f"[{series.start_day}..{series.end_day}] -> {out} "
        f"(dropped {report.dropped_empty} empty rows, "
        f"collapsed {report.collapsed_duplicates} duplicates)"
    )
    return 0


def _cmd_run(args) -> int:
    config = load_config(args.config) if args.config else RunConfig()
    overrides = {
        "zones": args.zones,
        "models": args.models,
        "test_start": args.test_start,
        "test_end": args.test_end,
        "train_days": args.train_days,
        "input_hours": args.input_hours,
        "data_dir": args.data_dir,
        "out_dir": args.out_dir,
        "seed": args.seed,
        "transform_targets": args.transform_targets,
        "jobs": args.jobs,
        "external_timeout": args.external_timeout,
        "dm_threshold": args.dm_threshold,
    }
    raw = {k: v for k, v in overrides.items() if v is not None}
    if raw:
        merged = config.to_dict()
        merged.update(raw)
        config = RunConfig.from_dict(merged)
    return execute_run(config)


def _regroup(records: list[ForecastRecord]):
    zones: dict[str, dict[str, list[ForecastRecord]]] = {}
    model_order: dict[str, list[str]] = {}
    for r in records:
        zone = zones.setdefault(r.zone, {})
        if r.model not in zone:
            zone[r.model] = []
            model_order.setdefault(r.zone, []).append(r.model)
        zone[r.model].append(r)
    return zones, model_order


def _cmd_dm(args) -> int:
    records = read_records_csv(args.records)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    zones, model_order = _regroup(records)
    for zone, by_model in zones.items():
        losses = [daily_l1_losses(by_model[m]) for m in model_order[zone]]
        if len(losses) < 2:
            print(f"warning: zone {zone}: fewer than 2 models", file=sys.stderr)
            continue
        matrix = dm_matrix(losses)
        write_dm_csv(matrix, out_dir / f"dm_{zone}.csv")
        dm_heatmap_svg(matrix, out_dir / f"dm_{zone}.svg", args.dm_threshold)
        print(f"dm_{zone}.csv / dm_{zone}.svg written to {out_dir}")
    return 0


def _cmd_report(args) -> int:
    records = read_records_csv(args.records)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    zones, model_order = _regroup(records)
    rows = []
    for zone in zones:
        zone_records = [r for r in records if r.zone == zone]
        rows.extend(metric_table(zone_records, model_order[zone]))
    write_metrics_csv(rows, out_dir / "metrics.csv")
    print(f"metrics.csv written to {out_dir}")
    return _cmd_dm(args)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epfbench",
        description="Day-ahead electricity price forecasting benchmark",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="raw export -> canonical format")
    p_ingest.add_argument("input", help="raw delimiter-separated export")
    p_ingest.add_argument("--zone", required=True, help="bidding zone code")
    p_ingest.add_argument("--output", help="canonical file or directory")
    p_ingest.add_argument("--ts-col", help="timestamp column name")
    p_ingest.add_argument("--price-col", help="price column name")
    p_ingest.add_argument("--tz", help="IANA time zone override")
    p_ingest.add_argument("--delimiter", help="field delimiter override")
    p_ingest.set_defaults(func=_cmd_ingest)

    p_run = sub.add_parser("run", help="full benchmark run")
    p_run.add_argument("--config", help="INI config or run_meta.json to replay")
    p_run.add_argument("--zones", help="comma-separated zone codes")
    p_run.add_argument("--models", help="comma-separated model specs")
    p_run.add_argument("--test-start", dest="test_start")
    p_run.add_argument("--test-end", dest="test_end")
    p_run.add_argument("--train-days", dest="train_days", type=int)
    p_run.add_argument("--input-hours", dest="input_hours", type=int)
    p_run.add_argument("--data-dir", dest="data_dir")
    p_run.add_argument("--out-dir", dest="out_dir")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument(
        "--transform-targets", dest="transform_targets",
        choices=("true", "false"),
    )
    p_run.add_argument("--jobs", type=int, help="parallel workers (default 1)")
    p_run.add_argument(
        "--external-timeout", dest="external_timeout", type=float
    )
    p_run.add_argument("--dm-threshold", dest="dm_threshold", type=float)
    p_run.set_defaults(func=_cmd_run)

    p_dm = sub.add_parser("dm", help="recompute DM matrices from records.csv")
    p_dm.add_argument("--records", required=True)
    p_dm.add_argument("--out-dir", dest="out_dir", default="out")
    p_dm.add_argument(
        "--dm-threshold", dest="dm_threshold", type=float, default=0.1
    )
    p_dm.set_defaults(func=_cmd_dm)

    p_report = sub.add_parser("report", help="re-emit tables and heatmaps")
    p_report.add_argument("--records", required=True)
    p_report.add_argument("--out-dir", dest="out_dir", default="out")
    p_report.add_argument(
        "--dm-threshold", dest="dm_threshold", type=float, default=0.1
    )
    p_report.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BenchmarkError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
