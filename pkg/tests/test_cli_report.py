import json
import sys
from datetime import date, datetime, timedelta, timezone
from pathlib import Path
from zoneinfo import ZoneInfo

import numpy as np
import pytest

from epfbench.cli import main
from epfbench.config import RunConfig, load_config
from epfbench.data import write_canonical
from epfbench.evaluation import DmMatrix, ForecastRecord
from epfbench.report import (
    dm_heatmap_svg,
    read_records_csv,
    write_records_csv,
)

from .conftest import CHILDREN, make_series


def write_raw_export(path: Path, n_days: int = 40,
                     start_local=datetime(2024, 1, 1)):
    tz = ZoneInfo("Europe/Berlin")
    cur = start_local.replace(tzinfo=tz).astimezone(timezone.utc)
    rng = np.random.default_rng(17)
    rows = ["MTU (CET/CEST);Day-ahead Price [EUR/MWh];Currency"]
    for _ in range(n_days * 24):
        loc = cur.astimezone(tz)
        nxt = (cur + timedelta(hours=1)).astimezone(tz)
        price = 50 + 10 * np.sin(2 * np.pi * loc.hour / 24) + rng.normal(0, 2)
        fmt = "%d.%m.%Y %H:%M"
        rows.append(f"{loc.strftime(fmt)} - {nxt.strftime(fmt)};{price:.2f};EUR")
        cur += timedelta(hours=1)
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")


@pytest.fixture
def data_dir(tmp_path):
    d = tmp_path / "data"
    d.mkdir()
    write_canonical(make_series(60, zone="DE-LU"), d / "DE-LU.csv")
    return d


def run_cli(*args) -> int:
    return main([str(a) for a in args])


def test_ingest_round_trip(tmp_path):
    raw = tmp_path / "raw.csv"
    write_raw_export(raw, n_days=10)
    code = run_cli("ingest", raw, "--zone", "DE-LU", "--output", tmp_path)
    assert code == 0
    out = tmp_path / "DE-LU.csv"
    assert out.exists()
    assert out.read_text().count("\n") == 10 * 24 + 1


def test_desk_run_artifact_counts(tmp_path, data_dir):
    out = tmp_path / "out"
    code = run_cli(
        "run", "--zones", "DE-LU", "--models", "Naive,SeasonalNaiveDay",
        "--test-start", "2024-02-10", "--test-end", "2024-02-16",
        "--train-days", "28", "--data-dir", data_dir, "--out-dir", out,
    )
    assert code == 0
    records = read_records_csv(out / "records.csv")
    assert len(records) == 14  # 7 days x 2 models
    metrics = (out / "metrics.csv").read_text().strip().splitlines()
    assert len(metrics) == 3  # header + 2 rows
    dm_lines = (out / "dm_DE-LU.csv").read_text().strip().splitlines()
    assert len(dm_lines) == 3
    cells = dm_lines[1].split(",")
    assert cells[1] == ""  # absent diagonal
    assert (out / "dm_DE-LU.svg").exists()
    assert (out / "run_meta.json").exists()


def test_missing_zone_data_exits_1(tmp_path, data_dir):
    code = run_cli(
        "run", "--zones", "DE-LU,AT", "--models", "Naive",
        "--test-start", "2024-02-10", "--test-end", "2024-02-11",
        "--train-days", "28", "--data-dir", data_dir,
        "--out-dir", tmp_path / "out",
    )
    assert code == 1
    assert not (tmp_path / "out" / "records.csv").exists()


def test_crashing_external_model_exits_2_but_keeps_natives(tmp_path, data_dir):
    out = tmp_path / "out"
    crash_cmd = f"{sys.executable} {CHILDREN / 'misbehaving_child.py'} crash-after-2"
    code = run_cli(
        "run", "--zones", "DE-LU",
        "--models", f"Naive\nexternal:name=flaky:{crash_cmd}",
        "--test-start", "2024-02-10", "--test-end", "2024-02-16",
        "--train-days", "28", "--data-dir", data_dir, "--out-dir", out,
    )
    assert code == 2
    metrics = (out / "metrics.csv").read_text()
    assert "Naive" in metrics
    records = read_records_csv(out / "records.csv")
    assert {r.model for r in records} == {"Naive"}


def test_echo_external_in_config_file(tmp_path, data_dir):
    out = tmp_path / "out"
    echo_cmd = f"{sys.executable} {CHILDREN / 'echo_child.py'}"
    cfg = tmp_path / "run.ini"
    cfg.write_text(
        "[run]\n"
        "zones = DE-LU\n"
        "models = SeasonalNaiveDay\n"
        f"    external:name=echo:{echo_cmd}\n"
        "test_start = 2024-02-10\n"
        "test_end = 2024-02-12\n"
        "train_days = 28\n"
        f"data_dir = {data_dir}\n"
        f"out_dir = {out}\n"
    )
    assert run_cli("run", "--config", cfg) == 0
    records = read_records_csv(out / "records.csv")
    native = [r for r in records if r.model == "SeasonalNaiveDay"]
    echo = [r for r in records if r.model == "echo"]
    assert len(native) == len(echo) == 3
    for a, b in zip(native, echo):
        assert np.array_equal(a.predictions, b.predictions)


def test_run_meta_replay_reproduces_artifacts(tmp_path, data_dir):
    out1 = tmp_path / "out1"
    assert run_cli(
        "run", "--zones", "DE-LU", "--models", "Naive,MSTL",
        "--test-start", "2024-02-10", "--test-end", "2024-02-12",
        "--train-days", "28", "--data-dir", data_dir, "--out-dir", out1,
    ) == 0
    meta = json.loads((out1 / "run_meta.json").read_text())
    out2 = tmp_path / "out2"
    meta["config"]["out_dir"] = str(out2)
    replay = tmp_path / "replay.json"
    replay.write_text(json.dumps(meta))
    assert run_cli("run", "--config", replay) == 0
    for name in ("records.csv", "metrics.csv", "dm_DE-LU.csv", "dm_DE-LU.svg"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_re_emission_is_stable(tmp_path, data_dir):
    out = tmp_path / "out"
    assert run_cli(
        "run", "--zones", "DE-LU", "--models", "Naive,SeasonalNaiveWeek",
        "--test-start", "2024-02-10", "--test-end", "2024-02-13",
        "--train-days", "28", "--data-dir", data_dir, "--out-dir", out,
    ) == 0
    before = {n: (out / n).read_bytes()
              for n in ("metrics.csv", "dm_DE-LU.csv", "dm_DE-LU.svg")}
    assert run_cli("report", "--records", out / "records.csv",
                   "--out-dir", out) == 0
    for name, content in before.items():
        assert (out / name).read_bytes() == content


def test_records_csv_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    records = [
        ForecastRecord("m1", "AT", date(2024, 5, 1) + timedelta(days=i),
                       rng.normal(40, 30, 24), rng.normal(40, 30, 24))
        for i in range(4)
    ]
    path = tmp_path / "records.csv"
    write_records_csv(records, path)
    back = read_records_csv(path)
    assert len(back) == 4
    for a, b in zip(records, back):
        assert a.model == b.model and a.target_date == b.target_date
        assert np.array_equal(a.predictions, b.predictions)
        assert np.array_equal(a.actuals, b.actuals)


def test_heatmap_svg_color_rules(tmp_path):
    p = np.array([[np.nan, 0.05, 0.5],
                  [0.95, np.nan, np.nan],
                  [0.5, 0.02, np.nan]])
    matrix = DmMatrix(("a", "b", "c"), "AT", p)
    path = tmp_path / "dm.svg"
    dm_heatmap_svg(matrix, path, threshold=0.1)
    svg = path.read_text()
    assert svg.count('fill="#000000"') == 3  # 0.5, 0.95, 0.5 above threshold
    assert svg.count('fill="#c8c8c8"') == 4  # diagonal + 1 degenerate pair
    assert "not significant" in svg
    # significant cells carry ramp colours, not black
    assert 'fill="#81879d"' not in svg  # sanity: nothing accidental
    for name in ("a", "b", "c"):
        assert f">{name}</text>" in svg


def test_heatmap_all_significant_has_no_black(tmp_path):
    p = np.array([[np.nan, 0.01], [0.09, np.nan]])
    matrix = DmMatrix(("x", "y"), "AT", p)
    dm_heatmap_svg(matrix, tmp_path / "dm.svg", threshold=0.1)
    svg = (tmp_path / "dm.svg").read_text()
    assert 'fill="#000000"' not in svg


def test_rank_markers_one_of_each(tmp_path, data_dir):
    out = tmp_path / "out"
    assert run_cli(
        "run", "--zones", "DE-LU",
        "--models", "Naive,SeasonalNaiveDay,SeasonalNaiveWeek",
        "--test-start", "2024-02-10", "--test-end", "2024-02-16",
        "--train-days", "28", "--data-dir", data_dir, "--out-dir", out,
    ) == 0
    lines = (out / "metrics.csv").read_text().strip().splitlines()[1:]
    mae_ranks = sorted(line.split(",")[7] for line in lines)
    assert mae_ranks == ["1", "2", "3"]


def test_config_file_parsing_and_overrides(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text(
        "[run]\n"
        "zones = DE-LU, AT\n"
        "models = Naive, MSTL\n"
        "test_start = 2024-01-01\n"
        "test_end = 2024-01-07\n"
        "train_days = 84\n"
        "jobs = 3\n"
        "transform_targets = false\n"
    )
    config = load_config(cfg)
    assert config.zones == ["DE-LU", "AT"]
    assert config.models == ["Naive", "MSTL"]
    assert config.jobs == 3
    assert config.transform_targets is False
    config.validate()


def test_config_validation_rejects_bad_values():
    with pytest.raises(ValueError):
        RunConfig(train_days=5).validate()
    with pytest.raises(ValueError):
        RunConfig(input_hours=100).validate()
    with pytest.raises(ValueError):
        RunConfig(test_start=date(2024, 2, 1),
                  test_end=date(2024, 1, 1)).validate()
    with pytest.raises(ValueError):
        RunConfig(models=[]).validate()


def test_unknown_model_spec_fails(tmp_path, data_dir):
    code = run_cli(
        "run", "--zones", "DE-LU", "--models", "Naive,NoSuchModel",
        "--test-start", "2024-02-10", "--test-end", "2024-02-11",
        "--train-days", "28", "--data-dir", data_dir,
        "--out-dir", tmp_path / "out",
    )
    assert code == 1
