"""Run configuration: one declarative file, flags override values.

The file is an INI with a single [run] section (models may span
multiple lines). A previously written run_meta.json can be loaded the
same way, which replays the run it describes.
"""

from __future__ import annotations

import configparser
import json
import os
from dataclasses import dataclass, field, fields
from datetime import date
from pathlib import Path

from .data import HOURS_PER_DAY


def _default_data_dir() -> Path:
    return Path(os.environ.get("EPFBENCH_DATA_DIR", "data"))


@dataclass
class RunConfig:
    zones: list[str] = field(default_factory=lambda: ["DE-LU"])
    models: list[str] = field(
        default_factory=lambda: ["Naive", "SeasonalNaiveDay", "SeasonalNaiveWeek"]
    )
    test_start: date = date(2024, 1, 1)
    test_end: date = date(2024, 12, 31)
    train_days: int = 84
    input_hours: int = 168
    data_dir: Path = field(default_factory=_default_data_dir)
    out_dir: Path = Path("out")
    seed: int = 0
    transform_targets: bool = True
    jobs: int = field(default_factory=lambda: os.cpu_count() or 1)
    external_timeout: float = 60.0
    dm_threshold: float = 0.1

    def validate(self) -> None:
        if not self.zones:
            raise ValueError("at least one zone is required")
        if not self.models:
            raise ValueError("at least one model is required")
        if self.test_end < self.test_start:
            raise ValueError(
                f"empty test span {self.test_start}..{self.test_end}"
            )
        if self.train_days < 8:
            raise ValueError(f"train_days must be >= 8, got {self.train_days}")
        if self.input_hours < HOURS_PER_DAY or self.input_hours % HOURS_PER_DAY:
            raise ValueError("input_hours must be a positive multiple of 24")
        if self.input_hours > self.train_days * HOURS_PER_DAY:
            raise ValueError("input_hours cannot exceed the training window")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if not 0.0 < self.dm_threshold < 1.0:
            raise ValueError("dm_threshold must lie in (0, 1)")

    def to_dict(self) -> dict:
        return {
            "zones": list(self.zones),
            "models": list(self.models),
            "test_start": self.test_start.isoformat(),
            "test_end": self.test_end.isoformat(),
            "train_days": self.train_days,
            "input_hours": self.input_hours,
            "data_dir": str(self.data_dir),
            "out_dir": str(self.out_dir),
            "seed": self.seed,
            "transform_targets": self.transform_targets,
            "jobs": self.jobs,
            "external_timeout": self.external_timeout,
            "dm_threshold": self.dm_threshold,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        cfg = cls()
        casts = {
            "zones": _as_list,
            "models": _as_models,
            "test_start": _as_date,
            "test_end": _as_date,
            "train_days": int,
            "input_hours": int,
            "data_dir": Path,
            "out_dir": Path,
            "seed": int,
            "transform_targets": _as_bool,
            "jobs": int,
            "external_timeout": float,
            "dm_threshold": float,
        }
        known = {f.name for f in fields(cls)}
        for key, value in raw.items():
            if key not in known:
                raise ValueError(f"unknown config key {key!r}")
            setattr(cfg, key, casts[key](value))
        return cfg


def _as_list(value) -> list[str]:
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    items: list[str] = []
    for line in str(value).splitlines():
        for part in line.split(","):
            part = part.strip()
            if part:
                items.append(part)
    return items


def _as_models(value) -> list[str]:
    """Model specs: external commands contain commas, so lines starting
    with ``external:`` stay whole while other lines split on commas."""
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    items: list[str] = []
    for line in str(value).splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("external:"):
            items.append(line)
        else:
            items.extend(p.strip() for p in line.split(",") if p.strip())
    return items


def _as_date(value) -> date:
    if isinstance(value, date):
        return value
    return date.fromisoformat(str(value).strip())


def _as_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def load_config(path: str | Path) -> RunConfig:
    """Load a config file: INI with a [run] section, or a run_meta.json
    produced by a previous run (replay)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        raw = json.loads(text)
        return RunConfig.from_dict(raw.get("config", raw))
    parser = configparser.ConfigParser()
    parser.read_string(text)
    if "run" not in parser:
        raise ValueError(f"{path}: missing [run] section")
    return RunConfig.from_dict(dict(parser["run"]))
