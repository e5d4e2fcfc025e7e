import sys
from datetime import date
from pathlib import Path

import numpy as np
import pytest

from epfbench.data import HourlySeries

CHILDREN = Path(__file__).parent / "children"


def make_series(
    n_days: int,
    zone: str = "DE-LU",
    start: date = date(2024, 1, 1),
    seed: int = 0,
    daily_amp: float = 10.0,
    weekly_amp: float = 5.0,
    noise: float = 2.0,
    level: float = 50.0,
) -> HourlySeries:
    """Synthetic price series with daily/weekly shape plus noise."""
    rng = np.random.default_rng(seed)
    t = np.arange(n_days * 24)
    values = (
        level
        + daily_amp * np.sin(2 * np.pi * t / 24)
        + weekly_amp * np.sin(2 * np.pi * t / 168)
        + noise * rng.standard_normal(len(t))
    )
    return HourlySeries(zone, start, values)


@pytest.fixture
def series_120d() -> HourlySeries:
    return make_series(120)


@pytest.fixture
def echo_command() -> list[str]:
    return [sys.executable, str(CHILDREN / "echo_child.py")]


def child_command(*args: str) -> list[str]:
    return [sys.executable, str(CHILDREN / "misbehaving_child.py"), *args]
