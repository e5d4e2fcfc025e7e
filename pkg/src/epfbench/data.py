"""Ingestion of day-ahead price exports and the canonical hourly format.

Raw exports carry one row per delivery hour in local market time. Clock
changes make two days per year 23 or 25 hours long; everything downstream
assumes a strict 24-values-per-day grid, so normalization happens here and
zone offsets are discarded afterwards.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import date, datetime, timedelta
from pathlib import Path
from zoneinfo import ZoneInfo

import numpy as np

from .errors import (
    EmptyInput,
    FileUnreadable,
    FormatViolation,
    GapTooLarge,
    MalformedRow,
    NonContiguous,
    OutOfRange,
)

#: Bidding zones covered by the benchmark and their market time zones.
#: All five share CET/CEST but are kept separate so the table extends
#: naturally to other markets.
ZONE_TZ = {
    "DE-LU": "Europe/Berlin",
    "DE-AT-LU": "Europe/Berlin",
    "AT": "Europe/Vienna",
    "BE": "Europe/Brussels",
    "FR": "Europe/Paris",
    "NL": "Europe/Amsterdam",
}

HOURS_PER_DAY = 24


def market_timezone(zone: str, tz: str | None = None) -> ZoneInfo:
    """Resolve the IANA time zone for a bidding zone; `tz` overrides."""
    if tz is not None:
        return ZoneInfo(tz)
    try:
        return ZoneInfo(ZONE_TZ[zone])
    except KeyError:
        raise ValueError(
            f"unknown bidding zone {zone!r}: pass an explicit time zone"
        ) from None


@dataclass(frozen=True)
class RawObservation:
    """One hourly price row, pinned to an unambiguous instant.

    `timestamp` is timezone-aware in local market time; `fold`
    distinguishes the two occurrences of the repeated fall-back hour.
    """

    timestamp: datetime
    price: float
    zone: str

    def __post_init__(self):
        if self.timestamp.tzinfo is None:
            raise ValueError("RawObservation timestamp must be timezone-aware")
        ts = self.timestamp
        if ts.minute or ts.second or ts.microsecond:
            raise ValueError(f"timestamp {ts} is not on an hour boundary")
        if not math.isfinite(self.price):
            raise ValueError("price must be finite")

    @property
    def epoch(self) -> int:
        """Seconds since the Unix epoch (instant identity for sort/dedup)."""
        return int(self.timestamp.timestamp())


def _validate_series(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1:
        raise ValueError("series values must be one-dimensional")
    if len(values) == 0 or len(values) % HOURS_PER_DAY != 0:
        raise ValueError(
            f"series length {len(values)} is not a positive multiple of 24"
        )
    if not np.all(np.isfinite(values)):
        raise ValueError("series contains non-finite values")
    values = values.copy()
    values.setflags(write=False)
    return values


@dataclass(frozen=True)
class HourlySeries:
    """Gap-free hourly prices on a strict 24-per-day grid.

    Index i corresponds to hour (i % 24) of day start_day + i // 24.
    Immutable after construction; safe to share across workers.
    """

    zone: str
    start_day: date
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _validate_series(self.values))

    def __eq__(self, other) -> bool:
        if not isinstance(other, HourlySeries):
            return NotImplemented
        return (
            self.zone == other.zone
            and self.start_day == other.start_day
            and np.array_equal(self.values, other.values)
        )

    def __len__(self) -> int:
        return len(self.values)

    @property
    def n_days(self) -> int:
        return len(self.values) // HOURS_PER_DAY

    @property
    def end_day(self) -> date:
        return self.start_day + timedelta(days=self.n_days - 1)

    def covers(self, first: date, last: date) -> bool:
        return self.start_day <= first and last <= self.end_day

    def day_index(self, day: date) -> int:
        idx = (day - self.start_day).days
        if not 0 <= idx < self.n_days:
            raise OutOfRange(
                f"{day} outside series coverage "
                f"[{self.start_day}, {self.end_day}]"
            )
        return idx

    def day_values(self, day: date) -> np.ndarray:
        i = self.day_index(day) * HOURS_PER_DAY
        return self.values[i : i + HOURS_PER_DAY]


@dataclass(frozen=True)
class MarketDay:
    """24 hourly prices for one delivery day."""

    date: date
    hours: np.ndarray

    def __post_init__(self):
        hours = np.asarray(self.hours, dtype=np.float64)
        if hours.shape != (HOURS_PER_DAY,):
            raise ValueError("MarketDay needs exactly 24 values")
        if not np.all(np.isfinite(hours)):
            raise ValueError("MarketDay values must be finite")
        hours = hours.copy()
        hours.setflags(write=False)
        object.__setattr__(self, "hours", hours)


@dataclass
class ParseReport:
    """Outcome of parsing one raw export."""

    observations: list[RawObservation]
    dropped_empty: int = 0
    collapsed_duplicates: int = 0
    source: str = ""


_TS_HINTS = ("mtu", "time", "date")
_PRICE_HINTS = ("price", "eur")


def _sniff_delimiter(header_line: str) -> str:
    counts = {d: header_line.count(d) for d in (",", ";", "\t")}
    return max(counts, key=counts.get)


def _pick_column(names: list[str], hints: tuple[str, ...], kind: str) -> str:
    for name in names:
        if any(h in name.lower() for h in hints):
            return name
    raise MalformedRow(1, f"no {kind} column among {names}")


def _parse_timestamp(raw: str, tzinfo: ZoneInfo, seen_naive: set) -> datetime:
    """Parse one timestamp cell into an aware local datetime.

    Accepts ISO-8601 (with or without offset) and dd.mm.yyyy HH:MM; a
    trailing " - ..." range part (as in MTU columns) is ignored. Naive
    stamps are localized; the second occurrence of an ambiguous fall-back
    wall time gets fold=1 so the two clock-change rows stay distinct
    instants.
    """
    text = raw.strip().strip('"')
    if " - " in text:
        text = text.split(" - ", 1)[0].strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    dt = None
    try:
        dt = datetime.fromisoformat(text)
    except ValueError:
        for fmt in ("%d.%m.%Y %H:%M", "%d.%m.%Y %H:%M:%S"):
            try:
                dt = datetime.strptime(text, fmt)
                break
            except ValueError:
                continue
    if dt is None:
        raise ValueError(f"unparseable timestamp {raw!r}")
    if dt.tzinfo is not None:
        return dt.astimezone(tzinfo)
    wall = dt.replace(tzinfo=tzinfo)
    ambiguous = wall.utcoffset() != wall.replace(fold=1).utcoffset()
    if ambiguous:
        if dt in seen_naive:
            wall = wall.replace(fold=1)
        else:
            seen_naive.add(dt)
    return wall


def parse_entsoe_csv(
    path: str | Path,
    zone: str,
    ts_col: str | None = None,
    price_col: str | None = None,
    tz: str | None = None,
    delimiter: str | None = None,
) -> ParseReport:
    """Parse a raw day-ahead price export into sorted observations.

    Rows with an empty price cell are dropped and counted; rows whose
    timestamp or price fails to parse raise MalformedRow with the line
    number. Duplicate instants collapse to the last occurrence (later
    rows are re-published corrections).
    """
    path = Path(path)
    tzinfo = market_timezone(zone, tz)
    try:
        text = path.read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise FileUnreadable(f"{path}: {exc}") from exc

    lines = text.splitlines()
    if not lines:
        raise EmptyInput(f"{path}: empty file")
    delim = delimiter or _sniff_delimiter(lines[0])
    reader = csv.DictReader(lines, delimiter=delim)
    names = reader.fieldnames or []
    ts_name = ts_col or _pick_column(names, _TS_HINTS, "timestamp")
    price_name = price_col or _pick_column(names, _PRICE_HINTS, "price")
    for wanted in (ts_name, price_name):
        if wanted not in names:
            raise MalformedRow(1, f"column {wanted!r} not in header {names}")

    by_instant: dict[int, RawObservation] = {}
    dropped = 0
    collapsed = 0
    seen_naive: set = set()
    for lineno, row in enumerate(reader, start=2):
        price_text = (row.get(price_name) or "").strip()
        if not price_text:
            dropped += 1
            continue
        try:
            ts = _parse_timestamp(row.get(ts_name) or "", tzinfo, seen_naive)
        except ValueError as exc:
            raise MalformedRow(lineno, str(exc)) from exc
        try:
            price = float(price_text.replace(",", "."))
        except ValueError:
            raise MalformedRow(lineno, f"unparseable price {price_text!r}") from None
        if not math.isfinite(price):
            raise MalformedRow(lineno, f"non-finite price {price_text!r}")
        try:
            observation = RawObservation(ts, price, zone)
        except ValueError as exc:
            raise MalformedRow(lineno, str(exc)) from exc
        if observation.epoch in by_instant:
            collapsed += 1
        by_instant[observation.epoch] = observation

    if not by_instant:
        raise EmptyInput(f"{path}: no valid rows")
    observations = [by_instant[k] for k in sorted(by_instant)]
    return ParseReport(observations, dropped, collapsed, str(path))


def _expected_day_hours(day: date, tzinfo) -> int:
    """Wall-clock length of a local day: 23 on spring-forward days,
    25 on fall-back days, 24 otherwise."""
    start = datetime.combine(day, datetime.min.time(), tzinfo)
    next_start = datetime.combine(
        day + timedelta(days=1), datetime.min.time(), tzinfo
    )
    shift = next_start.utcoffset() - start.utcoffset()
    return 24 - int(shift.total_seconds() // 3600)


def normalize_dst(observations: list[RawObservation]) -> HourlySeries:
    """Flatten observations to exactly 24 values per local day.

    Spring-forward days (23 rows) get the skipped hour inserted as the
    mean of its two temporal neighbours (single neighbour copied at the
    series edge); fall-back days (25 rows) have the repeated hour's two
    rows replaced by their mean. Gaps on days without a clock change
    are rejected rather than imputed.
    """
    if not observations:
        raise EmptyInput("no observations")
    obs = sorted(observations, key=lambda o: o.epoch)
    zone = obs[0].zone

    by_day: dict[date, list[RawObservation]] = {}
    for o in obs:
        by_day.setdefault(o.timestamp.date(), []).append(o)

    days = sorted(by_day)
    for prev, cur in zip(days, days[1:]):
        if (cur - prev).days != 1:
            raise NonContiguous(f"missing day(s) between {prev} and {cur}")

    flat: list[float] = []
    gap_slots: list[int] = []
    for day in days:
        day_obs = by_day[day]
        count = len(day_obs)
        hours = [o.timestamp.hour for o in day_obs]
        expected = _expected_day_hours(day, day_obs[0].timestamp.tzinfo)
        if count != expected or expected not in (23, 24, 25):
            raise GapTooLarge(
                f"{day}: {count} observations, expected {expected}"
            )
        if count == 24:
            if len(set(hours)) != 24:
                raise GapTooLarge(f"{day}: 24 rows but hours not unique")
            flat.extend(o.price for o in day_obs)
        elif count == 23:
            missing = sorted(set(range(24)) - set(hours))
            if len(missing) != 1:
                raise GapTooLarge(f"{day}: 23 rows but {len(missing)} hours missing")
            gap_hour = missing[0]
            inserted = False
            for o in day_obs:
                if not inserted and o.timestamp.hour > gap_hour:
                    gap_slots.append(len(flat))
                    flat.append(math.nan)
                    inserted = True
                flat.append(o.price)
            if not inserted:  # gap at hour 23
                gap_slots.append(len(flat))
                flat.append(math.nan)
        elif count == 25:
            dup = [h for h in set(hours) if hours.count(h) == 2]
            if len(dup) != 1 or len(set(hours)) != 24:
                raise GapTooLarge(f"{day}: 25 rows without a single repeated hour")
            dup_hour = dup[0]
            merged: list[float] = []
            pending: list[float] = []
            for o in day_obs:
                if o.timestamp.hour == dup_hour:
                    pending.append(o.price)
                    if len(pending) == 2:
                        merged.append((pending[0] + pending[1]) / 2.0)
                else:
                    merged.append(o.price)
            flat.extend(merged)

    for slot in gap_slots:
        left = slot - 1
        while left >= 0 and math.isnan(flat[left]):
            left -= 1
        right = slot + 1
        while right < len(flat) and math.isnan(flat[right]):
            right += 1
        has_left = left >= 0
        has_right = right < len(flat)
        if has_left and has_right:
            flat[slot] = (flat[left] + flat[right]) / 2.0
        elif has_left:
            flat[slot] = flat[left]
        elif has_right:
            flat[slot] = flat[right]
        else:
            raise GapTooLarge("cannot interpolate: no neighbours at all")

    return HourlySeries(zone, days[0], np.array(flat))


CANONICAL_HEADER = "date,hour,price"


def write_canonical(series: HourlySeries, path: str | Path) -> None:
    """Write the canonical date,hour,price file (24 rows per date)."""
    path = Path(path)
    lines = [CANONICAL_HEADER]
    day = series.start_day
    for i, v in enumerate(series.values):
        hour = i % HOURS_PER_DAY
        lines.append(f"{day.isoformat()},{hour},{float(v)!r}")
        if hour == HOURS_PER_DAY - 1:
            day += timedelta(days=1)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_canonical(path: str | Path, zone: str) -> HourlySeries:
    """Read a canonical file, enforcing every format invariant.

    Violations (bad header, non-finite price, out-of-order rows, a date
    with other than 24 rows) raise FormatViolation with the line number.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileUnreadable(f"{path}: {exc}") from exc
    lines = text.splitlines()
    if not lines or lines[0].strip() != CANONICAL_HEADER:
        raise FormatViolation(1, f"expected header {CANONICAL_HEADER!r}")

    values: list[float] = []
    start: date | None = None
    expect_day: date | None = None
    expect_hour = 0
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            raise FormatViolation(lineno, "blank line")
        parts = line.split(",")
        if len(parts) != 3:
            raise FormatViolation(lineno, f"expected 3 fields, got {len(parts)}")
        try:
            d = date.fromisoformat(parts[0])
            hour = int(parts[1])
            price = float(parts[2])
        except ValueError as exc:
            raise FormatViolation(lineno, str(exc)) from exc
        if not math.isfinite(price):
            raise FormatViolation(lineno, f"non-finite price {parts[2]!r}")
        if not 0 <= hour < HOURS_PER_DAY:
            raise FormatViolation(lineno, f"hour {hour} out of range")
        if start is None:
            start = expect_day = d
        if d != expect_day or hour != expect_hour:
            raise FormatViolation(
                lineno,
                f"expected {expect_day} hour {expect_hour}, got {d} hour {hour}",
            )
        values.append(price)
        expect_hour += 1
        if expect_hour == HOURS_PER_DAY:
            expect_hour = 0
            expect_day = expect_day + timedelta(days=1)
    if start is None:
        raise FormatViolation(2, "no data rows")
    if expect_hour != 0:
        raise FormatViolation(len(lines), "row count not a multiple of 24")
    return HourlySeries(zone, start, np.array(values))


def slice_window(series: HourlySeries, end_day: date, n_days: int) -> HourlySeries:
    """Return the n_days-long sub-series ending with the last hour of end_day."""
    if n_days < 1:
        raise OutOfRange(f"n_days must be >= 1, got {n_days}")
    first = end_day - timedelta(days=n_days - 1)
    if not series.covers(first, end_day):
        raise OutOfRange(
            f"window [{first}, {end_day}] not covered by "
            f"[{series.start_day}, {series.end_day}]"
        )
    lo = series.day_index(first) * HOURS_PER_DAY
    hi = (series.day_index(end_day) + 1) * HOURS_PER_DAY
    return HourlySeries(series.zone, first, series.values[lo:hi])
