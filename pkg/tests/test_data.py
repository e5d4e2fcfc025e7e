from datetime import date, datetime, timedelta, timezone
from zoneinfo import ZoneInfo

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epfbench.data import (
    HourlySeries,
    MarketDay,
    RawObservation,
    normalize_dst,
    parse_entsoe_csv,
    read_canonical,
    slice_window,
    write_canonical,
)
from epfbench.errors import (
    EmptyInput,
    FileUnreadable,
    FormatViolation,
    GapTooLarge,
    MalformedRow,
    NonContiguous,
    OutOfRange,
)

TZ = ZoneInfo("Europe/Berlin")


def obs_day(day: date, prices, zone="DE-LU", skip_hour=None):
    """Observations for one ordinary local day."""
    out = []
    hours = [h for h in range(24) if h != skip_hour]
    for h, p in zip(hours, prices):
        out.append(RawObservation(datetime.combine(day, datetime.min.time(),
                                                   TZ).replace(hour=h), p, zone))
    return out


# --- parse_entsoe_csv -----------------------------------------------------------


def write_csv(tmp_path, rows, header="timestamp,price"):
    path = tmp_path / "raw.csv"
    path.write_text("\n".join([header, *rows]) + "\n", encoding="utf-8")
    return path


def test_parse_well_formed_rows_in_order(tmp_path):
    path = write_csv(tmp_path, [
        "2024-01-01 02:00,30.0",
        "2024-01-01 00:00,10.0",
        "2024-01-01 01:00,20.0",
    ])
    report = parse_entsoe_csv(path, "DE-LU")
    assert [o.price for o in report.observations] == [10.0, 20.0, 30.0]
    assert [o.timestamp.hour for o in report.observations] == [0, 1, 2]


def test_parse_duplicate_timestamp_last_wins(tmp_path):
    path = write_csv(tmp_path, [
        "2024-01-01 00:00,10.0",
        "2024-01-01 00:00,12.0",
    ])
    report = parse_entsoe_csv(path, "DE-LU")
    assert len(report.observations) == 1
    assert report.observations[0].price == 12.0
    assert report.collapsed_duplicates == 1


def test_parse_unparseable_price_is_malformed_row(tmp_path):
    path = write_csv(tmp_path, [
        "2024-01-01 00:00,10.0",
        "2024-01-01 01:00,abc",
    ])
    with pytest.raises(MalformedRow) as exc:
        parse_entsoe_csv(path, "DE-LU")
    assert exc.value.line == 3


def test_parse_unparseable_timestamp_is_malformed_row(tmp_path):
    path = write_csv(tmp_path, ["not-a-date,10.0"])
    with pytest.raises(MalformedRow):
        parse_entsoe_csv(path, "DE-LU")


def test_parse_empty_price_rows_dropped_and_counted(tmp_path):
    path = write_csv(tmp_path, [
        "2024-01-01 00:00,10.0",
        "2024-01-01 01:00,",
        "2024-01-01 02:00,30.0",
    ])
    report = parse_entsoe_csv(path, "DE-LU")
    assert len(report.observations) == 2
    assert report.dropped_empty == 1


def test_parse_all_rows_empty_is_empty_input(tmp_path):
    path = write_csv(tmp_path, ["2024-01-01 00:00,"])
    with pytest.raises(EmptyInput):
        parse_entsoe_csv(path, "DE-LU")


def test_parse_missing_file_unreadable(tmp_path):
    with pytest.raises(FileUnreadable):
        parse_entsoe_csv(tmp_path / "absent.csv", "DE-LU")


def test_parse_iso_offset_and_explicit_columns(tmp_path):
    path = write_csv(tmp_path, [
        "2024-01-01T00:00:00+01:00;10.5;x",
        "2024-01-01T01:00:00+01:00;-20.25;x",
    ], header="start;value [EUR/MWh];junk")
    report = parse_entsoe_csv(
        path, "DE-LU", ts_col="start", price_col="value [EUR/MWh]"
    )
    assert [o.price for o in report.observations] == [10.5, -20.25]


def test_parse_fall_back_rows_stay_distinct(tmp_path):
    # the repeated local hour appears twice; both instants must survive
    path = write_csv(tmp_path, [
        "2024-10-27 01:00,1.0",
        "2024-10-27 02:00,2.0",
        "2024-10-27 02:00,3.0",
        "2024-10-27 03:00,4.0",
    ])
    report = parse_entsoe_csv(path, "DE-LU")
    assert len(report.observations) == 4
    assert report.collapsed_duplicates == 0


# --- normalize_dst ---------------------------------------------------------------


def make_ordinary_days(first: date, n_days: int, base=30.0):
    obs = []
    for i in range(n_days):
        day = first + timedelta(days=i)
        obs += obs_day(day, [base + h for h in range(24)])
    return obs


def test_normalize_ordinary_day_unchanged():
    obs = make_ordinary_days(date(2024, 1, 1), 2)
    series = normalize_dst(obs)
    assert series.n_days == 2
    assert np.array_equal(series.day_values(date(2024, 1, 1)),
                          np.arange(30.0, 54.0))


def test_normalize_spring_forward_interpolates_midpoint():
    # skipped hour 2 with neighbours 10 and 20 -> inserted 15
    day = date(2024, 3, 31)
    prices = [5.0, 10.0, 20.0] + [7.0] * 20
    obs = obs_day(day, prices, skip_hour=2)
    assert len(obs) == 23
    series = normalize_dst(obs)
    assert len(series) == 24
    assert series.values[1] == 10.0
    assert series.values[2] == 15.0
    assert series.values[3] == 20.0


def test_normalize_fall_back_averages_repeated_hour():
    day = date(2024, 10, 27)
    obs = []
    for h in range(24):
        ts = datetime.combine(day, datetime.min.time(), TZ).replace(hour=h)
        if h == 2:
            obs.append(RawObservation(ts, 10.0, "DE-LU"))
            obs.append(RawObservation(ts.replace(fold=1), 20.0, "DE-LU"))
        else:
            obs.append(RawObservation(ts, 1.0 * h, "DE-LU"))
    assert len(obs) == 25
    series = normalize_dst(obs)
    assert len(series) == 24
    assert series.values[2] == 15.0


def test_normalize_fall_back_preserves_daily_mean():
    day = date(2024, 10, 27)
    obs = []
    prices = []
    for h in range(24):
        ts = datetime.combine(day, datetime.min.time(), TZ).replace(hour=h)
        if h == 2:
            obs.append(RawObservation(ts, 11.0, "DE-LU"))
            obs.append(RawObservation(ts.replace(fold=1), 23.0, "DE-LU"))
            prices.append((11.0 + 23.0) / 2)
        else:
            obs.append(RawObservation(ts, float(h * h), "DE-LU"))
            prices.append(float(h * h))
    series = normalize_dst(obs)
    assert series.values.mean() == pytest.approx(np.mean(prices), abs=1e-12)


def test_normalize_gap_at_series_start_copies_single_neighbour():
    day = date(2024, 3, 31)
    prices = [42.0] + [7.0] * 22
    obs = obs_day(day, prices, skip_hour=0)
    series = normalize_dst(obs)
    assert series.values[0] == 42.0  # right neighbour copied


def test_normalize_gap_at_series_end_copies_single_neighbour():
    day = date(2024, 3, 31)
    prices = [7.0] * 22 + [42.0]
    obs = obs_day(day, prices, skip_hour=23)
    series = normalize_dst(obs)
    assert series.values[23] == 42.0


def test_normalize_every_day_has_24_finite_values():
    obs = make_ordinary_days(date(2024, 3, 30), 1)
    obs += obs_day(date(2024, 3, 31), [float(h) for h in range(23)], skip_hour=2)
    obs += make_ordinary_days(date(2024, 4, 1), 1)
    series = normalize_dst(obs)
    assert series.n_days == 3
    assert np.all(np.isfinite(series.values))


def test_normalize_rejects_short_day():
    obs = obs_day(date(2024, 1, 1), [1.0] * 20)
    with pytest.raises(GapTooLarge):
        normalize_dst(obs)


def test_normalize_rejects_gap_on_non_dst_day():
    # a 23-row day without a clock change is a data gap, not imputable
    obs = obs_day(date(2024, 7, 10), [1.0] * 23, skip_hour=12)
    with pytest.raises(GapTooLarge):
        normalize_dst(obs)


def test_normalize_rejects_25_rows_on_ordinary_day():
    day = date(2024, 7, 10)
    obs = obs_day(day, [1.0 * h for h in range(24)])
    extra = RawObservation(
        datetime.combine(day, datetime.min.time(), TZ).replace(hour=12),
        99.0,
        "DE-LU",
    )
    with pytest.raises(GapTooLarge):
        normalize_dst(obs + [extra])


def test_normalize_rejects_missing_days():
    obs = make_ordinary_days(date(2024, 1, 1), 1)
    obs += make_ordinary_days(date(2024, 1, 3), 1)
    with pytest.raises(NonContiguous):
        normalize_dst(obs)


def test_normalize_empty_is_empty_input():
    with pytest.raises(EmptyInput):
        normalize_dst([])


# --- canonical io -----------------------------------------------------------------


def test_canonical_round_trip(tmp_path):
    series = HourlySeries("AT", date(2024, 2, 1),
                          np.linspace(-50.3, 120.7, 48))
    path = tmp_path / "AT.csv"
    write_canonical(series, path)
    back = read_canonical(path, "AT")
    assert back == series
    assert back.values.dtype == np.float64


def test_canonical_rejects_partial_day(tmp_path):
    path = tmp_path / "bad.csv"
    rows = ["date,hour,price"]
    rows += [f"2024-01-01,{h},1.0" for h in range(23)]
    path.write_text("\n".join(rows) + "\n")
    with pytest.raises(FormatViolation):
        read_canonical(path, "AT")


def test_canonical_rejects_nan_token(tmp_path):
    path = tmp_path / "bad.csv"
    rows = ["date,hour,price"]
    rows += [f"2024-01-01,{h},{'nan' if h == 5 else '1.0'}" for h in range(24)]
    path.write_text("\n".join(rows) + "\n")
    with pytest.raises(FormatViolation) as exc:
        read_canonical(path, "AT")
    assert exc.value.line == 7


def test_canonical_rejects_bad_header_and_order(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("hour,date,price\n")
    with pytest.raises(FormatViolation):
        read_canonical(path, "AT")
    rows = ["date,hour,price"] + [f"2024-01-01,{h},1.0" for h in range(24)]
    rows[1], rows[2] = rows[2], rows[1]
    path.write_text("\n".join(rows) + "\n")
    with pytest.raises(FormatViolation):
        read_canonical(path, "AT")


@settings(max_examples=25, deadline=None)
@given(
    n_days=st.integers(min_value=1, max_value=6),
    seed=st.integers(min_value=0, max_value=2**31),
)
def test_canonical_write_read_identity_property(tmp_path_factory, n_days, seed):
    rng = np.random.default_rng(seed)
    values = rng.uniform(-500, 3000, n_days * 24)
    series = HourlySeries("FR", date(2023, 6, 1), values)
    path = tmp_path_factory.mktemp("canon") / "FR.csv"
    write_canonical(series, path)
    assert read_canonical(path, "FR") == series


# --- slice_window ------------------------------------------------------------------


def test_slice_window_basic():
    values = np.arange(100 * 24, dtype=np.float64)
    series = HourlySeries("DE-LU", date(2024, 1, 1), values)
    end_day = date(2024, 1, 1) + timedelta(days=89)  # day index 89
    window = slice_window(series, end_day, 84)
    assert len(window) == 84 * 24
    assert window.values[-1] == series.day_values(end_day)[23]
    assert window.start_day == end_day - timedelta(days=83)


def test_slice_window_single_day():
    series = HourlySeries("DE-LU", date(2024, 1, 1),
                          np.arange(5 * 24, dtype=np.float64))
    day = date(2024, 1, 3)
    window = slice_window(series, day, 1)
    assert np.array_equal(window.values, series.day_values(day))


def test_slice_window_out_of_range():
    series = HourlySeries("DE-LU", date(2024, 1, 10),
                          np.zeros(5 * 24))
    with pytest.raises(OutOfRange):
        slice_window(series, date(2024, 1, 9), 1)
    with pytest.raises(OutOfRange):
        slice_window(series, date(2024, 1, 12), 5)


def test_slice_windows_compose_contiguously():
    series = HourlySeries("DE-LU", date(2024, 1, 1),
                          np.arange(30 * 24, dtype=np.float64))
    first = slice_window(series, date(2024, 1, 10), 10)
    second = slice_window(series, date(2024, 1, 20), 10)
    joined = np.concatenate([first.values, second.values])
    assert np.array_equal(joined, series.values[: 20 * 24])


# --- data model invariants ----------------------------------------------------------


def test_hourly_series_rejects_bad_lengths_and_values():
    with pytest.raises(ValueError):
        HourlySeries("AT", date(2024, 1, 1), np.zeros(23))
    with pytest.raises(ValueError):
        HourlySeries("AT", date(2024, 1, 1), np.full(24, np.nan))
    with pytest.raises(ValueError):
        HourlySeries("AT", date(2024, 1, 1), np.zeros(0))


def test_hourly_series_values_are_immutable():
    series = HourlySeries("AT", date(2024, 1, 1), np.zeros(24))
    with pytest.raises(ValueError):
        series.values[0] = 1.0


def test_market_day_validation():
    MarketDay(date(2024, 1, 1), np.zeros(24))
    with pytest.raises(ValueError):
        MarketDay(date(2024, 1, 1), np.zeros(23))
    with pytest.raises(ValueError):
        MarketDay(date(2024, 1, 1), np.r_[np.zeros(23), np.inf])


def test_raw_observation_requires_aware_timestamp_and_finite_price():
    with pytest.raises(ValueError):
        RawObservation(datetime(2024, 1, 1), 1.0, "AT")
    with pytest.raises(ValueError):
        RawObservation(datetime(2024, 1, 1, tzinfo=timezone.utc),
                       float("inf"), "AT")
    with pytest.raises(ValueError):  # hourly granularity
        RawObservation(datetime(2024, 1, 1, 0, 15, tzinfo=timezone.utc),
                       1.0, "AT")


def test_parse_sub_hourly_timestamp_is_malformed_row(tmp_path):
    path = write_csv(tmp_path, ["2024-01-01 00:15,10.0"])
    with pytest.raises(MalformedRow):
        parse_entsoe_csv(path, "DE-LU")
