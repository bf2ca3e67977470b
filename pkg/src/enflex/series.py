"""Window integration, counter differencing, resampling and daily rollups.

Power is integrated with the trapezoidal rule over seconds (exact for
piecewise-linear power, hence exact for constants), divided by 3.6e6 W*s
per kWh.  Readings straddling a window edge contribute their in-window part
via linear interpolation.  Spans between consecutive readings wider than
``max_gap`` are treated as uncovered rather than interpolated across.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from datetime import date, datetime, timedelta
from typing import Sequence
from zoneinfo import ZoneInfo

from .errors import EmptyWindow, GapExceeded, NoData, NoSensors
from .store import StoreSnapshot
from .types import UTC, DailyEnergy, Reading, day_flags

WS_PER_KWH = 3.6e6
DEFAULT_MAX_GAP = timedelta(minutes=30)

RESOLUTIONS = {
    "1min": timedelta(minutes=1),
    "15min": timedelta(minutes=15),
    "1h": timedelta(hours=1),
    "1day": timedelta(days=1),
}

AGGREGATORS = ("mean", "max", "last")


@dataclass(frozen=True)
class WindowEnergy:
    """Energy over a window plus how much of the window readings covered."""

    kwh: float
    covered_seconds: float
    largest_gap_seconds: float
    has_data: bool


@dataclass(frozen=True)
class CounterEnergy:
    """Energy from a cumulative Wh counter over a window.

    ``reset`` marks a counter decrease (rollover/reset) whose negative step
    contributed nothing; ``insufficient_data`` marks a window holding a
    single counter value with no prior anchor.
    """

    kwh: float
    reset: bool = False
    insufficient_data: bool = False
    covered_seconds: float = 0.0


def _window_slice(readings: Sequence[Reading], start: datetime, end: datetime):
    """Readings overlapping [start, end] plus one neighbour on each side."""
    lo = bisect.bisect_left(readings, start, key=lambda r: r.timestamp)
    hi = bisect.bisect_right(readings, end, key=lambda r: r.timestamp)
    return readings[max(0, lo - 1):min(len(readings), hi + 1)]


def window_energy(readings: Sequence[Reading], start: datetime, end: datetime,
                  *, max_gap: timedelta = DEFAULT_MAX_GAP) -> WindowEnergy:
    """Clipped trapezoidal integration of power readings over [start, end].

    Never raises for data quality; inspect ``has_data`` and
    ``largest_gap_seconds`` instead.
    """
    if end <= start:
        raise EmptyWindow(f"window end {end.isoformat()} <= start {start.isoformat()}")
    t0 = start.timestamp()
    t1 = end.timestamp()
    max_gap_s = max_gap.total_seconds()

    ws = 0.0
    covered = 0.0
    largest_gap = 0.0
    cursor = t0
    touched = False
    prev_t: float | None = None
    prev_v = 0.0

    for r in _window_slice(readings, start, end):
        if r.kind != "power":
            raise ValueError(f"integrate_power requires kind=power, got {r.kind!r}")
        t = r.timestamp.timestamp()
        v = r.value
        if prev_t is not None:
            if t <= prev_t:
                raise ValueError("readings must be sorted by strictly ascending timestamp")
            lo = t0 if prev_t < t0 else prev_t
            hi = t1 if t > t1 else t
            if hi > lo:
                touched = True
                if t - prev_t <= max_gap_s:
                    span = t - prev_t
                    va = prev_v + (v - prev_v) * (lo - prev_t) / span
                    vb = prev_v + (v - prev_v) * (hi - prev_t) / span
                    ws += 0.5 * (va + vb) * (hi - lo)
                    gap = lo - cursor
                    if gap > largest_gap:
                        largest_gap = gap
                    covered += hi - lo
                    cursor = hi
        if t0 <= t <= t1:
            touched = True
        prev_t, prev_v = t, v

    tail = t1 - cursor
    if tail > largest_gap:
        largest_gap = tail
    return WindowEnergy(kwh=max(0.0, ws / WS_PER_KWH), covered_seconds=covered,
                        largest_gap_seconds=largest_gap, has_data=touched)


def integrate_power(readings: Sequence[Reading], start: datetime, end: datetime,
                    *, max_gap: timedelta = DEFAULT_MAX_GAP) -> float:
    """Energy in kWh from power readings over [start, end].

    Raises EmptyWindow, NoData, or GapExceeded (the latter carrying the
    coverage-weighted partial result for callers that downgrade).
    """
    w = window_energy(readings, start, end, max_gap=max_gap)
    if not w.has_data:
        raise NoData(f"no power readings within or straddling "
                     f"[{start.isoformat()}, {end.isoformat()}]")
    if w.largest_gap_seconds > max_gap.total_seconds():
        raise GapExceeded(
            f"largest gap {w.largest_gap_seconds:.0f}s exceeds "
            f"max_gap {max_gap.total_seconds():.0f}s",
            partial_kwh=w.kwh, covered_seconds=w.covered_seconds,
            largest_gap_seconds=w.largest_gap_seconds)
    return w.kwh


def diff_energy_counter(readings: Sequence[Reading], start: datetime,
                        end: datetime) -> CounterEnergy:
    """Energy in kWh as the growth of a cumulative Wh counter over [start, end].

    Counter decreases are rollovers/resets: the negative step contributes
    zero and sets the reset flag, so the result is never negative.  Unlike
    power integration, gaps do not lose energy (the counter accumulates),
    so no gap limit applies.
    """
    if end <= start:
        raise EmptyWindow(f"window end {end.isoformat()} <= start {start.isoformat()}")
    anchor: Reading | None = None
    inside: list[Reading] = []
    has_after = False
    prev_ts: datetime | None = None
    for r in readings:
        if r.kind != "energy_counter":
            raise ValueError(f"diff_energy_counter requires kind=energy_counter, got {r.kind!r}")
        if prev_ts is not None and r.timestamp <= prev_ts:
            raise ValueError("readings must be sorted by strictly ascending timestamp")
        prev_ts = r.timestamp
        if r.timestamp <= start:
            anchor = r
        elif r.timestamp <= end:
            inside.append(r)
        else:
            has_after = True

    if not inside and not (anchor is not None and has_after):
        raise NoData(f"no counter readings within or straddling "
                     f"[{start.isoformat()}, {end.isoformat()}]")

    seq = ([anchor] if anchor is not None else []) + inside
    if len(seq) == 1:
        if anchor is None:
            return CounterEnergy(kwh=0.0, insufficient_data=True)
        return CounterEnergy(kwh=0.0)  # counter idle across the window

    wh = 0.0
    reset = False
    for prev, cur in zip(seq, seq[1:]):
        step = cur.value - prev.value
        if step >= 0:
            wh += step
        else:
            reset = True
    first_t = max(seq[0].timestamp, start)
    covered = (seq[-1].timestamp - first_t).total_seconds()
    return CounterEnergy(kwh=wh / 1000.0, reset=reset,
                         covered_seconds=max(0.0, covered))


def _floor_bucket(naive: datetime, resolution: str) -> datetime:
    if resolution == "1min":
        return naive.replace(second=0, microsecond=0)
    if resolution == "15min":
        return naive.replace(minute=naive.minute - naive.minute % 15, second=0, microsecond=0)
    if resolution == "1h":
        return naive.replace(minute=0, second=0, microsecond=0)
    if resolution == "1day":
        return naive.replace(hour=0, minute=0, second=0, microsecond=0)
    raise ValueError(f"unknown resolution: {resolution!r}")


def resample(readings: Sequence[Reading], resolution: str, aggregator: str = "mean",
             tz: ZoneInfo | None = None) -> list[tuple[datetime, float | None]]:
    """Bucket readings at a fixed resolution aligned to local-time boundaries.

    Returns (bucket_start, value) pairs covering every bucket from the first
    reading to the last; empty buckets carry None (explicit gaps, never
    zero-filled).  Bucket starts are aware datetimes in the given timezone.
    Buckets spanning a DST transition follow naive local arithmetic.
    """
    if resolution not in RESOLUTIONS:
        raise ValueError(f"unknown resolution: {resolution!r}")
    if aggregator not in AGGREGATORS:
        raise ValueError(f"unknown aggregator: {aggregator!r}")
    tz = tz or UTC
    if not readings:
        return []

    buckets: dict[datetime, list[float]] = {}
    prev_ts: datetime | None = None
    for r in readings:
        if prev_ts is not None and r.timestamp < prev_ts:
            raise ValueError("readings must be sorted by timestamp")
        prev_ts = r.timestamp
        local = r.timestamp.astimezone(tz).replace(tzinfo=None)
        buckets.setdefault(_floor_bucket(local, resolution), []).append(r.value)

    step = RESOLUTIONS[resolution]
    first = min(buckets)
    last = max(buckets)
    out: list[tuple[datetime, float | None]] = []
    cur = first
    while cur <= last:
        values = buckets.get(cur)
        if values is None:
            agg = None
        elif aggregator == "mean":
            agg = sum(values) / len(values)
        elif aggregator == "max":
            agg = max(values)
        else:
            agg = values[-1]
        out.append((cur.replace(tzinfo=tz), agg))
        cur = cur + step
    return out


def daily_energy(snap: StoreSnapshot, building_id: str, day: date, *,
                 holidays: frozenset[date] | None = None,
                 anomalies: frozenset[date] = frozenset(),
                 max_gap: timedelta = DEFAULT_MAX_GAP) -> DailyEnergy:
    """Total main-meter consumption over one building-local calendar day.

    Power meters integrate with gap downgrade (partial energy plus reduced
    coverage instead of failure); counter meters difference.  A day with no
    meter data at all yields kwh=None and coverage 0.
    """
    building = snap.building(building_id)
    meters = snap.main_meters(building_id)
    if not meters:
        raise NoSensors(f"building {building_id!r} has no main-meter sensor")
    start, end = building.day_window(day)
    day_seconds = (end - start).total_seconds()
    if holidays is None:
        holidays = building.holidays

    total: float | None = None
    covered = 0.0
    for meter in meters:
        readings = snap.series(meter.sensor_id)
        if meter.kind == "power":
            w = window_energy(readings, start, end, max_gap=max_gap)
            if w.covered_seconds <= 0:
                continue  # straddled holes and lone points are not observations
            total = (total or 0.0) + w.kwh
            covered += w.covered_seconds
        else:
            try:
                c = diff_energy_counter(readings, start, end)
            except NoData:
                continue
            if c.covered_seconds <= 0:
                continue
            total = (total or 0.0) + c.kwh
            covered += c.covered_seconds

    coverage = covered / (len(meters) * day_seconds) if total is not None else 0.0
    return DailyEnergy(building_id=building_id, day=day, kwh=total,
                       coverage=min(1.0, coverage),
                       flags=day_flags(day, holidays=holidays, anomalies=anomalies))
