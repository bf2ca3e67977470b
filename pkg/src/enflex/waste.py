"""Recurring avoidable consumption: daylight lighting waste and weekend baseload.

Lighting waste is the conjunction of two bucketed series at a common working
resolution: zone luminosity at or above a threshold while the lighting
circuit still draws at least a floor power.  Weekend baseload is sized by
contrasting weekday and weekend daily means.
"""
from __future__ import annotations

import statistics
from dataclasses import dataclass, replace
from datetime import date, datetime, time, timedelta
from typing import Sequence

from .errors import (
    InsufficientCoverage,
    MissingSeries,
    NoSensors,
    ThresholdBelowMinimum,
    ThresholdNonPositive,
)
from .methodology import DateRange
from .types import DailyEnergy

#: regulatory minimum light level for passage areas; lux thresholds below
#: this would declare waste while under-lighting the zone
REGULATORY_MIN_LUX = 150.0

DEFAULT_RESOLUTION = timedelta(minutes=15)
DEFAULT_MERGE_GAP = timedelta(minutes=30)
DEFAULT_CLOCK_TOLERANCE = timedelta(minutes=60)
DEFAULT_ALERT_RATIO = 0.25
DEFAULT_LIGHTS_FLOOR_KW = 0.1

Series = Sequence[tuple[datetime, float | None]]


@dataclass(frozen=True, slots=True)
class WasteInterval:
    """A span of avoidable lighting draw under sufficient daylight.

    ``usual_power_kw`` is the median lighting power observed inside the
    interval; ``minimal_power_kw`` the retained level (safety lighting) the
    zone must keep.  Savings assume the excess is shed for the whole span.
    """

    building_id: str
    zone: str
    start: datetime
    end: datetime
    lux_threshold: float
    usual_power_kw: float
    minimal_power_kw: float
    recurrence_count: int = 1

    def __post_init__(self):
        if self.end <= self.start:
            raise ValueError("interval end must fall after its start")

    @property
    def duration_hours(self) -> float:
        return (self.end - self.start).total_seconds() / 3600.0

    @property
    def excess_power_kw(self) -> float:
        return max(0.0, self.usual_power_kw - self.minimal_power_kw)

    @property
    def estimated_daily_savings_kwh(self) -> float:
        return self.excess_power_kw * self.duration_hours


@dataclass(frozen=True, slots=True)
class OccupancyContrast:
    """Weekend-vs-weekday mean consumption over a period."""

    building_id: str
    period: DateRange
    weekday_mean_kwh: float
    weekend_mean_kwh: float
    ratio: float
    alert: bool
    alert_ratio: float
    weekday_days: int
    weekend_days: int


@dataclass(frozen=True, slots=True)
class RecurrencePattern:
    """Intervals recurring at the same clock time across days."""

    start_clock: time
    end_clock: time
    count: int
    days: tuple[date, ...]


def aggregate_zone_lux(series_list: Sequence[Series], method: str = "max") -> list[tuple[datetime, float | None]]:
    """Pointwise zone luminosity across sensors sharing a resolution.

    Defaults to max: a single well-lit reading proves daylight sufficiency,
    and orientation-skewed sensors make averages misleading.  Median is the
    conservative alternative.
    """
    if not series_list:
        raise NoSensors("zone has no luminosity series")
    if method not in ("max", "median"):
        raise ValueError(f"unknown aggregation method: {method!r}")
    merged: dict[datetime, list[float]] = {}
    for series in series_list:
        for ts, value in series:
            if value is not None:
                merged.setdefault(ts, []).append(value)
    keys = sorted(set().union(*[{ts for ts, _ in s} for s in series_list]))
    out = []
    for ts in keys:
        values = merged.get(ts)
        if not values:
            out.append((ts, None))
        elif method == "max":
            out.append((ts, max(values)))
        else:
            out.append((ts, statistics.median(values)))
    return out


def detect_luminosity_waste(lux_series: Series, lights_power_series: Series, *,
                            lux_threshold: float, lights_on_floor_kw: float = DEFAULT_LIGHTS_FLOOR_KW,
                            minimal_power_kw: float | None = None,
                            building_id: str, zone: str,
                            resolution: timedelta = DEFAULT_RESOLUTION,
                            merge_gap: timedelta = DEFAULT_MERGE_GAP,
                            regulatory_min_lux: float = REGULATORY_MIN_LUX) -> list[WasteInterval]:
    """Maximal intervals where daylight suffices yet the lights stay on.

    Both series must share bucket timestamps at ``resolution`` (power values
    in W, as metered).  Qualifying runs separated by less than ``merge_gap``
    merge into one interval.  ``minimal_power_kw`` defaults to the smallest
    nonzero lighting power observed across the whole series, standing in for
    an operator-configured retained level.
    """
    if lux_threshold <= 0:
        raise ThresholdNonPositive(f"lux threshold must be positive, got {lux_threshold}")
    if lux_threshold < regulatory_min_lux:
        raise ThresholdBelowMinimum(
            f"lux threshold {lux_threshold} under the regulatory minimum "
            f"{regulatory_min_lux} for this zone")
    if not lux_series or not lights_power_series:
        raise MissingSeries("waste detection needs both a lux and a lights power series")

    power_by_ts = {ts: v for ts, v in lights_power_series}
    lux_by_ts = {ts: v for ts, v in lux_series}
    common = sorted(set(power_by_ts) & set(lux_by_ts))
    if not common:
        raise MissingSeries("lux and lights power series share no buckets")

    qualifying = []
    for ts in common:
        lux = lux_by_ts[ts]
        power = power_by_ts[ts]
        if lux is None or power is None:
            continue
        if lux >= lux_threshold and power / 1000.0 >= lights_on_floor_kw:
            qualifying.append(ts)

    if not qualifying:
        return []

    # maximal consecutive runs, then merge across short gaps
    runs: list[list[datetime]] = [[qualifying[0]]]
    for ts in qualifying[1:]:
        if ts - runs[-1][-1] == resolution:
            runs[-1].append(ts)
        else:
            runs.append([ts])
    merged: list[tuple[datetime, datetime]] = []
    for run in runs:
        start, end = run[0], run[-1] + resolution
        if merged and start - merged[-1][1] < merge_gap:
            merged[-1] = (merged[-1][0], end)
        else:
            merged.append((start, end))

    if minimal_power_kw is None:
        nonzero = [v / 1000.0 for _, v in lights_power_series if v]
        minimal_power_kw = min(nonzero) if nonzero else 0.0

    intervals = []
    for start, end in merged:
        inside = [power_by_ts[ts] / 1000.0 for ts in common
                  if start <= ts < end and power_by_ts[ts] is not None]
        usual = statistics.median(inside)
        intervals.append(WasteInterval(
            building_id=building_id, zone=zone, start=start, end=end,
            lux_threshold=lux_threshold, usual_power_kw=usual,
            minimal_power_kw=minimal_power_kw))
    return intervals


def recurrence_scan(intervals: Sequence[WasteInterval],
                    clock_tolerance: timedelta = DEFAULT_CLOCK_TOLERANCE) -> list[RecurrencePattern]:
    """Cluster intervals whose start and end clock times agree within tolerance.

    Greedy centroid clustering over (start, end) minutes-of-day; an interval
    joins the first cluster whose centroid it matches, else starts its own.
    """
    tol_min = clock_tolerance.total_seconds() / 60.0

    def minutes_of_day(ts: datetime) -> float:
        return ts.hour * 60 + ts.minute + ts.second / 60.0

    clusters: list[dict] = []
    for iv in sorted(intervals, key=lambda i: (i.start, i.end)):
        s, e = minutes_of_day(iv.start), minutes_of_day(iv.end)
        home = None
        for cluster in clusters:
            cs = cluster["start_sum"] / cluster["n"]
            ce = cluster["end_sum"] / cluster["n"]
            if abs(s - cs) <= tol_min and abs(e - ce) <= tol_min:
                home = cluster
                break
        if home is None:
            home = {"start_sum": 0.0, "end_sum": 0.0, "n": 0, "members": []}
            clusters.append(home)
        home["start_sum"] += s
        home["end_sum"] += e
        home["n"] += 1
        home["members"].append(iv)

    out = []
    for cluster in clusters:
        cs = cluster["start_sum"] / cluster["n"]
        ce = cluster["end_sum"] / cluster["n"]
        out.append(RecurrencePattern(
            start_clock=time(int(cs // 60) % 24, int(cs % 60)),
            end_clock=time(int(ce // 60) % 24, int(ce % 60)),
            count=cluster["n"],
            days=tuple(iv.start.date() for iv in cluster["members"])))
    return out


def annotate_recurrence(intervals: Sequence[WasteInterval],
                        clock_tolerance: timedelta = DEFAULT_CLOCK_TOLERANCE) -> list[WasteInterval]:
    """Copy intervals with recurrence_count filled from a recurrence scan."""
    patterns = recurrence_scan(intervals, clock_tolerance)
    count_by_day: dict[date, int] = {}
    for pattern in patterns:
        for day in pattern.days:
            count_by_day.setdefault(day, pattern.count)
    return [replace(iv, recurrence_count=count_by_day.get(iv.start.date(), 1))
            for iv in intervals]


def occupancy_contrast(daily: Sequence[DailyEnergy], building_id: str,
                       period: DateRange, *,
                       alert_ratio: float = DEFAULT_ALERT_RATIO,
                       min_coverage: float = 0.9) -> OccupancyContrast:
    """Weekend-to-weekday mean consumption ratio over a period.

    Requires weekend data from at least two distinct weeks; days below the
    coverage floor are excluded from either mean.
    """
    weekday_vals: list[float] = []
    weekend_vals: list[float] = []
    weekend_weeks: set[tuple[int, int]] = set()
    for d in daily:
        if d.day not in period or d.kwh is None or d.coverage < min_coverage:
            continue
        if d.day.weekday() >= 5:
            weekend_vals.append(d.kwh)
            iso = d.day.isocalendar()
            weekend_weeks.add((iso[0], iso[1]))
        else:
            weekday_vals.append(d.kwh)
    if len(weekend_weeks) < 2:
        raise InsufficientCoverage(
            "occupancy contrast needs covered weekend days from at least two weekends")
    if not weekday_vals:
        raise InsufficientCoverage("occupancy contrast needs covered weekdays")

    weekday_mean = sum(weekday_vals) / len(weekday_vals)
    weekend_mean = sum(weekend_vals) / len(weekend_vals)
    if weekday_mean > 0:
        ratio = weekend_mean / weekday_mean
    else:
        ratio = 1.0 if weekend_mean == 0 else float("inf")
    return OccupancyContrast(
        building_id=building_id, period=period,
        weekday_mean_kwh=weekday_mean, weekend_mean_kwh=weekend_mean,
        ratio=ratio, alert=ratio > alert_ratio, alert_ratio=alert_ratio,
        weekday_days=len(weekday_vals), weekend_days=len(weekend_vals))
