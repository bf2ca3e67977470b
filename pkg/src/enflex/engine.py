"""Binds the telemetry store to the five-step workflow.

The engine owns what the pure analysis functions cannot: fetching daily
rollups from store snapshots, the versioned profile registry, saved
baselines, and the pinned comparison/saving weeks an intervention
establishes.  Both the CLI and the HTTP service drive exactly this class,
so their outputs agree byte for byte.

Analyses are recomputed on demand from the store; only profiles, baselines
and pins persist (state.json beside the store), which keeps restarts free
of behaviour changes.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import date, datetime, timedelta
from pathlib import Path
from typing import Sequence

from .errors import (
    InsufficientCoverage,
    MissingProfile,
    NoComparisonPinned,
    NoData,
    NoSensors,
    UnknownBaseline,
)
from .methodology import (
    BaselineModel,
    BuildingProfile,
    DateRange,
    InterventionResult,
    ProgressPoint,
    RegisteredProfile,
    SCHOOL_DAYS_ONLY,
    Substitution,
    WeekAnalysis,
    analyze_week,
    compute_baseline,
    evaluate_intervention,
    gap_point,
    progress_point,
    week_id,
    week_start,
)
from .series import (
    RESOLUTIONS,
    daily_energy,
    diff_energy_counter,
    resample,
    window_energy,
)
from .serialize import baseline_from_payload, baseline_payload, profile_from_payload, profile_payload
from .store import StoreSnapshot, TelemetryStore
from .types import UTC, DailyEnergy
from .waste import (
    DEFAULT_ALERT_RATIO,
    DEFAULT_LIGHTS_FLOOR_KW,
    DEFAULT_RESOLUTION,
    OccupancyContrast,
    WasteInterval,
    aggregate_zone_lux,
    detect_luminosity_waste,
    occupancy_contrast,
)

STATE_FILE = "state.json"


@dataclass(frozen=True)
class WasteReport:
    """Everything a chart needs to redraw the detection: both bucketed
    series, the threshold line, and the highlighted intervals."""

    building_id: str
    zone: str
    day: date
    lux_threshold: float
    lights_on_floor_kw: float
    minimal_power_kw: float | None
    resolution_minutes: int
    lux_series: tuple[tuple[datetime, float | None], ...]
    power_series: tuple[tuple[datetime, float | None], ...]
    intervals: tuple[WasteInterval, ...]


@dataclass(frozen=True)
class LiveStatus:
    """Latest power plus today-so-far energy with the baseline overlay."""

    building_id: str
    at: datetime
    local_date: date
    latest_power_w: float | None
    latest_at: datetime | None
    today_kwh: float | None
    today_coverage: float
    baseline_kwh_per_day: float | None


class AnalyticsEngine:
    def __init__(self, store: TelemetryStore, state_path: str | Path | None = None):
        self.store = store
        self._state_lock = threading.RLock()
        self._state_path = Path(state_path) if state_path is not None else None
        self._profiles: dict[str, list[RegisteredProfile]] = {}
        self._baselines: dict[str, BaselineModel] = {}
        self._pins: dict[str, dict] = {}
        self._load_state()

    # -- step 1: profiles ---------------------------------------------------

    def register_profile(self, profile: BuildingProfile) -> RegisteredProfile:
        self.store.building(profile.building_id)  # UnknownBuilding if absent
        with self._state_lock:
            versions = self._profiles.setdefault(profile.building_id, [])
            version = len(versions) + 1
            registered = RegisteredProfile(
                profile=profile, version=version,
                profile_id=f"{profile.building_id}/v{version}",
                warnings=profile.warnings)
            versions.append(registered)
            self._save_state()
        return registered

    def latest_profile(self, building_id: str) -> RegisteredProfile | None:
        with self._state_lock:
            versions = self._profiles.get(building_id, [])
            return versions[-1] if versions else None

    def profile_versions(self, building_id: str) -> list[RegisteredProfile]:
        with self._state_lock:
            return list(self._profiles.get(building_id, []))

    # -- daily rollups --------------------------------------------------------

    def dailies(self, building_id: str, period: DateRange, *,
                anomalies: frozenset[date] = frozenset(),
                snap: StoreSnapshot | None = None) -> list[DailyEnergy]:
        snap = snap or self.store.snapshot()
        return [daily_energy(snap, building_id, day, anomalies=anomalies)
                for day in period.days()]

    # -- step 2: baseline -----------------------------------------------------

    def compute_baseline(self, building_id: str, period: DateRange,
                         anomalies: Sequence[Substitution] = (), *,
                         day_set: str = SCHOOL_DAYS_ONLY,
                         save: bool = True) -> BaselineModel:
        registered = self.latest_profile(building_id)
        if registered is None or not registered.profile.consumption_points:
            raise MissingProfile(
                f"building {building_id!r} needs a profile with at least one "
                "consumption point before a baseline can be computed")
        anomaly_dates = frozenset(s.day for s in anomalies)
        daily = {d.day: d for d in self.dailies(building_id, period,
                                                anomalies=anomaly_dates)}
        model = compute_baseline(daily, building_id, period, anomalies,
                                 day_set=day_set)
        if save:
            with self._state_lock:
                self._baselines[model.baseline_id] = model
                self._save_state()
        return model

    def baseline(self, baseline_id: str) -> BaselineModel:
        with self._state_lock:
            try:
                return self._baselines[baseline_id]
            except KeyError:
                raise UnknownBaseline(baseline_id) from None

    def baselines_for(self, building_id: str) -> list[BaselineModel]:
        with self._state_lock:
            return sorted((m for m in self._baselines.values()
                           if m.building_id == building_id),
                          key=lambda m: (m.period.start, m.baseline_id))

    def resolve_baseline(self, building_id: str,
                         baseline_id: str | None = None) -> BaselineModel:
        """Explicit id, else the pinned baseline, else a sole saved one."""
        if baseline_id is not None:
            model = self.baseline(baseline_id)
            if model.building_id != building_id:
                raise UnknownBaseline(
                    f"{baseline_id} belongs to {model.building_id}, not {building_id}")
            return model
        pin = self._pins.get(building_id)
        if pin and pin.get("baseline_id") in self._baselines:
            return self._baselines[pin["baseline_id"]]
        saved = self.baselines_for(building_id)
        if len(saved) == 1:
            return saved[0]
        raise UnknownBaseline(
            f"building {building_id!r} has {len(saved)} saved baselines; "
            "pass an explicit baseline id")

    # -- step 3: week analysis --------------------------------------------------

    def _week_monday(self, building_id: str, week: str | date,
                     baseline: BaselineModel | None = None) -> date:
        if isinstance(week, date):
            return week
        default_year = baseline.period.start.isocalendar()[0] if baseline else None
        return week_start(week, default_year=default_year)

    def analyze_week(self, building_id: str, week: str | date,
                     baseline_id: str | None = None, *,
                     day_set: str | None = None) -> WeekAnalysis:
        baseline = self.resolve_baseline(building_id, baseline_id)
        monday = self._week_monday(building_id, week, baseline)
        period = DateRange(monday, monday + timedelta(days=6))
        daily = self.dailies(building_id, period)
        return analyze_week(daily, building_id, monday, baseline, day_set=day_set)

    # -- step 4: intervention ----------------------------------------------------

    def evaluate_intervention(self, building_id: str, comparison_week: str | date,
                              saving_week: str | date,
                              baseline_id: str | None = None, *,
                              notes: str = "", pin: bool = True) -> InterventionResult:
        baseline = self.resolve_baseline(building_id, baseline_id)
        comparison = self.analyze_week(building_id, comparison_week,
                                       baseline.baseline_id)
        saving = self.analyze_week(building_id, saving_week, baseline.baseline_id)
        result = evaluate_intervention(comparison, saving, notes=notes)
        if pin:
            self.pin_intervention(building_id, result)
        return result

    def evaluate_weeks(self, building_id: str, comparison: WeekAnalysis,
                       saving: WeekAnalysis, notes: str = "") -> InterventionResult:
        """Evaluate two already-computed analyses (mismatches surface here)."""
        return evaluate_intervention(comparison, saving, notes=notes)

    def pin_intervention(self, building_id: str, result: InterventionResult) -> None:
        with self._state_lock:
            self._pins[building_id] = {
                "baseline_id": result.comparison.baseline_id,
                "comparison_week": result.comparison.week,
                "saving_week": result.saving.week,
            }
            self._save_state()

    def pinned(self, building_id: str) -> dict | None:
        with self._state_lock:
            pin = self._pins.get(building_id)
            return dict(pin) if pin else None

    # -- step 5: progress ----------------------------------------------------------

    def _weeks_with_data(self, building_id: str, after: date) -> list[date]:
        snap = self.store.snapshot()
        building = snap.building(building_id)
        tz = building.tzinfo
        mondays: set[date] = set()
        for meter in snap.main_meters(building_id):
            series = snap.series(meter.sensor_id)
            if not series:
                continue
            first = series[0].timestamp.astimezone(tz).date()
            last = series[-1].timestamp.astimezone(tz).date()
            monday = first - timedelta(days=first.weekday())
            while monday <= last:
                mondays.add(monday)
                monday += timedelta(days=7)
        return sorted(m for m in mondays if m > after)

    def track_progress(self, building_id: str, weeks: Sequence[str | date] | None = None,
                       *, baseline_id: str | None = None,
                       comparison_week: str | date | None = None,
                       group_tags: dict[str, str] | None = None) -> list[ProgressPoint]:
        group_tags = group_tags or {}
        pin = self.pinned(building_id)
        if comparison_week is None:
            if not pin:
                raise NoComparisonPinned(
                    f"building {building_id!r} has no evaluated intervention; "
                    "pass a comparison week")
            comparison_week = pin["comparison_week"]
            baseline_id = baseline_id or pin["baseline_id"]
        baseline = self.resolve_baseline(building_id, baseline_id)
        comparison = self.analyze_week(building_id, comparison_week,
                                       baseline.baseline_id)
        comparison_monday = self._week_monday(building_id, comparison_week, baseline)
        if weeks is None:
            mondays = self._weeks_with_data(building_id, comparison_monday)
        else:
            mondays = [self._week_monday(building_id, w, baseline) for w in weeks]
            early = [m for m in mondays if m <= comparison_monday]
            if early:
                raise ValueError(
                    f"progress weeks must follow the comparison week: {early}")
        points: list[ProgressPoint] = []
        for monday in mondays:
            label = week_id(monday)
            tag = group_tags.get(label)
            try:
                analysis = self.analyze_week(building_id, monday, baseline.baseline_id)
            except (InsufficientCoverage, NoData):
                points.append(gap_point(label, group_tag=tag))
                continue
            points.append(progress_point(comparison, analysis, group_tag=tag))
        return points

    # -- energy series and live view --------------------------------------------

    def energy_series(self, building_id: str, resolution: str,
                      start: datetime, end: datetime) -> list[dict]:
        """Per-bucket kWh between two instants; None marks bucket gaps."""
        if resolution not in RESOLUTIONS:
            raise ValueError(f"unknown resolution: {resolution!r}")
        snap = self.store.snapshot()
        building = snap.building(building_id)
        meters = snap.main_meters(building_id)
        if not meters:
            raise NoSensors(f"building {building_id!r} has no main-meter sensor")
        tz = building.tzinfo

        if resolution == "1day":
            out = []
            day = start.astimezone(tz).date()
            last = end.astimezone(tz).date()
            while day < last or (day == last and building.day_window(day)[0] < end):
                d = daily_energy(snap, building_id, day)
                out.append({"date": day.isoformat(), "kwh": d.kwh,
                            "coverage": d.coverage, "flags": sorted(d.flags)})
                day += timedelta(days=1)
            return out

        step = RESOLUTIONS[resolution]
        local = start.astimezone(tz).replace(tzinfo=None)
        floored = local.replace(second=0, microsecond=0)
        floored -= timedelta(minutes=floored.minute % max(1, step.seconds // 60))
        out = []
        cursor = floored
        while cursor.replace(tzinfo=tz) < end:
            b_start = cursor.replace(tzinfo=tz)
            b_end = (cursor + step).replace(tzinfo=tz)
            kwh = None
            for meter in meters:
                series = snap.series(meter.sensor_id)
                if meter.kind == "power":
                    w = window_energy(series, b_start, b_end)
                    if w.covered_seconds > 0:
                        kwh = (kwh or 0.0) + w.kwh
                else:
                    try:
                        c = diff_energy_counter(series, b_start, b_end)
                    except NoData:
                        continue
                    if c.covered_seconds > 0:
                        kwh = (kwh or 0.0) + c.kwh
            out.append({"start": b_start.astimezone(UTC).strftime("%Y-%m-%dT%H:%M:%SZ"),
                        "kwh": kwh})
            cursor += step
        return out

    def live(self, building_id: str, at: datetime | None = None) -> LiveStatus:
        snap = self.store.snapshot()
        building = snap.building(building_id)
        at = at or datetime.now(tz=UTC).replace(microsecond=0)
        meters = snap.main_meters(building_id)
        if not meters:
            raise NoSensors(f"building {building_id!r} has no main-meter sensor")

        latest_power = None
        latest_at = None
        for meter in meters:
            if meter.kind != "power":
                continue
            for reading in reversed(snap.series(meter.sensor_id)):
                if reading.timestamp <= at:
                    if latest_at is None or reading.timestamp > latest_at:
                        latest_power, latest_at = reading.value, reading.timestamp
                    break

        local_date = at.astimezone(building.tzinfo).date()
        day_start, _ = building.day_window(local_date)
        today_kwh = None
        covered = 0.0
        if at > day_start:
            for meter in meters:
                series = snap.series(meter.sensor_id)
                if meter.kind == "power":
                    w = window_energy(series, day_start, at)
                    if w.covered_seconds > 0:
                        today_kwh = (today_kwh or 0.0) + w.kwh
                        covered += w.covered_seconds
                else:
                    try:
                        c = diff_energy_counter(series, day_start, at)
                    except NoData:
                        continue
                    if c.covered_seconds > 0:
                        today_kwh = (today_kwh or 0.0) + c.kwh
                        covered += c.covered_seconds

        baseline_overlay = None
        try:
            baseline_overlay = self.resolve_baseline(building_id).kwh_per_day
        except UnknownBaseline:
            pass
        elapsed = max(1.0, (at - day_start).total_seconds())
        return LiveStatus(
            building_id=building_id, at=at, local_date=local_date,
            latest_power_w=latest_power, latest_at=latest_at,
            today_kwh=today_kwh,
            today_coverage=min(1.0, covered / (len(meters) * elapsed)),
            baseline_kwh_per_day=baseline_overlay)

    # -- waste detection -----------------------------------------------------------

    def lux_zones(self, building_id: str) -> list[str]:
        snap = self.store.snapshot()
        rooms = {s.room or "" for s in snap.sensors(building_id, kind="luminosity")}
        return sorted(r for r in rooms if r)

    def detect_waste(self, building_id: str, day: date, *, lux_threshold: float,
                     zone: str | None = None,
                     lights_on_floor_kw: float = DEFAULT_LIGHTS_FLOOR_KW,
                     minimal_power_kw: float | None = None,
                     aggregation: str = "max",
                     resolution: timedelta = DEFAULT_RESOLUTION) -> WasteReport:
        snap = self.store.snapshot()
        building = snap.building(building_id)
        if zone is None:
            zones = self.lux_zones(building_id)
            if len(zones) != 1:
                raise NoSensors(
                    f"building {building_id!r} has {len(zones)} lux zones; pass one "
                    f"of {zones or 'none'}")
            zone = zones[0]
        lux_sensors = snap.sensors(building_id, kind="luminosity", room=zone)
        if not lux_sensors:
            raise NoSensors(f"zone {zone!r} has no luminosity sensors")
        lights = [s for s in snap.sensors(building_id, circuit="lighting", room=zone)
                  if s.kind == "power"]
        if not lights:
            raise NoSensors(f"zone {zone!r} has no lighting-circuit power meter")

        start, end = building.day_window(day)
        tz = building.tzinfo
        res_name = {900: "15min", 60: "1min", 3600: "1h"}.get(
            int(resolution.total_seconds()))
        if res_name is None:
            raise ValueError("waste detection supports 1min/15min/1h resolutions")

        def day_buckets(sensor_id: str) -> list[tuple[datetime, float | None]]:
            series = [r for r in snap.series(sensor_id) if start <= r.timestamp < end]
            return [(ts.astimezone(UTC), v)
                    for ts, v in resample(series, res_name, "mean", tz=tz)]

        lux_series = aggregate_zone_lux([day_buckets(s.sensor_id) for s in lux_sensors],
                                        method=aggregation)
        power_parts = [day_buckets(s.sensor_id) for s in lights]
        power_by_ts: dict[datetime, float | None] = {}
        for part in power_parts:
            for ts, value in part:
                if value is None:
                    power_by_ts.setdefault(ts, None)
                else:
                    power_by_ts[ts] = (power_by_ts.get(ts) or 0.0) + value
        power_series = sorted(power_by_ts.items())

        intervals = detect_luminosity_waste(
            lux_series, power_series, lux_threshold=lux_threshold,
            lights_on_floor_kw=lights_on_floor_kw,
            minimal_power_kw=minimal_power_kw, building_id=building_id,
            zone=zone, resolution=resolution)
        return WasteReport(
            building_id=building_id, zone=zone, day=day,
            lux_threshold=lux_threshold, lights_on_floor_kw=lights_on_floor_kw,
            minimal_power_kw=minimal_power_kw,
            resolution_minutes=int(resolution.total_seconds() // 60),
            lux_series=tuple(lux_series), power_series=tuple(power_series),
            intervals=tuple(intervals))

    def occupancy_contrast(self, building_id: str, period: DateRange, *,
                           alert_ratio: float = DEFAULT_ALERT_RATIO) -> OccupancyContrast:
        daily = self.dailies(building_id, period)
        return occupancy_contrast(daily, building_id, period,
                                  alert_ratio=alert_ratio)

    # -- state persistence ------------------------------------------------------------

    def _save_state(self) -> None:
        if self._state_path is None:
            return
        payload = {
            "profiles": {
                b: [profile_payload(r) for r in versions]
                for b, versions in self._profiles.items()
            },
            "baselines": {bid: baseline_payload(m)
                          for bid, m in self._baselines.items()},
            "pins": self._pins,
        }
        tmp = self._state_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, indent=2, sort_keys=True),
                       encoding="utf-8")
        tmp.replace(self._state_path)

    def _load_state(self) -> None:
        if self._state_path is None or not self._state_path.exists():
            return
        payload = json.loads(self._state_path.read_text(encoding="utf-8"))
        for building_id, versions in payload.get("profiles", {}).items():
            self._profiles[building_id] = [profile_from_payload(v) for v in versions]
        for baseline_id, data in payload.get("baselines", {}).items():
            self._baselines[baseline_id] = baseline_from_payload(data)
        self._pins = dict(payload.get("pins", {}))
