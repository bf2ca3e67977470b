"""Deterministic synthetic-school telemetry for desk-scale runs.

The simulator stands in for a physical deployment: it emits wire-format
power, luminosity and lighting-circuit readings whose daily integrals hit
per-day kWh targets essentially exactly, and whose lux curves cross a
configured level at configured clock times.  The same seed and scenario
always produce byte-identical output.

Calibration trick: the diurnal power template is forced to zero at local
midnight, so scaling one day's samples never leaks into the neighbouring
day's trapezoid, and a single per-day scale factor makes the integral match
the target.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from datetime import date, datetime, time, timedelta
from pathlib import Path
from typing import Iterable

from .errors import InfeasibleScenario
from .store import TelemetryStore
from .types import Building, Reading, Sensor
from .wire import format_reading

POWER_STEP_S = 60
LUX_STEP_S = 300

#: multiplicative sample jitter bounds; scaling restores the exact integral
JITTER_LO, JITTER_HI = 0.92, 1.08


@dataclass(frozen=True, slots=True)
class DayTarget:
    day: date
    kwh: float

    def __post_init__(self):
        if self.kwh < 0:
            raise InfeasibleScenario(f"negative kWh target for {self.day}: {self.kwh}")


@dataclass(frozen=True, slots=True)
class LuxWindow:
    """One day's luminosity curve: ``high`` lux inside the clock window,
    ``low`` outside, so any threshold between the two crosses exactly at
    the window edges."""

    day: date
    above_from: time
    above_to: time
    high: float
    low: float

    def __post_init__(self):
        if self.high <= self.low:
            raise InfeasibleScenario("lux window high level must exceed the low level")
        if self.low < 0:
            raise InfeasibleScenario("lux levels must be >= 0")


@dataclass(frozen=True, slots=True)
class LightsSchedule:
    """Lighting circuit drawing a flat power inside the clock window."""

    day: date
    on_from: time
    on_to: time
    power_w: float

    def __post_init__(self):
        if self.power_w < 0:
            raise InfeasibleScenario("lights power must be >= 0")


@dataclass(frozen=True, slots=True)
class LuxSensorSpec:
    sensor_id: str
    room: str
    windows: tuple[LuxWindow, ...] = ()
    orientation_note: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "windows", tuple(self.windows))


@dataclass(frozen=True, slots=True)
class LightsSpec:
    sensor_id: str
    room: str
    schedule: tuple[LightsSchedule, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "schedule", tuple(self.schedule))


@dataclass(frozen=True, slots=True)
class SimScenario:
    seed: int
    building_id: str
    timezone: str = "UTC"
    building_name: str | None = None
    main_meter: str = "main-meter"
    power_step_seconds: int = POWER_STEP_S
    lux_step_seconds: int = LUX_STEP_S
    day_targets: tuple[DayTarget, ...] = ()
    lux_sensors: tuple[LuxSensorSpec, ...] = ()
    lights: tuple[LightsSpec, ...] = ()
    holidays: tuple[date, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "day_targets",
                           tuple(sorted(self.day_targets, key=lambda t: t.day)))
        object.__setattr__(self, "lux_sensors", tuple(self.lux_sensors))
        object.__setattr__(self, "lights", tuple(self.lights))
        object.__setattr__(self, "holidays", tuple(sorted(self.holidays)))
        seen = set()
        for target in self.day_targets:
            if target.day in seen:
                raise InfeasibleScenario(f"duplicate day target: {target.day}")
            seen.add(target.day)

    def building(self) -> Building:
        return Building(building_id=self.building_id, timezone=self.timezone,
                        name=self.building_name, holidays=frozenset(self.holidays))

    def sensors(self) -> list[Sensor]:
        out = [Sensor(sensor_id=self.main_meter, kind="power",
                      building_id=self.building_id, circuit="main")]
        for spec in self.lux_sensors:
            out.append(Sensor(sensor_id=spec.sensor_id, kind="luminosity",
                              building_id=self.building_id, room=spec.room,
                              orientation_note=spec.orientation_note))
        for spec in self.lights:
            out.append(Sensor(sensor_id=spec.sensor_id, kind="power",
                              building_id=self.building_id, room=spec.room,
                              circuit="lighting"))
        return out

    def register(self, store: TelemetryStore) -> None:
        store.add_building(self.building())
        for sensor in self.sensors():
            store.add_sensor(sensor)

    # -- JSON form ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "building": {"building_id": self.building_id, "timezone": self.timezone,
                         "name": self.building_name},
            "main_meter": self.main_meter,
            "power_step_seconds": self.power_step_seconds,
            "lux_step_seconds": self.lux_step_seconds,
            "day_targets": [{"day": t.day.isoformat(), "kwh": t.kwh}
                            for t in self.day_targets],
            "lux_sensors": [
                {"sensor_id": s.sensor_id, "room": s.room,
                 "orientation_note": s.orientation_note,
                 "windows": [{"day": w.day.isoformat(),
                              "above_from": w.above_from.isoformat("minutes"),
                              "above_to": w.above_to.isoformat("minutes"),
                              "high": w.high, "low": w.low} for w in s.windows]}
                for s in self.lux_sensors],
            "lights": [
                {"sensor_id": s.sensor_id, "room": s.room,
                 "schedule": [{"day": e.day.isoformat(),
                               "on_from": e.on_from.isoformat("minutes"),
                               "on_to": e.on_to.isoformat("minutes"),
                               "power_w": e.power_w} for e in s.schedule]}
                for s in self.lights],
            "holidays": [d.isoformat() for d in self.holidays],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SimScenario":
        building = data.get("building", {})
        return cls(
            seed=int(data["seed"]),
            building_id=building.get("building_id", data.get("building_id", "building")),
            timezone=building.get("timezone", "UTC"),
            building_name=building.get("name"),
            main_meter=data.get("main_meter", "main-meter"),
            power_step_seconds=int(data.get("power_step_seconds", POWER_STEP_S)),
            lux_step_seconds=int(data.get("lux_step_seconds", LUX_STEP_S)),
            day_targets=tuple(DayTarget(day=date.fromisoformat(t["day"]), kwh=float(t["kwh"]))
                              for t in data.get("day_targets", [])),
            lux_sensors=tuple(
                LuxSensorSpec(
                    sensor_id=s["sensor_id"], room=s["room"],
                    orientation_note=s.get("orientation_note"),
                    windows=tuple(LuxWindow(day=date.fromisoformat(w["day"]),
                                            above_from=time.fromisoformat(w["above_from"]),
                                            above_to=time.fromisoformat(w["above_to"]),
                                            high=float(w["high"]), low=float(w["low"]))
                                  for w in s.get("windows", [])))
                for s in data.get("lux_sensors", [])),
            lights=tuple(
                LightsSpec(
                    sensor_id=s["sensor_id"], room=s["room"],
                    schedule=tuple(LightsSchedule(day=date.fromisoformat(e["day"]),
                                                  on_from=time.fromisoformat(e["on_from"]),
                                                  on_to=time.fromisoformat(e["on_to"]),
                                                  power_w=float(e["power_w"]))
                                   for e in s.get("schedule", [])))
                for s in data.get("lights", [])),
            holidays=tuple(date.fromisoformat(d) for d in data.get("holidays", [])),
        )

    @classmethod
    def from_json(cls, path: str | Path) -> "SimScenario":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _diurnal_shape(u: float) -> float:
    """Smooth positive shape over [0, 1) with exact zeros at both ends."""
    envelope = math.sin(math.pi * u)
    bump = 1.0 + 1.6 * math.exp(-((u - 0.54) / 0.16) ** 2)
    return envelope * bump


def _contiguous_runs(targets: Iterable[DayTarget]) -> list[list[DayTarget]]:
    runs: list[list[DayTarget]] = []
    for target in targets:
        if runs and (target.day - runs[-1][-1].day).days == 1:
            runs[-1].append(target)
        else:
            runs.append([target])
    return runs


def _power_readings(scenario: SimScenario, rng: random.Random) -> list[Reading]:
    building = scenario.building()
    step = scenario.power_step_seconds
    out: list[Reading] = []
    for run in _contiguous_runs(scenario.day_targets):
        for target in run:
            start, end = building.day_window(target.day)
            day_seconds = (end - start).total_seconds()
            n = int(day_seconds // step)
            raw = []
            for i in range(n):
                u = (i * step) / day_seconds
                raw.append(_diurnal_shape(u) * rng.uniform(JITTER_LO, JITTER_HI))
            # trapezoid over raw samples plus the zero at the next midnight
            ws = 0.0
            for i in range(n - 1):
                ws += 0.5 * (raw[i] + raw[i + 1]) * step
            last_span = day_seconds - (n - 1) * step
            ws += 0.5 * raw[-1] * last_span  # ramp down to the boundary zero
            raw_kwh = ws / 3.6e6
            scale = target.kwh / raw_kwh if raw_kwh > 0 else 0.0
            for i in range(n):
                ts = start + timedelta(seconds=i * step)
                out.append(Reading(sensor_id=scenario.main_meter, timestamp=ts,
                                   value=raw[i] * scale, kind="power", unit="W"))
        # close the final day of the run with the boundary zero
        _, run_end = building.day_window(run[-1].day)
        out.append(Reading(sensor_id=scenario.main_meter, timestamp=run_end,
                           value=0.0, kind="power", unit="W"))
    return out


def _clock_in_window(ts: datetime, building: Building, start: time, end: time) -> bool:
    local = ts.astimezone(building.tzinfo)
    return start <= local.time() < end


def _lux_readings(scenario: SimScenario, rng: random.Random) -> list[Reading]:
    building = scenario.building()
    step = scenario.lux_step_seconds
    out: list[Reading] = []
    for spec in scenario.lux_sensors:
        for window in sorted(spec.windows, key=lambda w: w.day):
            start, end = building.day_window(window.day)
            amplitude = min(25.0, (window.high - window.low) / 4.0)
            ts = start
            while ts < end:
                inside = _clock_in_window(ts, building, window.above_from, window.above_to)
                level = window.high if inside else window.low
                value = max(0.0, level + rng.uniform(-amplitude, amplitude))
                out.append(Reading(sensor_id=spec.sensor_id, timestamp=ts,
                                   value=value, kind="luminosity", unit="lux"))
                ts += timedelta(seconds=step)
    return out


def _lights_readings(scenario: SimScenario) -> list[Reading]:
    # lighting circuits draw a flat, jitter-free power so interval medians
    # report the configured level exactly
    building = scenario.building()
    step = scenario.power_step_seconds
    out: list[Reading] = []
    for spec in scenario.lights:
        for entry in sorted(spec.schedule, key=lambda e: e.day):
            start, end = building.day_window(entry.day)
            ts = start
            while ts < end:
                on = _clock_in_window(ts, building, entry.on_from, entry.on_to)
                out.append(Reading(sensor_id=spec.sensor_id, timestamp=ts,
                                   value=entry.power_w if on else 0.0,
                                   kind="power", unit="W"))
                ts += timedelta(seconds=step)
    return out


def simulate_readings(scenario: SimScenario) -> list[Reading]:
    """All scenario readings ordered by (timestamp, sensor_id)."""
    rng = random.Random(scenario.seed)
    readings = _power_readings(scenario, rng)
    readings += _lux_readings(scenario, rng)
    readings += _lights_readings(scenario)
    readings.sort(key=lambda r: (r.timestamp, r.sensor_id))
    return readings


def simulate_lines(scenario: SimScenario) -> list[str]:
    """The scenario's telemetry stream in wire format."""
    return [format_reading(r) for r in simulate_readings(scenario)]


# -- built-in scenarios -----------------------------------------------------

def soderhamn_scenario(seed: int = 20181105) -> SimScenario:
    """Swedish technical school, weeks 44 (no-class), 47 (comparison) and
    50 (saving): per-day targets calibrated so the full pipeline lands on
    baseline 141.9, week means 211 and 196.5 kWh/day."""
    w44 = date(2018, 10, 29)
    w47 = date(2018, 11, 19)
    w50 = date(2018, 12, 10)

    def week(monday: date, values: list[float]) -> list[DayTarget]:
        return [DayTarget(day=monday + timedelta(days=i), kwh=v)
                for i, v in enumerate(values)]

    targets = (
        # staff Monday, identical ventilation Tue-Thu, short Friday
        week(w44, [160.0, 145.0, 145.0, 145.0, 129.5, 41.0, 38.0])
        # normal weeks vary with lecture load; school-day means 211 and 196.5
        + week(w47, [205.0, 223.0, 218.0, 211.0, 198.0, 47.0, 42.0])
        + week(w50, [193.0, 206.0, 201.5, 196.0, 186.0, 55.0, 43.0])
    )
    return SimScenario(
        seed=seed,
        building_id="skola",
        timezone="Europe/Stockholm",
        building_name="Technical high school, Soderhamn",
        main_meter="skola-main",
        day_targets=tuple(targets),
        holidays=tuple(date(2018, 10, 29) + timedelta(days=i) for i in range(5)),
    )


def hall_lighting_scenario(seed: int = 20190312, day: date = date(2019, 3, 12)) -> SimScenario:
    """Mediterranean school hall: daylight over 400 lux 10:00-17:00 while the
    lighting circuit draws 4.9 kW; retained safety level is 1.9 kW."""
    windows_bright = (LuxWindow(day=day, above_from=time(10, 0), above_to=time(17, 0),
                                high=520.0, low=120.0),)
    windows_shaded = (LuxWindow(day=day, above_from=time(11, 0), above_to=time(16, 0),
                                high=430.0, low=90.0),)
    return SimScenario(
        seed=seed,
        building_id="liceo",
        timezone="Europe/Rome",
        building_name="High school hall, lighting study",
        main_meter="liceo-main",
        day_targets=(DayTarget(day=day, kwh=310.0),),
        lux_sensors=(
            LuxSensorSpec(sensor_id="hall-lux-south", room="hall",
                          orientation_note="south-facing, direct sun after 10:00",
                          windows=windows_bright),
            LuxSensorSpec(sensor_id="hall-lux-north", room="hall",
                          orientation_note="north-facing, shaded",
                          windows=windows_shaded),
        ),
        lights=(LightsSpec(sensor_id="hall-lights", room="hall",
                           schedule=(LightsSchedule(day=day, on_from=time(7, 30),
                                                    on_to=time(18, 30),
                                                    power_w=4900.0),)),),
    )


def weekend_contrast_scenario(seed: int = 20190107) -> SimScenario:
    """Greek school over 114 days: weekdays around 367 kWh, weekends 119 kWh,
    a weekend/weekday ratio close to one third."""
    start = date(2019, 1, 7)
    targets = []
    for i in range(114):
        day = start + timedelta(days=i)
        targets.append(DayTarget(day=day, kwh=119.0 if day.weekday() >= 5 else 367.0))
    return SimScenario(
        seed=seed,
        building_id="gymnasio",
        timezone="Europe/Athens",
        building_name="High school, weekend baseload study",
        main_meter="gymnasio-main",
        power_step_seconds=900,
        day_targets=tuple(targets),
    )


BUILTIN_SCENARIOS = {
    "soderhamn": soderhamn_scenario,
    "hall-lighting": hall_lighting_scenario,
    "weekend-contrast": weekend_contrast_scenario,
}
