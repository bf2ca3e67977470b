"""Core telemetry records: buildings, sensors, readings, daily rollups."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from zoneinfo import ZoneInfo

UTC = timezone.utc

#: unit each reading kind must carry
KIND_UNITS = {
    "power": "W",
    "energy_counter": "Wh",
    "luminosity": "lux",
    "temperature": "celsius",
    "humidity": "percent",
}

#: kinds whose values may never go negative
NONNEGATIVE_KINDS = frozenset({"power", "energy_counter", "luminosity"})

#: kinds that meter whole-building or per-circuit electricity
METER_KINDS = frozenset({"power", "energy_counter"})

CIRCUITS = ("main", "lighting", "other")

DAILY_FLAGS = frozenset({"holiday", "weekend", "anomalous", "occupied_offhours"})


def _check_identifier(name: str, value: str) -> None:
    if not value or any(c in value for c in (",", "\n", "\r")):
        raise ValueError(f"{name} must be non-empty and free of commas/newlines: {value!r}")


@dataclass(frozen=True, slots=True)
class Reading:
    """One timestamped sensor observation.

    Timestamps are timezone-aware UTC instants at second precision; values
    must be finite and, for power/counter/luminosity kinds, non-negative.
    """

    sensor_id: str
    timestamp: datetime
    value: float
    kind: str
    unit: str

    def __post_init__(self):
        _check_identifier("sensor_id", self.sensor_id)
        if self.kind not in KIND_UNITS:
            raise ValueError(f"unknown kind: {self.kind!r}")
        if self.unit != KIND_UNITS[self.kind]:
            raise ValueError(f"unit {self.unit!r} does not match kind {self.kind!r}")
        value = float(self.value)
        if not math.isfinite(value):
            raise ValueError(f"value must be finite, got {self.value!r}")
        if self.kind in NONNEGATIVE_KINDS and value < 0:
            raise ValueError(f"{self.kind} value must be >= 0, got {value}")
        object.__setattr__(self, "value", value)
        ts = self.timestamp
        if ts.tzinfo is None:
            raise ValueError("timestamp must be timezone-aware")
        ts = ts.astimezone(UTC)
        if ts.microsecond != 0:
            raise ValueError("timestamps carry second precision only")
        object.__setattr__(self, "timestamp", ts)


@dataclass(frozen=True, slots=True)
class Sensor:
    """A registered sensing point.

    ``circuit`` distinguishes whole-building main meters from sub-circuit
    meters (e.g. hall lighting) so daily rollups never double-count; it is
    only meaningful for power/energy_counter kinds.  ``orientation_note``
    records placement caveats for luminosity sensors.
    """

    sensor_id: str
    kind: str
    building_id: str
    room: str | None = None
    orientation_note: str | None = None
    circuit: str | None = None

    def __post_init__(self):
        _check_identifier("sensor_id", self.sensor_id)
        _check_identifier("building_id", self.building_id)
        if self.kind not in KIND_UNITS:
            raise ValueError(f"unknown kind: {self.kind!r}")
        circuit = self.circuit
        if circuit is None:
            circuit = "main" if self.kind in METER_KINDS else "other"
        if circuit not in CIRCUITS:
            raise ValueError(f"unknown circuit: {circuit!r}")
        if circuit != "other" and self.kind not in METER_KINDS:
            raise ValueError(f"circuit {circuit!r} only applies to meter kinds")
        object.__setattr__(self, "circuit", circuit)


@dataclass(frozen=True, slots=True)
class Building:
    """A monitored building: its identifier, civil timezone and holidays.

    The building-local timezone owns calendar-day boundaries for every
    daily figure reported in kWh/day.
    """

    building_id: str
    timezone: str = "UTC"
    name: str | None = None
    holidays: frozenset[date] = field(default_factory=frozenset)

    def __post_init__(self):
        _check_identifier("building_id", self.building_id)
        ZoneInfo(self.timezone)  # fail fast on bad tz names
        object.__setattr__(self, "holidays", frozenset(self.holidays))

    @property
    def tzinfo(self) -> ZoneInfo:
        return ZoneInfo(self.timezone)

    def day_window(self, day: date) -> tuple[datetime, datetime]:
        """UTC instants spanning the building-local calendar day."""
        tz = self.tzinfo
        start = datetime(day.year, day.month, day.day, tzinfo=tz).astimezone(UTC)
        nxt = day.fromordinal(day.toordinal() + 1)
        end = datetime(nxt.year, nxt.month, nxt.day, tzinfo=tz).astimezone(UTC)
        return start, end


@dataclass(frozen=True, slots=True)
class DailyEnergy:
    """One calendar day's metered consumption in kWh.

    ``kwh`` is None when no meter produced data that day; ``coverage`` is the
    fraction of the local day actually covered by readings.
    """

    building_id: str
    day: date
    kwh: float | None
    coverage: float
    flags: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.kwh is not None:
            kwh = float(self.kwh)
            if not math.isfinite(kwh) or kwh < 0:
                raise ValueError(f"kwh must be finite and >= 0, got {self.kwh!r}")
            object.__setattr__(self, "kwh", kwh)
        cov = float(self.coverage)
        if cov < -1e-9 or cov > 1 + 1e-9:
            raise ValueError(f"coverage must lie in [0, 1], got {cov}")
        object.__setattr__(self, "coverage", min(1.0, max(0.0, cov)))
        flags = frozenset(self.flags)
        unknown = flags - DAILY_FLAGS
        if unknown:
            raise ValueError(f"unknown flags: {sorted(unknown)}")
        object.__setattr__(self, "flags", flags)

    @property
    def weekend(self) -> bool:
        return "weekend" in self.flags


def day_flags(day: date, *, holidays: frozenset[date] = frozenset(),
              anomalies: frozenset[date] = frozenset()) -> frozenset[str]:
    """Calendar-derived flags for a building-local date."""
    flags = set()
    if day.weekday() >= 5:
        flags.add("weekend")
    if day in holidays:
        flags.add("holiday")
    if day in anomalies:
        flags.add("anomalous")
    return frozenset(flags)
