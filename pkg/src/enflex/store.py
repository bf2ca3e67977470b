"""Append-only telemetry store with an in-memory index and snapshot reads.

Layout on disk (when a path is given):

    <path>/registry.json   buildings and sensors
    <path>/readings.csv    wire-format reading lines, append-only

Appends to distinct sensors take distinct locks and never contend on the
index; the shared log file is guarded by its own short-lived lock.  All
analytical reads go through :meth:`TelemetryStore.snapshot`, which copies
each sensor's series into immutable tuples so results are deterministic
regardless of concurrent ingestion.
"""
from __future__ import annotations

import bisect
import json
import threading
from dataclasses import dataclass
from datetime import date, datetime
from pathlib import Path
from typing import Iterable, Iterator

from .errors import DuplicateReading, KindMismatch, UnknownBuilding, UnknownSensor
from .types import Building, Reading, Sensor

REGISTRY_FILE = "registry.json"
LOG_FILE = "readings.csv"


class _SensorSeries:
    """Sorted reading series for one sensor, guarded by its own lock."""

    __slots__ = ("lock", "times", "items")

    def __init__(self):
        self.lock = threading.Lock()
        self.times: list[datetime] = []
        self.items: list[Reading] = []

    def insert(self, reading: Reading) -> None:
        with self.lock:
            ts = reading.timestamp
            if not self.times or ts > self.times[-1]:
                self.times.append(ts)
                self.items.append(reading)
                return
            idx = bisect.bisect_left(self.times, ts)
            if idx < len(self.times) and self.times[idx] == ts:
                raise DuplicateReading(f"{reading.sensor_id} @ {ts.isoformat()}")
            self.times.insert(idx, ts)
            self.items.insert(idx, reading)

    def freeze(self) -> tuple[Reading, ...]:
        with self.lock:
            return tuple(self.items)


class StoreSnapshot:
    """Immutable view of the store taken at a point in time."""

    def __init__(self, buildings: dict[str, Building], sensors: dict[str, Sensor],
                 series: dict[str, tuple[Reading, ...]]):
        self._buildings = buildings
        self._sensors = sensors
        self._series = series

    def building(self, building_id: str) -> Building:
        try:
            return self._buildings[building_id]
        except KeyError:
            raise UnknownBuilding(building_id) from None

    def buildings(self) -> list[Building]:
        return sorted(self._buildings.values(), key=lambda b: b.building_id)

    def sensor(self, sensor_id: str) -> Sensor:
        try:
            return self._sensors[sensor_id]
        except KeyError:
            raise UnknownSensor(sensor_id) from None

    def sensors(self, building_id: str | None = None, *, kind: str | None = None,
                circuit: str | None = None, room: str | None = None) -> list[Sensor]:
        out = []
        for s in self._sensors.values():
            if building_id is not None and s.building_id != building_id:
                continue
            if kind is not None and s.kind != kind:
                continue
            if circuit is not None and s.circuit != circuit:
                continue
            if room is not None and s.room != room:
                continue
            out.append(s)
        return sorted(out, key=lambda s: s.sensor_id)

    def series(self, sensor_id: str) -> tuple[Reading, ...]:
        self.sensor(sensor_id)
        return self._series.get(sensor_id, ())

    def main_meters(self, building_id: str) -> list[Sensor]:
        self.building(building_id)
        return [s for s in self.sensors(building_id, circuit="main")
                if s.kind in ("power", "energy_counter")]

    def is_empty(self) -> bool:
        return not any(self._series.values())

    def export_lines(self) -> Iterator[str]:
        """Wire-format lines ordered by (sensor_id, timestamp)."""
        from .wire import format_reading
        for sensor_id in sorted(self._series):
            for reading in self._series[sensor_id]:
                yield format_reading(reading)


@dataclass(frozen=True)
class AppendSummary:
    accepted: int = 0
    duplicates: int = 0


class TelemetryStore:
    """Reading storage plus the building/sensor registry.

    A ``path`` of None keeps everything in memory (tests, simulations); with
    a path, registrations persist to registry.json and accepted readings are
    appended to the wire-format log, which is replayed on open.
    """

    def __init__(self, path: str | Path | None = None):
        self._registry_lock = threading.RLock()
        self._log_lock = threading.Lock()
        self._buildings: dict[str, Building] = {}
        self._sensors: dict[str, Sensor] = {}
        self._series: dict[str, _SensorSeries] = {}
        self._path = Path(path) if path is not None else None
        self._log_handle = None
        if self._path is not None:
            self._path.mkdir(parents=True, exist_ok=True)
            self._load_registry()
            self._replay_log()
            self._log_handle = open(self._path / LOG_FILE, "a", encoding="utf-8")

    # -- registry ---------------------------------------------------------

    def add_building(self, building: Building) -> None:
        with self._registry_lock:
            self._buildings[building.building_id] = building
            self._save_registry()

    def add_sensor(self, sensor: Sensor) -> None:
        with self._registry_lock:
            if sensor.building_id not in self._buildings:
                raise UnknownBuilding(sensor.building_id)
            self._sensors[sensor.sensor_id] = sensor
            self._series.setdefault(sensor.sensor_id, _SensorSeries())
            self._save_registry()

    def building(self, building_id: str) -> Building:
        with self._registry_lock:
            try:
                return self._buildings[building_id]
            except KeyError:
                raise UnknownBuilding(building_id) from None

    def has_building(self, building_id: str) -> bool:
        with self._registry_lock:
            return building_id in self._buildings

    def sensor(self, sensor_id: str) -> Sensor:
        with self._registry_lock:
            try:
                return self._sensors[sensor_id]
            except KeyError:
                raise UnknownSensor(sensor_id) from None

    # -- writes -----------------------------------------------------------

    def append(self, reading: Reading, *, flush: bool = True) -> None:
        """Validate against the registry, index, and log one reading.

        Raises UnknownSensor, KindMismatch, or DuplicateReading; storage is
        untouched on any failure.
        """
        with self._registry_lock:
            sensor = self._sensors.get(reading.sensor_id)
            if sensor is None:
                raise UnknownSensor(reading.sensor_id)
            series = self._series[reading.sensor_id]
        if sensor.kind != reading.kind:
            raise KindMismatch(
                f"{reading.sensor_id} registered as {sensor.kind}, got {reading.kind}")
        series.insert(reading)
        self._log(reading, flush=flush)

    def append_many(self, readings: Iterable[Reading]) -> AppendSummary:
        """Append readings already known to be valid, skipping duplicates."""
        accepted = duplicates = 0
        for reading in readings:
            try:
                self.append(reading, flush=False)
                accepted += 1
            except DuplicateReading:
                duplicates += 1
        self.flush()
        return AppendSummary(accepted=accepted, duplicates=duplicates)

    def flush(self) -> None:
        if self._log_handle is not None:
            with self._log_lock:
                self._log_handle.flush()

    def close(self) -> None:
        if self._log_handle is not None:
            with self._log_lock:
                self._log_handle.close()
                self._log_handle = None

    # -- reads ------------------------------------------------------------

    def snapshot(self) -> StoreSnapshot:
        with self._registry_lock:
            buildings = dict(self._buildings)
            sensors = dict(self._sensors)
            series_refs = dict(self._series)
        frozen = {sid: s.freeze() for sid, s in series_refs.items()}
        return StoreSnapshot(buildings, sensors, frozen)

    # -- persistence ------------------------------------------------------

    def _log(self, reading: Reading, *, flush: bool) -> None:
        if self._log_handle is None:
            return
        from .wire import format_reading
        line = format_reading(reading)
        with self._log_lock:
            self._log_handle.write(line + "\n")
            if flush:
                self._log_handle.flush()

    def _save_registry(self) -> None:
        if self._path is None:
            return
        payload = {
            "buildings": [
                {
                    "building_id": b.building_id,
                    "timezone": b.timezone,
                    "name": b.name,
                    "holidays": sorted(d.isoformat() for d in b.holidays),
                }
                for b in sorted(self._buildings.values(), key=lambda b: b.building_id)
            ],
            "sensors": [
                {
                    "sensor_id": s.sensor_id,
                    "kind": s.kind,
                    "building_id": s.building_id,
                    "room": s.room,
                    "orientation_note": s.orientation_note,
                    "circuit": s.circuit,
                }
                for s in sorted(self._sensors.values(), key=lambda s: s.sensor_id)
            ],
        }
        tmp = self._path / (REGISTRY_FILE + ".tmp")
        tmp.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
        tmp.replace(self._path / REGISTRY_FILE)

    def _load_registry(self) -> None:
        reg = self._path / REGISTRY_FILE
        if not reg.exists():
            return
        payload = json.loads(reg.read_text(encoding="utf-8"))
        for b in payload.get("buildings", []):
            self._buildings[b["building_id"]] = Building(
                building_id=b["building_id"],
                timezone=b.get("timezone", "UTC"),
                name=b.get("name"),
                holidays=frozenset(date.fromisoformat(d) for d in b.get("holidays", [])),
            )
        for s in payload.get("sensors", []):
            sensor = Sensor(
                sensor_id=s["sensor_id"],
                kind=s["kind"],
                building_id=s["building_id"],
                room=s.get("room"),
                orientation_note=s.get("orientation_note"),
                circuit=s.get("circuit"),
            )
            self._sensors[sensor.sensor_id] = sensor
            self._series.setdefault(sensor.sensor_id, _SensorSeries())

    def _replay_log(self) -> None:
        log = self._path / LOG_FILE
        if not log.exists():
            return
        from .wire import parse_line
        with open(log, encoding="utf-8") as fh:
            for raw in fh:
                raw = raw.rstrip("\n")
                if not raw:
                    continue
                reading = parse_line(raw)
                series = self._series.get(reading.sensor_id)
                if series is None:
                    # sensor deregistration is unsupported; tolerate orphans
                    continue
                series.insert(reading)
