"""Shared builders for telemetry fixtures."""
from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from enflex.store import TelemetryStore
from enflex.types import Building, KIND_UNITS, Reading, Sensor

UTC = timezone.utc


def utc(y, m, d, hh=0, mm=0, ss=0):
    return datetime(y, m, d, hh, mm, ss, tzinfo=UTC)


def reading(sensor_id, ts, value, kind="power"):
    return Reading(sensor_id=sensor_id, timestamp=ts, value=value,
                   kind=kind, unit=KIND_UNITS[kind])


def sampled(sensor_id, start, step_seconds, values, kind="power"):
    """Readings at start, start+step, ... with the given values."""
    step = timedelta(seconds=step_seconds)
    return [reading(sensor_id, start + i * step, v, kind=kind)
            for i, v in enumerate(values)]


@pytest.fixture
def memory_store():
    store = TelemetryStore()
    store.add_building(Building(building_id="bld", timezone="UTC"))
    store.add_sensor(Sensor(sensor_id="main", kind="power", building_id="bld"))
    return store
