#!/usr/bin/env python3
"""Daylight lighting waste on the simulated Mediterranean school hall.

Generates one bright day, runs the 400 lux detector against the lighting
circuit, and reports the recoverable energy; then scans a run of identical
days to show the recurrence count."""
import sys
from datetime import date, timedelta, time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from enflex.engine import AnalyticsEngine
from enflex.simulate import (
    DayTarget,
    LightsSchedule,
    LightsSpec,
    LuxSensorSpec,
    LuxWindow,
    SimScenario,
    hall_lighting_scenario,
    simulate_lines,
)
from enflex.store import TelemetryStore
from enflex.waste import annotate_recurrence
from enflex.wire import ingest_lines


def recurring_scenario(days: int = 20) -> SimScenario:
    base = hall_lighting_scenario()
    first = date(2019, 3, 4)
    dates = [first + timedelta(days=i) for i in range(days)]
    return SimScenario(
        seed=base.seed,
        building_id=base.building_id,
        timezone=base.timezone,
        main_meter=base.main_meter,
        day_targets=tuple(DayTarget(day=d, kwh=310.0) for d in dates),
        lux_sensors=(LuxSensorSpec(
            sensor_id="hall-lux-south", room="hall",
            windows=tuple(LuxWindow(day=d, above_from=time(10, 0),
                                    above_to=time(17, 0), high=520.0, low=120.0)
                          for d in dates)),),
        lights=(LightsSpec(
            sensor_id="hall-lights", room="hall",
            schedule=tuple(LightsSchedule(day=d, on_from=time(7, 30),
                                          on_to=time(18, 30), power_w=4900.0)
                           for d in dates)),),
    )


def main() -> int:
    scenario = recurring_scenario()
    store = TelemetryStore()
    scenario.register(store)
    ingest_lines(store, simulate_lines(scenario))
    engine = AnalyticsEngine(store)

    intervals = []
    for target in scenario.day_targets:
        report = engine.detect_waste("liceo", target.day, lux_threshold=400.0,
                                     lights_on_floor_kw=1.0, minimal_power_kw=1.9)
        intervals.extend(report.intervals)

    annotated = annotate_recurrence(intervals)
    first = annotated[0]
    print(f"zone '{first.zone}': {len(annotated)} daily intervals detected")
    print(f"typical interval {first.start:%H:%M}-{first.end:%H:%M} UTC, "
          f"{first.duration_hours:.1f} h")
    print(f"usual draw {first.usual_power_kw:.1f} kW, retained "
          f"{first.minimal_power_kw:.1f} kW, excess {first.excess_power_kw:.1f} kW")
    print(f"recoverable {first.estimated_daily_savings_kwh:.1f} kWh per day, "
          f"recurring on {first.recurrence_count} of {len(scenario.day_targets)} days")
    total = sum(iv.estimated_daily_savings_kwh for iv in annotated)
    print(f"total over the run: {total:.0f} kWh")
    return 0


if __name__ == "__main__":
    sys.exit(main())
