#!/usr/bin/env python3
"""End-to-end run of the five-step workflow on the Swedish school fixture.

Simulates weeks 44/47/50, derives the no-class baseline with the anomalous
Monday substituted, sizes the flexible share of both measured weeks, and
prints the summary table plus the intervention verdict.
"""
import sys
from datetime import date, timedelta
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from enflex.engine import AnalyticsEngine
from enflex.methodology import (
    BuildingProfile,
    ConsumptionPoint,
    DateRange,
    Occupancy,
    Substitution,
    Timetable,
)
from enflex.report import build_report, render_text
from enflex.simulate import simulate_lines, soderhamn_scenario
from enflex.store import TelemetryStore
from enflex.wire import ingest_lines


def main() -> int:
    store = TelemetryStore()
    scenario = soderhamn_scenario()
    scenario.register(store)
    summary = ingest_lines(store, simulate_lines(scenario))
    print(f"ingested {summary.accepted} readings "
          f"({summary.rejected} rejected, {summary.duplicates} duplicates)")

    engine = AnalyticsEngine(store)
    engine.register_profile(BuildingProfile(
        building_id="skola",
        consumption_points=(
            ConsumptionPoint("teaching_equipment", "computer room"),
            ConsumptionPoint("teaching_equipment", "3D printers and laser cutters"),
            ConsumptionPoint("lighting", "classrooms and corridors"),
            ConsumptionPoint("hvac", "ventilation"),
        ),
        timetable=Timetable(monday=28, tuesday=28, wednesday=28, thursday=28,
                            friday=28),
        occupancy=Occupancy(students=1000, educators=80),
        monitored_rooms=tuple(f"classroom-{i}" for i in range(1, 9))
        + ("computer-room", "printer-room"),
    ))

    monday = date(2018, 10, 29)
    model = engine.compute_baseline(
        "skola", DateRange(monday, monday + timedelta(days=6)),
        [Substitution(day=monday,
                      donor_days=tuple(monday + timedelta(days=i) for i in (1, 2, 3)),
                      reason="staff working in the building")])
    print(f"baseline: {model.kwh_per_day:.1f} kWh/day")

    engine.evaluate_intervention(
        "skola", "2018-W47", "2018-W50", model.baseline_id,
        notes="saving week slightly more occupied (show preparations)")

    doc = build_report(engine, "skola")
    print()
    print(render_text(doc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
