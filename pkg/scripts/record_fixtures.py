#!/usr/bin/env python3
"""Record service responses as fixtures for the dashboard contract tests.

Drives the real HTTP app over the simulated fixtures and snapshots selected
bodies under frontend/fixtures/.  Rerun after changing any payload shape.
"""
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from fastapi.testclient import TestClient

from enflex.engine import AnalyticsEngine
from enflex.service import create_app
from enflex.simulate import hall_lighting_scenario, simulate_lines, soderhamn_scenario
from enflex.store import TelemetryStore
from enflex.wire import ingest_lines

FIXTURES = Path(__file__).resolve().parents[1] / "frontend" / "fixtures"

PROFILE = {
    "consumption_points": [
        {"category": "teaching_equipment", "label": "computer room"},
        {"category": "teaching_equipment", "label": "3D printers and laser cutters"},
        {"category": "lighting", "label": "classrooms and corridors"},
        {"category": "hvac", "label": "ventilation"},
    ],
    "timetable": {"monday": 28, "tuesday": 28, "wednesday": 28,
                  "thursday": 28, "friday": 28},
    "occupancy": {"students": 1000, "educators": 80},
    "monitored_rooms": ["computer-room", "printer-room"],
}

BASELINE_BODY = {
    "start": "2018-10-29",
    "end": "2018-11-04",
    "anomalies": [{
        "date": "2018-10-29",
        "donor_dates": ["2018-10-30", "2018-10-31", "2018-11-01"],
        "reason": "staff working in the building",
    }],
}


def snap(name: str, response):
    assert response.status_code < 300, (name, response.status_code, response.text)
    FIXTURES.mkdir(parents=True, exist_ok=True)
    (FIXTURES / name).write_bytes(response.content)
    print(f"wrote fixtures/{name} ({len(response.content)} bytes)")


def main() -> int:
    store = TelemetryStore()
    for scenario in (soderhamn_scenario(), hall_lighting_scenario()):
        scenario.register(store)
        ingest_lines(store, simulate_lines(scenario))
    engine = AnalyticsEngine(store)
    client = TestClient(create_app(engine, ingest_token="fixture-token"))

    client.post("/v1/buildings/skola/profile", json=PROFILE)
    baseline = client.post("/v1/buildings/skola/baseline", json=BASELINE_BODY)
    snap("baseline.json", baseline)
    baseline_id = baseline.json()["baseline_id"]

    snap("buildings.json", client.get("/v1/buildings"))
    snap("energy_week47.json", client.get(
        "/v1/buildings/skola/energy",
        params={"resolution": "1day", "from": "2018-11-19", "to": "2018-11-25"}))
    snap("live.json", client.get(
        "/v1/buildings/skola/live", params={"at": "2018-11-21T11:00:00Z"}))
    snap("week47.json", client.post(
        "/v1/buildings/skola/weeks/2018-W47/analysis",
        json={"baseline_id": baseline_id}))
    snap("intervention.json", client.post(
        "/v1/buildings/skola/interventions",
        json={"baseline_id": baseline_id,
              "comparison": {"week": "2018-W47"},
              "saving": {"week": "2018-W50"}}))
    snap("progress.json", client.get("/v1/buildings/skola/progress"))
    snap("waste.json", client.get(
        "/v1/buildings/liceo/waste",
        params={"day": "2019-03-12", "threshold": 400,
                "floor_kw": 1.0, "minimal_kw": 1.9}))

    # error bodies the UI must surface verbatim
    mismatch = client.post("/v1/buildings/skola/interventions", json={
        "comparison": {"week": "2018-W47", "baseline_id": baseline_id},
        "saving": {"week": "2018-W50", "baseline_id": "skola-bogus"},
    })
    assert mismatch.status_code == 422
    (FIXTURES / "error_unknown_baseline.json").write_bytes(mismatch.content)
    print("wrote fixtures/error_unknown_baseline.json")

    fresh_store = TelemetryStore()
    soderhamn_scenario().register(fresh_store)
    ingest_lines(fresh_store, simulate_lines(soderhamn_scenario()))
    fresh = TestClient(create_app(AnalyticsEngine(fresh_store),
                                  ingest_token="fixture-token"))
    no_baseline = fresh.post("/v1/buildings/skola/interventions", json={
        "comparison": {"week": "2018-W47"},
        "saving": {"week": "2018-W50"},
    })
    assert no_baseline.status_code == 422
    (FIXTURES / "error_no_baseline.json").write_bytes(no_baseline.content)
    print("wrote fixtures/error_no_baseline.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
