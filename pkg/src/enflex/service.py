"""HTTP surface over the analytics engine.

Every analysis body is produced by the same payload builders the CLI uses
and rendered through the same canonical JSON dump, so the two paths agree
byte for byte.  The service keeps no per-request state beyond the store and
the saved profiles/baselines/pins, so a restart never changes a result.

Error mapping: 404 unknown building, 401 bad ingest token, 400 broken
ingest framing, 422 for every violated analysis precondition with a
machine-readable ``error`` code.
"""
from __future__ import annotations

from datetime import date, datetime
from pathlib import Path

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .engine import AnalyticsEngine
from .errors import AnalyticsError, UnknownBuilding
from .methodology import DateRange, Substitution
from .serialize import (
    baseline_payload,
    building_payload,
    building_profile_from_payload,
    contrast_payload,
    intervention_payload,
    live_payload,
    profile_payload,
    progress_payload,
    render_json,
    sensor_payload,
    waste_report_payload,
    week_payload,
)
from .types import UTC
from .wire import ingest_lines, parse_timestamp


def json_response(payload, status_code: int = 200) -> Response:
    return Response(content=render_json(payload), status_code=status_code,
                    media_type="application/json")


def _error_status(exc: AnalyticsError) -> int:
    if isinstance(exc, UnknownBuilding):
        return 404
    return 422


def _parse_instant(text: str, building, *, end_of_day: bool = False) -> datetime:
    """Query instants: a full UTC instant or a building-local date."""
    try:
        day = date.fromisoformat(text)
    except ValueError:
        pass
    else:
        start, end = building.day_window(day)
        return end if end_of_day else start
    try:
        return parse_timestamp(text)
    except Exception:
        raise ValueError(f"bad instant {text!r}; use YYYY-MM-DD or ...T..:..:..Z") from None


def _parse_date(text: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise ValueError(f"bad date {text!r}; use YYYY-MM-DD") from None


def _substitutions(items) -> list[Substitution]:
    subs = []
    for item in items or ():
        subs.append(Substitution(
            day=_parse_date(item["date"]),
            donor_days=tuple(_parse_date(d) for d in item.get("donor_dates", ())),
            reason=item.get("reason", "")))
    return subs


def create_app(engine: AnalyticsEngine, *, ingest_token: str,
               static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="enflex", docs_url=None, redoc_url=None)

    @app.exception_handler(AnalyticsError)
    async def analytics_error(request: Request, exc: AnalyticsError):
        return JSONResponse(status_code=_error_status(exc),
                            content={"error": exc.code, "detail": str(exc)})

    @app.exception_handler(ValueError)
    async def value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=422,
                            content={"error": "validation", "detail": str(exc)})

    # -- catalogue -----------------------------------------------------------

    @app.get("/v1/buildings")
    def buildings():
        snap = engine.store.snapshot()
        out = []
        for building in snap.buildings():
            profile = engine.latest_profile(building.building_id)
            out.append({
                **building_payload(building),
                "sensors": [sensor_payload(s)
                            for s in snap.sensors(building.building_id)],
                "profile": profile_payload(profile) if profile else None,
                "baselines": [m.baseline_id
                              for m in engine.baselines_for(building.building_id)],
                "pinned": engine.pinned(building.building_id),
                "lux_zones": engine.lux_zones(building.building_id),
            })
        return json_response(out)

    # -- step 1: profile -------------------------------------------------------

    @app.post("/v1/buildings/{building_id}/profile")
    async def register_profile(building_id: str, request: Request):
        body = await request.json()
        profile = building_profile_from_payload(body, building_id=building_id)
        registered = engine.register_profile(profile)
        return json_response(profile_payload(registered), status_code=201)

    @app.get("/v1/buildings/{building_id}/profile")
    def get_profile(building_id: str):
        engine.store.building(building_id)
        registered = engine.latest_profile(building_id)
        if registered is None:
            return JSONResponse(status_code=404,
                                content={"error": "missing_profile",
                                         "detail": f"no profile for {building_id!r}"})
        return json_response(profile_payload(registered))

    # -- energy series -----------------------------------------------------------

    @app.get("/v1/buildings/{building_id}/energy")
    def energy(building_id: str, resolution: str = "1day",
               from_: str | None = Query(None, alias="from"),
               to: str | None = Query(None)):
        building = engine.store.building(building_id)
        if from_ is None or to is None:
            raise ValueError("query parameters 'from' and 'to' are required")
        start = _parse_instant(from_, building)
        end = _parse_instant(to, building, end_of_day=True)
        series = engine.energy_series(building_id, resolution, start, end)
        return json_response({"building_id": building_id, "resolution": resolution,
                              "series": series})

    # -- step 2: baseline ------------------------------------------------------------

    @app.post("/v1/buildings/{building_id}/baseline")
    async def baseline(building_id: str, request: Request):
        engine.store.building(building_id)
        body = await request.json()
        period = DateRange(_parse_date(body["start"]), _parse_date(body["end"]))
        model = engine.compute_baseline(
            building_id, period, _substitutions(body.get("anomalies")),
            day_set=body.get("day_set", "school_days_only"),
            save=body.get("save", True))
        return json_response(baseline_payload(model))

    # -- step 3: week analysis ----------------------------------------------------------

    @app.post("/v1/buildings/{building_id}/weeks/{week}/analysis")
    async def week_analysis(building_id: str, week: str, request: Request):
        engine.store.building(building_id)
        body = await request.json() if int(request.headers.get("content-length") or 0) else {}
        analysis = engine.analyze_week(building_id, week,
                                       body.get("baseline_id"),
                                       day_set=body.get("day_set"))
        return json_response(week_payload(analysis))

    # -- step 4: intervention --------------------------------------------------------------

    @app.post("/v1/buildings/{building_id}/interventions")
    async def interventions(building_id: str, request: Request):
        engine.store.building(building_id)
        body = await request.json()
        shared = body.get("baseline_id")
        comparison_spec = body["comparison"]
        saving_spec = body["saving"]
        comparison_baseline = comparison_spec.get("baseline_id", shared)
        saving_baseline = saving_spec.get("baseline_id", shared)
        comparison = engine.analyze_week(building_id, comparison_spec["week"],
                                         comparison_baseline)
        saving = engine.analyze_week(building_id, saving_spec["week"],
                                     saving_baseline)
        result = engine.evaluate_weeks(building_id, comparison, saving,
                                       notes=body.get("notes", ""))
        engine.pin_intervention(building_id, result)
        return json_response(intervention_payload(result))

    # -- waste, contrast, progress, live --------------------------------------------------

    @app.get("/v1/buildings/{building_id}/waste")
    def waste(building_id: str, request: Request, day: str | None = None,
              threshold: float | None = None, zone: str | None = None,
              floor_kw: float = 0.1, minimal_kw: float | None = None,
              aggregation: str = "max"):
        if day is None or threshold is None:
            raise ValueError("query parameters 'day' and 'threshold' are required")
        report = engine.detect_waste(building_id, _parse_date(day),
                                     lux_threshold=threshold, zone=zone,
                                     lights_on_floor_kw=floor_kw,
                                     minimal_power_kw=minimal_kw,
                                     aggregation=aggregation)
        return json_response(waste_report_payload(report))

    @app.get("/v1/buildings/{building_id}/contrast")
    def contrast(building_id: str, request: Request, alert_ratio: float = 0.25):
        start_text = request.query_params.get("from")
        end_text = request.query_params.get("to")
        if not start_text or not end_text:
            raise ValueError("query parameters 'from' and 'to' are required")
        period = DateRange(_parse_date(start_text), _parse_date(end_text))
        result = engine.occupancy_contrast(building_id, period,
                                           alert_ratio=alert_ratio)
        return json_response(contrast_payload(result))

    @app.get("/v1/buildings/{building_id}/progress")
    def progress(building_id: str, weeks: str | None = None,
                 comparison: str | None = None, baseline_id: str | None = None):
        engine.store.building(building_id)
        week_list = [w for w in (weeks.split(",") if weeks else []) if w]
        points = engine.track_progress(
            building_id, week_list or None,
            baseline_id=baseline_id, comparison_week=comparison)
        pin = engine.pinned(building_id) or {}
        return json_response({
            "building_id": building_id,
            "comparison_week": comparison or pin.get("comparison_week"),
            "baseline_id": baseline_id or pin.get("baseline_id"),
            "points": progress_payload(points),
        })

    @app.get("/v1/buildings/{building_id}/live")
    def live(building_id: str, at: str | None = None):
        instant = parse_timestamp(at) if at else None
        status = engine.live(building_id, at=instant)
        return json_response(live_payload(status))

    # -- ingestion ----------------------------------------------------------------------

    @app.post("/v1/readings")
    async def readings(request: Request):
        auth = request.headers.get("authorization", "")
        if auth != f"Bearer {ingest_token}":
            return JSONResponse(status_code=401,
                                content={"error": "unauthorized",
                                         "detail": "bad or missing bearer token"})
        body = await request.body()
        lines: list[str] = []
        framing_error = None
        for raw in body.split(b"\n"):
            try:
                lines.append(raw.decode("utf-8"))
            except UnicodeDecodeError:
                framing_error = f"undecodable bytes after line {len(lines)}"
                break
        summary = ingest_lines(engine.store, lines)
        if framing_error is not None:
            return json_response({"error": "framing", "detail": framing_error,
                                  **summary.to_jsonable()}, status_code=400)
        return json_response(summary.to_jsonable(), status_code=202)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="dashboard")

    return app


def run(engine: AnalyticsEngine, *, ingest_token: str, host: str = "127.0.0.1",
        port: int = 8000, static_dir: str | Path | None = None) -> None:
    import uvicorn

    app = create_app(engine, ingest_token=ingest_token, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
