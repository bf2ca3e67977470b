"""Canonical JSON forms for analysis objects.

The CLI's ``--format json`` output and the HTTP bodies are rendered from the
same dictionaries through :func:`render_json`, so the two paths emit
byte-identical documents for identical inputs.  Full numeric precision is
kept everywhere; percent rounding exists only in presentation fields.
"""
from __future__ import annotations

import json
import math
from datetime import date, datetime

from .methodology import (
    BaselineModel,
    BuildingProfile,
    ConsumptionPoint,
    DateRange,
    InterventionResult,
    MemberDay,
    Occupancy,
    ProgressPoint,
    RegisteredProfile,
    Substitution,
    Timetable,
    WeekAnalysis,
)
from .types import Building, DailyEnergy, Sensor
from .waste import OccupancyContrast, WasteInterval


def render_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"),
                      allow_nan=False)


def _finite_or_none(value: float | None) -> float | None:
    if value is None or not math.isfinite(value):
        return None
    return value


def iso_instant(ts: datetime) -> str:
    from .wire import format_timestamp
    return format_timestamp(ts)


def percent_text(fraction: float) -> str:
    """Presentation-only rounding, e.g. 0.2098 -> '21%'."""
    return f"{round(fraction * 100):d}%"


def building_payload(building: Building) -> dict:
    return {
        "building_id": building.building_id,
        "timezone": building.timezone,
        "name": building.name,
        "holidays": sorted(d.isoformat() for d in building.holidays),
    }


def sensor_payload(sensor: Sensor) -> dict:
    return {
        "sensor_id": sensor.sensor_id,
        "kind": sensor.kind,
        "building_id": sensor.building_id,
        "room": sensor.room,
        "orientation_note": sensor.orientation_note,
        "circuit": sensor.circuit,
    }


def daily_payload(d: DailyEnergy) -> dict:
    return {
        "building_id": d.building_id,
        "date": d.day.isoformat(),
        "kwh": d.kwh,
        "coverage": d.coverage,
        "flags": sorted(d.flags),
    }


def period_payload(period: DateRange) -> dict:
    return {"start": period.start.isoformat(), "end": period.end.isoformat()}


def baseline_payload(model: BaselineModel) -> dict:
    return {
        "baseline_id": model.baseline_id,
        "building_id": model.building_id,
        "kwh_per_day": model.kwh_per_day,
        "period": period_payload(model.period),
        "day_set": model.day_set,
        "member_days": [
            {"date": m.day.isoformat(), "kwh": m.kwh, "used_as": m.used_as}
            for m in model.member_days
        ],
        "substitutions": [
            {"date": s.day.isoformat(),
             "donor_dates": [d.isoformat() for d in s.donor_days],
             "reason": s.reason}
            for s in model.substitutions
        ],
    }


def baseline_from_payload(data: dict) -> BaselineModel:
    return BaselineModel(
        building_id=data["building_id"],
        kwh_per_day=data["kwh_per_day"],
        member_days=tuple(MemberDay(day=date.fromisoformat(m["date"]), kwh=m["kwh"],
                                    used_as=m["used_as"])
                          for m in data["member_days"]),
        substitutions=tuple(Substitution(day=date.fromisoformat(s["date"]),
                                         donor_days=tuple(date.fromisoformat(d)
                                                          for d in s["donor_dates"]),
                                         reason=s.get("reason", ""))
                            for s in data["substitutions"]),
        period=DateRange(date.fromisoformat(data["period"]["start"]),
                         date.fromisoformat(data["period"]["end"])),
        day_set=data["day_set"],
    )


def week_payload(wa: WeekAnalysis) -> dict:
    return {
        "building_id": wa.building_id,
        "week": wa.week,
        "dates": [d.isoformat() for d in wa.dates],
        "daily": [daily_payload(d) for d in wa.daily],
        "mean_kwh_per_day": wa.mean_kwh_per_day,
        "flexible_kwh_per_day": wa.flexible_kwh_per_day,
        "baseline_id": wa.baseline_id,
        "baseline_kwh_per_day": wa.baseline_kwh_per_day,
        "day_set": wa.day_set,
        "below_baseline": wa.below_baseline,
    }


def intervention_payload(result: InterventionResult) -> dict:
    return {
        "comparison": week_payload(result.comparison),
        "saving": week_payload(result.saving),
        "absolute_saving_kwh_per_day": result.absolute_saving_kwh_per_day,
        "reduction_fraction": result.reduction_fraction,
        "reduction_display": percent_text(result.reduction_fraction),
        "notes": result.notes,
    }


def progress_payload(points: list[ProgressPoint]) -> list[dict]:
    return [
        {
            "week": p.week,
            "flexible_kwh_per_day": p.flexible_kwh_per_day,
            "reduction_vs_comparison": p.reduction_vs_comparison,
            "group_tag": p.group_tag,
            "below_baseline": p.below_baseline,
            "gap": p.gap,
        }
        for p in points
    ]


def waste_interval_payload(iv: WasteInterval) -> dict:
    return {
        "building_id": iv.building_id,
        "zone": iv.zone,
        "start": iso_instant(iv.start),
        "end": iso_instant(iv.end),
        "duration_hours": iv.duration_hours,
        "lux_threshold": iv.lux_threshold,
        "usual_power_kw": iv.usual_power_kw,
        "minimal_power_kw": iv.minimal_power_kw,
        "excess_power_kw": iv.excess_power_kw,
        "estimated_daily_savings_kwh": iv.estimated_daily_savings_kwh,
        "recurrence_count": iv.recurrence_count,
    }


def contrast_payload(c: OccupancyContrast) -> dict:
    return {
        "building_id": c.building_id,
        "period": period_payload(c.period),
        "weekday_mean_kwh": c.weekday_mean_kwh,
        "weekend_mean_kwh": c.weekend_mean_kwh,
        "ratio": _finite_or_none(c.ratio),
        "alert": c.alert,
        "alert_ratio": c.alert_ratio,
        "weekday_days": c.weekday_days,
        "weekend_days": c.weekend_days,
    }


def profile_payload(registered: RegisteredProfile) -> dict:
    p = registered.profile
    t = p.timetable
    return {
        "profile_id": registered.profile_id,
        "version": registered.version,
        "warnings": list(registered.warnings),
        "building_id": p.building_id,
        "consumption_points": [
            {"category": cp.category, "label": cp.label}
            for cp in p.consumption_points
        ],
        "timetable": {
            "monday": t.monday, "tuesday": t.tuesday, "wednesday": t.wednesday,
            "thursday": t.thursday, "friday": t.friday, "saturday": t.saturday,
            "sunday": t.sunday, "weekly_hours": t.weekly_hours,
        },
        "occupancy": {"students": p.occupancy.students,
                      "educators": p.occupancy.educators},
        "monitored_rooms": list(p.monitored_rooms),
    }


def building_profile_from_payload(data: dict, building_id: str | None = None) -> BuildingProfile:
    timetable = data.get("timetable", {})
    return BuildingProfile(
        building_id=building_id or data["building_id"],
        consumption_points=tuple(ConsumptionPoint(cp["category"], cp["label"])
                                 for cp in data.get("consumption_points", [])),
        timetable=Timetable(**{k: timetable.get(k, 0.0) for k in
                               ("monday", "tuesday", "wednesday", "thursday",
                                "friday", "saturday", "sunday")}),
        occupancy=Occupancy(students=data.get("occupancy", {}).get("students", 0),
                            educators=data.get("occupancy", {}).get("educators", 0)),
        monitored_rooms=tuple(data.get("monitored_rooms", ())),
    )


def profile_from_payload(data: dict) -> RegisteredProfile:
    return RegisteredProfile(profile=building_profile_from_payload(data),
                             version=data["version"],
                             profile_id=data["profile_id"],
                             warnings=tuple(data.get("warnings", ())))


def series_points(series) -> list[dict]:
    return [{"t": iso_instant(ts), "value": value} for ts, value in series]


def waste_report_payload(report) -> dict:
    return {
        "building_id": report.building_id,
        "zone": report.zone,
        "date": report.day.isoformat(),
        "lux_threshold": report.lux_threshold,
        "lights_on_floor_kw": report.lights_on_floor_kw,
        "minimal_power_kw": report.minimal_power_kw,
        "resolution_minutes": report.resolution_minutes,
        "lux_series": series_points(report.lux_series),
        "power_series": series_points(report.power_series),
        "intervals": [waste_interval_payload(iv) for iv in report.intervals],
        "total_estimated_savings_kwh": sum(
            iv.estimated_daily_savings_kwh for iv in report.intervals),
    }


def live_payload(live) -> dict:
    return {
        "building_id": live.building_id,
        "at": iso_instant(live.at),
        "date": live.local_date.isoformat(),
        "latest_power_w": live.latest_power_w,
        "latest_at": iso_instant(live.latest_at) if live.latest_at else None,
        "today_kwh": live.today_kwh,
        "today_coverage": live.today_coverage,
        "baseline_kwh_per_day": live.baseline_kwh_per_day,
    }
