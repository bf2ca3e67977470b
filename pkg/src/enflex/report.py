"""Assembled analysis report: one document per building.

The matrix section mirrors the workflow's summary table: rows Baseline /
Comparison / Energy saving, columns consumption and difference with the
baseline.  All numbers stay at full precision in the document; the text
renderer rounds for display only.
"""
from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime

from .engine import AnalyticsEngine, WasteReport
from .errors import AnalyticsError, InsufficientCoverage, NoData
from .methodology import (
    BaselineModel,
    DateRange,
    InterventionResult,
    ProgressPoint,
    RegisteredProfile,
    WeekAnalysis,
)
from .serialize import (
    baseline_payload,
    contrast_payload,
    intervention_payload,
    iso_instant,
    percent_text,
    profile_payload,
    progress_payload,
    waste_report_payload,
    week_payload,
)
from .types import UTC
from .waste import OccupancyContrast


@dataclass(frozen=True)
class ReportDocument:
    building_id: str
    generated_at: datetime
    profile: RegisteredProfile | None = None
    baseline: BaselineModel | None = None
    comparison: WeekAnalysis | None = None
    saving: WeekAnalysis | None = None
    intervention: InterventionResult | None = None
    waste: WasteReport | None = None
    contrast: OccupancyContrast | None = None
    progress: tuple[ProgressPoint, ...] = ()


def build_report(engine: AnalyticsEngine, building_id: str, *,
                 waste_day: date | None = None, lux_threshold: float | None = None,
                 minimal_power_kw: float | None = None,
                 lights_on_floor_kw: float = 0.1,
                 contrast_period: DateRange | None = None,
                 generated_at: datetime | None = None) -> ReportDocument:
    """Collect every available section for a building.

    Raises NoData when the building has no telemetry at all; optional
    sections that cannot be computed are simply omitted.
    """
    snap = engine.store.snapshot()
    building = snap.building(building_id)
    has_readings = any(snap.series(s.sensor_id)
                       for s in snap.sensors(building_id))
    if not has_readings:
        raise NoData(f"no data for building {building_id!r}")

    profile = engine.latest_profile(building_id)

    baseline = comparison = saving = intervention = None
    pin = engine.pinned(building_id)
    try:
        baseline = engine.resolve_baseline(building_id)
    except AnalyticsError:
        baseline = None
    if pin and baseline is not None:
        try:
            comparison = engine.analyze_week(building_id, pin["comparison_week"],
                                             baseline.baseline_id)
            saving = engine.analyze_week(building_id, pin["saving_week"],
                                         baseline.baseline_id)
            intervention = engine.evaluate_weeks(building_id, comparison, saving)
        except AnalyticsError:
            comparison = saving = intervention = None

    waste = None
    if waste_day is not None and lux_threshold is not None:
        waste = engine.detect_waste(building_id, waste_day,
                                    lux_threshold=lux_threshold,
                                    lights_on_floor_kw=lights_on_floor_kw,
                                    minimal_power_kw=minimal_power_kw)

    contrast = None
    if contrast_period is None:
        contrast_period = _data_range(engine, building_id)
    if contrast_period is not None:
        try:
            contrast = engine.occupancy_contrast(building_id, contrast_period)
        except (InsufficientCoverage, AnalyticsError):
            contrast = None

    progress: tuple[ProgressPoint, ...] = ()
    if pin:
        try:
            progress = tuple(engine.track_progress(building_id))
        except AnalyticsError:
            progress = ()

    return ReportDocument(
        building_id=building_id,
        generated_at=generated_at or datetime.now(tz=UTC).replace(microsecond=0),
        profile=profile, baseline=baseline, comparison=comparison,
        saving=saving, intervention=intervention, waste=waste,
        contrast=contrast, progress=progress)


def _data_range(engine: AnalyticsEngine, building_id: str) -> DateRange | None:
    snap = engine.store.snapshot()
    building = snap.building(building_id)
    tz = building.tzinfo
    first = last = None
    for sensor in snap.main_meters(building_id):
        series = snap.series(sensor.sensor_id)
        if not series:
            continue
        lo = series[0].timestamp.astimezone(tz).date()
        hi = series[-1].timestamp.astimezone(tz).date()
        first = lo if first is None or lo < first else first
        last = hi if last is None or hi > last else last
    if first is None:
        return None
    return DateRange(first, last)


def report_payload(doc: ReportDocument) -> dict:
    return {
        "building_id": doc.building_id,
        "generated_at": iso_instant(doc.generated_at),
        "profile": profile_payload(doc.profile) if doc.profile else None,
        "baseline": baseline_payload(doc.baseline) if doc.baseline else None,
        "matrix": _matrix_rows(doc),
        "intervention": intervention_payload(doc.intervention)
        if doc.intervention else None,
        "waste": waste_report_payload(doc.waste) if doc.waste else None,
        "contrast": contrast_payload(doc.contrast) if doc.contrast else None,
        "progress": progress_payload(list(doc.progress)),
    }


def _matrix_rows(doc: ReportDocument) -> list[dict]:
    if doc.baseline is None:
        return []
    rows = [{"week": "Baseline", "consumption_kwh_per_day": doc.baseline.kwh_per_day,
             "difference_with_baseline": None}]
    if doc.comparison is not None:
        rows.append({"week": "Comparison",
                     "consumption_kwh_per_day": doc.comparison.mean_kwh_per_day,
                     "difference_with_baseline": doc.comparison.flexible_kwh_per_day})
    if doc.saving is not None:
        rows.append({"week": "Energy saving",
                     "consumption_kwh_per_day": doc.saving.mean_kwh_per_day,
                     "difference_with_baseline": doc.saving.flexible_kwh_per_day})
    return rows


def _fmt(value: float | None, decimals: int = 1) -> str:
    return "-" if value is None else f"{value:.{decimals}f}"


def render_text(doc: ReportDocument) -> str:
    lines: list[str] = []
    out = lines.append
    out(f"Building report: {doc.building_id}")
    out(f"Generated: {iso_instant(doc.generated_at)}")

    if doc.profile is not None:
        p = doc.profile.profile
        out("")
        out(f"Profile v{doc.profile.version} "
            f"({p.occupancy.students} students, {p.occupancy.educators} educators, "
            f"{p.timetable.weekly_hours:.0f} occupied hours/week)")
        for cp in p.consumption_points:
            out(f"  - {cp.category}: {cp.label}")
        if doc.profile.warnings:
            out(f"  warnings: {', '.join(doc.profile.warnings)}")

    if doc.baseline is not None:
        b = doc.baseline
        out("")
        out(f"Baseline {b.baseline_id}")
        out(f"  period {b.period.start} .. {b.period.end} ({b.day_set})")
        out(f"  {b.kwh_per_day:.1f} kWh/day over {len(b.member_days)} days")
        for sub in b.substitutions:
            donors = ", ".join(d.isoformat() for d in sub.donor_days)
            reason = f" ({sub.reason})" if sub.reason else ""
            out(f"  substituted {sub.day}: mean of {donors}{reason}")

    matrix = _matrix_rows(doc)
    if matrix:
        out("")
        out("Mean daily consumption (kWh/day)")
        out(f"  {'Week':<14}{'Consumption':>13}{'Difference with baseline':>28}")
        for row in matrix:
            out(f"  {row['week']:<14}"
                f"{_fmt(row['consumption_kwh_per_day']):>13}"
                f"{_fmt(row['difference_with_baseline']):>28}")

    if doc.intervention is not None:
        r = doc.intervention
        out("")
        out(f"Intervention: {r.saving.week} vs {r.comparison.week}: "
            f"reduction {percent_text(r.reduction_fraction)} "
            f"({r.absolute_saving_kwh_per_day:.1f} kWh/day of flexible load)")
        if r.notes:
            out(f"  notes: {r.notes}")

    if doc.waste is not None:
        out("")
        out(f"Lighting waste in zone '{doc.waste.zone}' on {doc.waste.day} "
            f"(threshold {doc.waste.lux_threshold:.0f} lux)")
        if not doc.waste.intervals:
            out("  none detected")
        for iv in doc.waste.intervals:
            out(f"  {iv.start:%H:%M}-{iv.end:%H:%M} UTC: "
                f"{iv.usual_power_kw:.1f} kW vs minimal {iv.minimal_power_kw:.1f} kW "
                f"-> {iv.estimated_daily_savings_kwh:.1f} kWh/day recoverable")

    if doc.contrast is not None:
        c = doc.contrast
        out("")
        out(f"Occupancy contrast {c.period.start} .. {c.period.end}: "
            f"weekdays {c.weekday_mean_kwh:.1f} kWh vs weekends "
            f"{c.weekend_mean_kwh:.1f} kWh (ratio {c.ratio:.4f}"
            f"{', ALERT' if c.alert else ''})")

    if doc.progress:
        out("")
        out("Weekly progress vs comparison week")
        for p in doc.progress:
            if p.gap:
                out(f"  {p.week}: no usable data")
            else:
                tag = f" [{p.group_tag}]" if p.group_tag else ""
                flag = " (below baseline)" if p.below_baseline else ""
                out(f"  {p.week}: flexible {p.flexible_kwh_per_day:.1f} kWh/day, "
                    f"reduction {percent_text(p.reduction_vs_comparison)}{tag}{flag}")

    return "\n".join(lines) + "\n"
