"""Command-line front end driving every analysis end to end.

Human-readable tables by default; ``--format json`` emits exactly the
service's JSON bodies.  Exit codes: 0 success, 1 validation or analysis
precondition failure, 2 I/O trouble.
"""
from __future__ import annotations

import argparse
import json
import sys
from datetime import date
from pathlib import Path

from .config import AppConfig, load_config
from .engine import AnalyticsEngine, STATE_FILE
from .errors import AnalyticsError
from .methodology import DateRange, Substitution
from .report import build_report, render_text, report_payload
from .serialize import (
    baseline_payload,
    building_profile_from_payload,
    contrast_payload,
    intervention_payload,
    live_payload,
    percent_text,
    profile_payload,
    progress_payload,
    render_json,
    waste_report_payload,
    week_payload,
)
from .simulate import BUILTIN_SCENARIOS, SimScenario, simulate_lines
from .store import TelemetryStore
from .wire import ingest_lines

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="enflex",
        description="Energy-savings analytics for instrumented school buildings")
    parser.add_argument("--config", help="INI config file (service, buildings, sensors)")
    parser.add_argument("--store", help="store directory (overrides config/STORE_PATH)")
    parser.add_argument("--format", choices=("table", "json"), default="table")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="import a wire-format CSV file into the store")
    p.add_argument("file")

    p = sub.add_parser("simulate", help="generate synthetic telemetry")
    p.add_argument("scenario",
                   help=f"scenario JSON file or one of {sorted(BUILTIN_SCENARIOS)}")
    p.add_argument("--out", help="write the stream here instead of stdout")
    p.add_argument("--ingest", action="store_true",
                   help="register the scenario's building/sensors and ingest directly")

    p = sub.add_parser("baseline", help="derive the no-class baseline (step 2)")
    p.add_argument("--building", required=True)
    p.add_argument("--start", required=True)
    p.add_argument("--end", required=True)
    p.add_argument("--anomaly", action="append", default=[],
                   metavar="DATE=DONOR+DONOR[:reason]",
                   help="substitute DATE by the mean of the donor dates")
    p.add_argument("--day-set", choices=("school_days_only", "all_days"),
                   default="school_days_only")
    p.add_argument("--profile", help="register this profile JSON first (step 1)")
    p.add_argument("--no-save", action="store_true")

    p = sub.add_parser("analyze-week", help="measure one week against a baseline (step 3)")
    p.add_argument("--building", required=True)
    p.add_argument("--week", required=True, help="e.g. 2018-W47 or w47")
    p.add_argument("--baseline", help="baseline id (defaults to the pinned/sole one)")
    p.add_argument("--day-set", choices=("school_days_only", "all_days"))

    p = sub.add_parser("evaluate", help="compare a saving week against a comparison week (step 4)")
    p.add_argument("--building", required=True)
    p.add_argument("--comparison", required=True)
    p.add_argument("--saving", required=True)
    p.add_argument("--baseline")
    p.add_argument("--notes", default="")

    p = sub.add_parser("detect-waste", help="find daylight lighting waste")
    p.add_argument("--building", required=True)
    p.add_argument("--day", required=True)
    p.add_argument("--threshold", type=float, required=True, help="lux threshold")
    p.add_argument("--zone")
    p.add_argument("--floor-kw", type=float, default=0.1,
                   help="lights considered on at or above this draw")
    p.add_argument("--minimal-kw", type=float,
                   help="retained safety-lighting level")
    p.add_argument("--aggregation", choices=("max", "median"), default="max")

    p = sub.add_parser("contrast", help="weekday vs weekend baseload")
    p.add_argument("--building", required=True)
    p.add_argument("--from", dest="start", required=True)
    p.add_argument("--to", dest="end", required=True)
    p.add_argument("--alert-ratio", type=float, default=0.25)

    p = sub.add_parser("progress", help="weekly reductions vs the pinned comparison (step 5)")
    p.add_argument("--building", required=True)
    p.add_argument("--weeks", help="comma-separated week ids; default: all weeks after the comparison")
    p.add_argument("--comparison")
    p.add_argument("--baseline")

    p = sub.add_parser("report", help="full building report")
    p.add_argument("--building", required=True)
    p.add_argument("--waste-day")
    p.add_argument("--threshold", type=float)
    p.add_argument("--minimal-kw", type=float)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int)
    p.add_argument("--token")
    p.add_argument("--static", help="directory of dashboard assets to serve")

    return parser


def _open_engine(config: AppConfig) -> AnalyticsEngine:
    store = TelemetryStore(config.store_path)
    for building in config.buildings:
        if not store.has_building(building.building_id):
            store.add_building(building)
    for sensor in config.sensors:
        store.add_sensor(sensor)
    return AnalyticsEngine(store, state_path=Path(config.store_path) / STATE_FILE)


def _parse_anomaly(text: str) -> Substitution:
    try:
        day_text, rest = text.split("=", 1)
        if ":" in rest:
            donors_text, reason = rest.split(":", 1)
        else:
            donors_text, reason = rest, ""
        donors = tuple(date.fromisoformat(d) for d in donors_text.split("+") if d)
        return Substitution(day=date.fromisoformat(day_text), donor_days=donors,
                            reason=reason)
    except (ValueError, KeyError) as exc:
        raise ValueError(f"bad --anomaly {text!r}; "
                         f"expected DATE=DONOR+DONOR[:reason] ({exc})") from None


def _emit(args, payload, table: str) -> None:
    if args.format == "json":
        print(render_json(payload))
    else:
        print(table, end="" if table.endswith("\n") else "\n")


def _daily_table(rows) -> str:
    lines = [f"  {'date':<12}{'kWh':>10}{'coverage':>10}  flags"]
    for d in rows:
        kwh = "-" if d["kwh"] is None else f"{d['kwh']:.1f}"
        lines.append(f"  {d['date']:<12}{kwh:>10}{d['coverage']:>10.2f}  "
                     f"{','.join(d['flags'])}")
    return "\n".join(lines)


def run_command(args) -> int:
    config = load_config(args.config)
    if args.store:
        config.store_path = args.store

    if args.command == "simulate" and not args.ingest:
        # stream generation needs no store
        scenario = _load_scenario(args.scenario)
        lines = simulate_lines(scenario)
        if args.out:
            Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
            print(f"wrote {len(lines)} readings to {args.out}", file=sys.stderr)
        else:
            sys.stdout.write("\n".join(lines) + "\n")
        return EXIT_OK

    engine = _open_engine(config)

    if args.command == "ingest":
        path = Path(args.file)
        if not path.exists():
            print(f"error: no such file: {path}", file=sys.stderr)
            return EXIT_IO
        with open(path, encoding="utf-8") as fh:
            summary = ingest_lines(engine.store, fh)
        payload = summary.to_jsonable()
        _emit(args, payload,
              f"accepted {summary.accepted}, rejected {summary.rejected}, "
              f"duplicates {summary.duplicates}, skipped {summary.skipped}")
        return EXIT_OK if summary.rejected == 0 else EXIT_VALIDATION

    if args.command == "simulate":  # --ingest path
        scenario = _load_scenario(args.scenario)
        if not engine.store.has_building(scenario.building_id):
            scenario.register(engine.store)
        summary = ingest_lines(engine.store, simulate_lines(scenario))
        _emit(args, summary.to_jsonable(),
              f"simulated and ingested {summary.accepted} readings "
              f"({summary.duplicates} duplicates)")
        return EXIT_OK

    if args.command == "baseline":
        if args.profile:
            data = json.loads(Path(args.profile).read_text(encoding="utf-8"))
            engine.register_profile(
                building_profile_from_payload(data, building_id=args.building))
        period = DateRange(date.fromisoformat(args.start), date.fromisoformat(args.end))
        anomalies = [_parse_anomaly(a) for a in args.anomaly]
        model = engine.compute_baseline(args.building, period, anomalies,
                                        day_set=args.day_set, save=not args.no_save)
        payload = baseline_payload(model)
        table = [f"baseline {model.baseline_id}: {model.kwh_per_day:.1f} kWh/day "
                 f"({model.period.start} .. {model.period.end}, {model.day_set})"]
        for m in model.member_days:
            table.append(f"  {m.day}  {m.kwh:>8.1f}  {m.used_as}")
        _emit(args, payload, "\n".join(table))
        return EXIT_OK

    if args.command == "analyze-week":
        analysis = engine.analyze_week(args.building, args.week, args.baseline,
                                       day_set=args.day_set)
        payload = week_payload(analysis)
        table = [f"week {analysis.week}: mean {analysis.mean_kwh_per_day:.1f} kWh/day, "
                 f"flexible {analysis.flexible_kwh_per_day:.1f} kWh/day "
                 f"(baseline {analysis.baseline_kwh_per_day:.1f})",
                 _daily_table(payload["daily"])]
        if analysis.below_baseline:
            table.append("  note: week landed below the baseline")
        _emit(args, payload, "\n".join(table))
        return EXIT_OK

    if args.command == "evaluate":
        result = engine.evaluate_intervention(
            args.building, args.comparison, args.saving, args.baseline,
            notes=args.notes)
        payload = intervention_payload(result)
        _emit(args, payload,
              f"{result.saving.week} vs {result.comparison.week}: "
              f"reduction {percent_text(result.reduction_fraction)} "
              f"(flexible {result.comparison.flexible_kwh_per_day:.1f} -> "
              f"{result.saving.flexible_kwh_per_day:.1f} kWh/day)")
        return EXIT_OK

    if args.command == "detect-waste":
        report = engine.detect_waste(
            args.building, date.fromisoformat(args.day),
            lux_threshold=args.threshold, zone=args.zone,
            lights_on_floor_kw=args.floor_kw, minimal_power_kw=args.minimal_kw,
            aggregation=args.aggregation)
        payload = waste_report_payload(report)
        if not report.intervals:
            _emit(args, payload, f"no waste intervals on {report.day} "
                                 f"in zone '{report.zone}'")
            return EXIT_OK
        lines = [f"zone '{report.zone}' on {report.day}, "
                 f"threshold {report.lux_threshold:.0f} lux:"]
        for iv in report.intervals:
            lines.append(
                f"  {iv.start:%H:%M}-{iv.end:%H:%M} UTC  "
                f"{iv.duration_hours:.1f} h  excess {iv.excess_power_kw:.1f} kW  "
                f"savings {iv.estimated_daily_savings_kwh:.1f} kWh/day")
        _emit(args, payload, "\n".join(lines))
        return EXIT_OK

    if args.command == "contrast":
        period = DateRange(date.fromisoformat(args.start), date.fromisoformat(args.end))
        result = engine.occupancy_contrast(args.building, period,
                                           alert_ratio=args.alert_ratio)
        payload = contrast_payload(result)
        _emit(args, payload,
              f"weekdays {result.weekday_mean_kwh:.1f} kWh vs weekends "
              f"{result.weekend_mean_kwh:.1f} kWh, ratio {result.ratio:.4f}"
              f"{' ALERT' if result.alert else ''}")
        return EXIT_OK

    if args.command == "progress":
        weeks = [w for w in (args.weeks.split(",") if args.weeks else []) if w]
        points = engine.track_progress(args.building, weeks or None,
                                       baseline_id=args.baseline,
                                       comparison_week=args.comparison)
        pin = engine.pinned(args.building) or {}
        payload = {"building_id": args.building,
                   "comparison_week": args.comparison or pin.get("comparison_week"),
                   "baseline_id": args.baseline or pin.get("baseline_id"),
                   "points": progress_payload(points)}
        lines = []
        for p in points:
            if p.gap:
                lines.append(f"  {p.week}: no usable data")
            else:
                lines.append(f"  {p.week}: flexible {p.flexible_kwh_per_day:.1f} "
                             f"kWh/day, reduction "
                             f"{percent_text(p.reduction_vs_comparison)}")
        _emit(args, payload, "\n".join(lines) if lines else "no weeks to report")
        return EXIT_OK

    if args.command == "report":
        doc = build_report(
            engine, args.building,
            waste_day=date.fromisoformat(args.waste_day) if args.waste_day else None,
            lux_threshold=args.threshold, minimal_power_kw=args.minimal_kw)
        _emit(args, report_payload(doc), render_text(doc))
        return EXIT_OK

    if args.command == "serve":
        from .service import run as run_service

        run_service(engine, ingest_token=args.token or config.token,
                    host=args.host, port=args.port or config.port,
                    static_dir=args.static or _default_static_dir())
        return EXIT_OK

    raise AssertionError(f"unhandled command {args.command!r}")


def _default_static_dir() -> str | None:
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return str(candidate) if candidate.is_dir() else None


def _load_scenario(ref: str) -> SimScenario:
    if ref in BUILTIN_SCENARIOS:
        return BUILTIN_SCENARIOS[ref]()
    path = Path(ref)
    if not path.exists():
        raise FileNotFoundError(
            f"no such scenario: {ref!r} (file or one of {sorted(BUILTIN_SCENARIOS)})")
    return SimScenario.from_json(path)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run_command(args)
    except AnalyticsError as exc:
        detail = str(exc)
        print(f"error: {exc.code}" + (f": {detail}" if detail else ""),
              file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
