"""Engine wiring: store-backed analyses, saved state, pinned intervention."""
from datetime import date, datetime, timedelta, timezone

import pytest

from enflex.engine import AnalyticsEngine
from enflex.errors import (
    MissingProfile,
    NoComparisonPinned,
    UnknownBaseline,
    UnknownBuilding,
)
from enflex.methodology import (
    BuildingProfile,
    ConsumptionPoint,
    DateRange,
    Occupancy,
    Substitution,
    Timetable,
)
from enflex.simulate import (
    hall_lighting_scenario,
    simulate_lines,
    soderhamn_scenario,
    weekend_contrast_scenario,
)
from enflex.store import TelemetryStore
from enflex.wire import ingest_lines

W44_MON = date(2018, 10, 29)


def soderhamn_profile():
    return BuildingProfile(
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
        monitored_rooms=("computer-room", "printer-room") + tuple(
            f"classroom-{i}" for i in range(1, 9)),
    )


def soderhamn_anomalies():
    return [Substitution(
        day=W44_MON,
        donor_days=(W44_MON + timedelta(days=1), W44_MON + timedelta(days=2),
                    W44_MON + timedelta(days=3)),
        reason="staff working in the building")]


@pytest.fixture(scope="module")
def soderhamn_engine():
    store = TelemetryStore()
    scenario = soderhamn_scenario()
    scenario.register(store)
    ingest_lines(store, simulate_lines(scenario))
    engine = AnalyticsEngine(store)
    engine.register_profile(soderhamn_profile())
    return engine


W44_PERIOD = DateRange(W44_MON, W44_MON + timedelta(days=6))


class TestPipeline:
    def test_baseline_requires_profile(self):
        store = TelemetryStore()
        scenario = soderhamn_scenario()
        scenario.register(store)
        ingest_lines(store, simulate_lines(scenario))
        engine = AnalyticsEngine(store)
        with pytest.raises(MissingProfile):
            engine.compute_baseline("skola", W44_PERIOD, soderhamn_anomalies())

    def test_profile_requires_building(self, soderhamn_engine):
        with pytest.raises(UnknownBuilding):
            soderhamn_engine.register_profile(BuildingProfile(building_id="ghost"))

    def test_baseline_141_9(self, soderhamn_engine):
        model = soderhamn_engine.compute_baseline("skola", W44_PERIOD,
                                                  soderhamn_anomalies())
        assert model.kwh_per_day == pytest.approx(141.9, abs=0.05)
        assert model.member_days[0].used_as == "substituted"

    def test_weeks_and_intervention(self, soderhamn_engine):
        model = soderhamn_engine.compute_baseline("skola", W44_PERIOD,
                                                  soderhamn_anomalies())
        w47 = soderhamn_engine.analyze_week("skola", "2018-W47", model.baseline_id)
        w50 = soderhamn_engine.analyze_week("skola", "2018-W50", model.baseline_id)
        assert w47.mean_kwh_per_day == pytest.approx(211.0, abs=0.05)
        assert w47.flexible_kwh_per_day == pytest.approx(69.1, abs=0.05)
        assert w50.flexible_kwh_per_day == pytest.approx(54.6, abs=0.05)
        result = soderhamn_engine.evaluate_intervention(
            "skola", "2018-W47", "2018-W50", model.baseline_id,
            notes="slightly higher occupancy during the saving week")
        assert result.reduction_fraction * 100 == pytest.approx(20.98, abs=0.1)
        pinned = soderhamn_engine.pinned("skola")
        assert pinned["comparison_week"] == "2018-W47"
        assert pinned["saving_week"] == "2018-W50"

    def test_short_week_labels_resolve_via_baseline_year(self, soderhamn_engine):
        model = soderhamn_engine.compute_baseline("skola", W44_PERIOD,
                                                  soderhamn_anomalies())
        wa = soderhamn_engine.analyze_week("skola", "w47", model.baseline_id)
        assert wa.week == "2018-W47"

    def test_progress_after_pinned_intervention(self, soderhamn_engine):
        soderhamn_engine.evaluate_intervention("skola", "2018-W47", "2018-W50")
        points = soderhamn_engine.track_progress("skola")
        by_week = {p.week: p for p in points}
        assert "2018-W50" in by_week
        p50 = by_week["2018-W50"]
        assert round(p50.reduction_vs_comparison * 100) == 21
        # weeks 48/49 have no telemetry: gap markers, not zeros
        assert by_week["2018-W48"].gap and by_week["2018-W49"].gap

    def test_progress_without_pin_needs_comparison(self):
        store = TelemetryStore()
        scenario = soderhamn_scenario()
        scenario.register(store)
        ingest_lines(store, simulate_lines(scenario))
        engine = AnalyticsEngine(store)
        with pytest.raises(NoComparisonPinned):
            engine.track_progress("skola")

    def test_resolve_baseline_rejects_foreign_building(self, soderhamn_engine):
        model = soderhamn_engine.compute_baseline("skola", W44_PERIOD,
                                                  soderhamn_anomalies())
        with pytest.raises(UnknownBaseline):
            soderhamn_engine.resolve_baseline("other", model.baseline_id)


class TestEnergySeries:
    def test_daily_series_covers_week(self, soderhamn_engine):
        store_snap = soderhamn_engine.store.snapshot()
        building = store_snap.building("skola")
        start, _ = building.day_window(date(2018, 11, 19))
        _, end = building.day_window(date(2018, 11, 25))
        series = soderhamn_engine.energy_series("skola", "1day", start, end)
        assert len(series) == 7
        assert series[0]["date"] == "2018-11-19"
        assert sum(s["kwh"] for s in series[:5]) / 5 == pytest.approx(211.0, abs=0.05)

    def test_subday_series_has_explicit_nulls(self, soderhamn_engine):
        # late in week 48 there is no data
        start = datetime(2018, 11, 26, 0, 0, tzinfo=timezone.utc)
        series = soderhamn_engine.energy_series("skola", "1h", start,
                                                start + timedelta(hours=4))
        assert len(series) == 4
        assert all(s["kwh"] is None for s in series)


class TestLive:
    def test_live_midweek(self, soderhamn_engine):
        at = datetime(2018, 11, 21, 11, 0, tzinfo=timezone.utc)  # Wed of W47
        soderhamn_engine.compute_baseline("skola", W44_PERIOD, soderhamn_anomalies())
        live = soderhamn_engine.live("skola", at=at)
        assert live.latest_power_w is not None and live.latest_power_w > 0
        assert live.today_kwh is not None and live.today_kwh > 0
        assert live.baseline_kwh_per_day == pytest.approx(141.9, abs=0.05)

    def test_live_day_without_data_is_null_not_zero(self, soderhamn_engine):
        at = datetime(2018, 12, 20, 12, 0, tzinfo=timezone.utc)
        live = soderhamn_engine.live("skola", at=at)
        assert live.today_kwh is None
        assert live.latest_power_w is not None  # last reading of week 50 still shown


class TestWasteAndContrast:
    def test_hall_lighting_report(self):
        store = TelemetryStore()
        scenario = hall_lighting_scenario()
        scenario.register(store)
        ingest_lines(store, simulate_lines(scenario))
        engine = AnalyticsEngine(store)
        report = engine.detect_waste("liceo", date(2019, 3, 12),
                                     lux_threshold=400.0,
                                     lights_on_floor_kw=1.0,
                                     minimal_power_kw=1.9)
        assert report.zone == "hall"
        assert len(report.intervals) == 1
        iv = report.intervals[0]
        assert iv.duration_hours == pytest.approx(7.0)
        assert iv.estimated_daily_savings_kwh == pytest.approx(21.0, abs=0.1)
        # series cover the whole local day for charting
        assert len(report.lux_series) == 96

    def test_contrast_from_simulated_greek_school(self):
        store = TelemetryStore()
        scenario = weekend_contrast_scenario()
        scenario.register(store)
        ingest_lines(store, simulate_lines(scenario))
        engine = AnalyticsEngine(store)
        period = DateRange(date(2019, 1, 7), date(2019, 4, 30))
        contrast = engine.occupancy_contrast("gymnasio", period)
        assert contrast.ratio == pytest.approx(119.0 / 367.0, abs=0.0005)
        assert contrast.alert


class TestStatePersistence:
    def test_state_survives_restart(self, tmp_path):
        store_path = tmp_path / "store"
        store = TelemetryStore(store_path)
        scenario = soderhamn_scenario()
        scenario.register(store)
        ingest_lines(store, simulate_lines(scenario))
        engine = AnalyticsEngine(store, state_path=store_path / "state.json")
        engine.register_profile(soderhamn_profile())
        model = engine.compute_baseline("skola", W44_PERIOD, soderhamn_anomalies())
        result = engine.evaluate_intervention("skola", "2018-W47", "2018-W50",
                                              model.baseline_id)
        store.close()

        store2 = TelemetryStore(store_path)
        engine2 = AnalyticsEngine(store2, state_path=store_path / "state.json")
        assert engine2.latest_profile("skola").version == 1
        reloaded = engine2.baseline(model.baseline_id)
        assert reloaded.kwh_per_day == model.kwh_per_day
        result2 = engine2.evaluate_intervention("skola", "2018-W47", "2018-W50",
                                                model.baseline_id)
        assert result2.reduction_fraction == result.reduction_fraction

    def test_profile_versions_retained(self, tmp_path):
        store = TelemetryStore()
        scenario = soderhamn_scenario()
        scenario.register(store)
        engine = AnalyticsEngine(store)
        engine.register_profile(soderhamn_profile())
        engine.register_profile(soderhamn_profile())
        versions = engine.profile_versions("skola")
        assert [v.version for v in versions] == [1, 2]
        assert versions[0].profile_id == "skola/v1"
