"""Baseline, week analysis, intervention and progress arithmetic."""
import random
from datetime import date, timedelta

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enflex.errors import (
    BaselineMismatch,
    DonorOutsidePeriod,
    InsufficientCoverage,
    NoDonors,
    ZeroFlexible,
)
from enflex.methodology import (
    ALL_DAYS,
    BuildingProfile,
    ConsumptionPoint,
    DateRange,
    Occupancy,
    SCHOOL_DAYS_ONLY,
    Substitution,
    Timetable,
    WeekAnalysis,
    analyze_week,
    compute_baseline,
    evaluate_intervention,
    gap_point,
    progress_point,
    substitute_day,
    week_dates,
    week_id,
    week_start,
)
from enflex.types import DailyEnergy

W44_MON = date(2018, 10, 29)  # Monday of 2018-W44
W47_MON = date(2018, 11, 19)
W50_MON = date(2018, 12, 10)


def de(day, kwh, coverage=1.0, building="skola"):
    return DailyEnergy(building_id=building, day=day, kwh=kwh, coverage=coverage)


def week_of(monday, kwh_by_weekday):
    """DailyEnergy for the 7 days starting at monday; values indexed 0..6."""
    return [de(monday + timedelta(days=i), kwh_by_weekday[i]) for i in range(7)]


def baseline_week44(mon_kwh=160.0):
    """The no-class week: staff Monday, short-ventilation Friday."""
    period = DateRange(W44_MON, W44_MON + timedelta(days=6))
    days = week_of(W44_MON, [mon_kwh, 145.0, 145.0, 145.0, 129.5, 40.0, 40.0])
    daily = {d.day: d for d in days}
    anomalies = [Substitution(day=W44_MON,
                              donor_days=(W44_MON + timedelta(days=1),
                                          W44_MON + timedelta(days=2),
                                          W44_MON + timedelta(days=3)),
                              reason="staff working in the building")]
    return compute_baseline(daily, "skola", period, anomalies)


class TestWeekHelpers:
    def test_week_id_roundtrip(self):
        assert week_id(W47_MON) == "2018-W47"
        assert week_start("2018-W47") == W47_MON

    def test_short_week_label_needs_year(self):
        assert week_start("w47", default_year=2018) == W47_MON
        with pytest.raises(ValueError):
            week_start("w47")

    def test_week_dates_require_monday(self):
        with pytest.raises(ValueError):
            week_dates(W47_MON + timedelta(days=1))


class TestSubstituteDay:
    def test_constant_donor_mean(self):
        target = de(W44_MON, 160.0)
        donors = [de(W44_MON + timedelta(days=i), 145.0) for i in (1, 2, 3)]
        assert substitute_day(target, donors) == 145.0

    def test_single_donor_identity(self):
        assert substitute_day(de(W44_MON, None, 0.0), [de(W44_MON + timedelta(days=1), 100.0)]) == 100.0

    def test_two_donor_mean(self):
        donors = [de(W44_MON + timedelta(days=1), 140.0),
                  de(W44_MON + timedelta(days=2), 150.0)]
        assert substitute_day(de(W44_MON, 999.0), donors) == 145.0

    def test_no_donors(self):
        with pytest.raises(NoDonors):
            substitute_day(de(W44_MON, 1.0), [])


class TestComputeBaseline:
    def test_week44_procedure_gives_141_9(self):
        model = baseline_week44()
        assert model.kwh_per_day == pytest.approx(141.9, abs=1e-9)
        assert [m.used_as for m in model.member_days] == [
            "substituted", "actual", "actual", "actual", "actual"]
        assert model.member_days[0].kwh == 145.0

    def test_constant_days_no_anomalies(self):
        period = DateRange(W44_MON, W44_MON + timedelta(days=6))
        daily = {d.day: d for d in week_of(W44_MON, [100.0] * 7)}
        model = compute_baseline(daily, "skola", period)
        assert model.kwh_per_day == 100.0
        assert model.substitutions == ()

    def test_donor_outside_period_rejected(self):
        period = DateRange(W44_MON, W44_MON + timedelta(days=6))
        daily = {d.day: d for d in week_of(W44_MON, [100.0] * 7)}
        bad = Substitution(day=W44_MON, donor_days=(W44_MON - timedelta(days=3),))
        with pytest.raises(DonorOutsidePeriod):
            compute_baseline(daily, "skola", period, [bad])

    def test_low_coverage_day_rejected(self):
        period = DateRange(W44_MON, W44_MON + timedelta(days=6))
        days = week_of(W44_MON, [100.0] * 7)
        days[2] = de(W44_MON + timedelta(days=2), 100.0, coverage=0.5)
        with pytest.raises(InsufficientCoverage):
            compute_baseline(daily={d.day: d for d in days}, building_id="skola",
                             period=period)

    def test_substitution_identity_property(self):
        # No anomalies: baseline is the plain mean over the day set.
        rng = random.Random(99)
        period = DateRange(W44_MON, W44_MON + timedelta(days=6))
        values = [rng.uniform(50, 400) for _ in range(7)]
        daily = {d.day: d for d in week_of(W44_MON, values)}
        model = compute_baseline(daily, "skola", period)
        assert model.kwh_per_day == pytest.approx(sum(values[:5]) / 5, abs=1e-12)

    def test_all_days_mode_includes_weekend(self):
        period = DateRange(W44_MON, W44_MON + timedelta(days=6))
        daily = {d.day: d for d in week_of(W44_MON, [100.0] * 5 + [30.0, 30.0])}
        model = compute_baseline(daily, "skola", period, day_set=ALL_DAYS)
        assert model.kwh_per_day == pytest.approx((500 + 60) / 7, abs=1e-12)

    def test_brute_force_oracle_randomized(self):
        # Independent oracle: substitute Monday by mean(Tue..Thu), then mean
        # Mon..Fri, hand-computed with plain arithmetic.
        rng = random.Random(20181029)
        for _ in range(100):
            values = [rng.uniform(20, 500) for _ in range(7)]
            oracle_mon = (values[1] + values[2] + values[3]) / 3
            oracle = (oracle_mon + values[1] + values[2] + values[3] + values[4]) / 5
            model = baseline_from_values(values)
            assert abs(model.kwh_per_day - oracle) <= 1e-9


def baseline_from_values(values):
    period = DateRange(W44_MON, W44_MON + timedelta(days=6))
    daily = {d.day: d for d in week_of(W44_MON, values)}
    anomalies = [Substitution(day=W44_MON,
                              donor_days=tuple(W44_MON + timedelta(days=i) for i in (1, 2, 3)))]
    return compute_baseline(daily, "skola", period, anomalies)


class TestAnalyzeWeek:
    def test_week47_flexible_69_1(self):
        baseline = baseline_week44()
        daily = week_of(W47_MON, [205.0, 223.0, 218.0, 211.0, 198.0, 45.0, 40.0])
        wa = analyze_week(daily, "skola", W47_MON, baseline)
        assert wa.mean_kwh_per_day == pytest.approx(211.0, abs=1e-9)
        assert wa.flexible_kwh_per_day == pytest.approx(69.1, abs=1e-9)

    def test_week50_flexible_54_6(self):
        baseline = baseline_week44()
        daily = week_of(W50_MON, [193.0, 206.0, 201.5, 196.0, 186.0, 52.0, 41.0])
        wa = analyze_week(daily, "skola", W50_MON, baseline)
        assert wa.mean_kwh_per_day == pytest.approx(196.5, abs=1e-9)
        assert wa.flexible_kwh_per_day == pytest.approx(54.6, abs=1e-9)

    def test_week_at_baseline_has_zero_flexible(self):
        baseline = baseline_week44()
        daily = week_of(W47_MON, [141.9] * 7)
        wa = analyze_week(daily, "skola", W47_MON, baseline)
        assert wa.flexible_kwh_per_day == pytest.approx(0.0, abs=1e-9)

    def test_below_baseline_floored_and_flagged(self):
        baseline = baseline_week44()
        daily = week_of(W47_MON, [100.0] * 7)
        wa = analyze_week(daily, "skola", W47_MON, baseline)
        assert wa.flexible_kwh_per_day == 0.0
        assert wa.below_baseline

    def test_low_coverage_school_day_rejected(self):
        baseline = baseline_week44()
        daily = week_of(W47_MON, [205.0, 223.0, 218.0, 211.0, 198.0, 45.0, 40.0])
        daily[3] = de(W47_MON + timedelta(days=3), 211.0, coverage=0.2)
        with pytest.raises(InsufficientCoverage):
            analyze_week(daily, "skola", W47_MON, baseline)

    def test_weekend_coverage_ignored_in_school_days_mode(self):
        baseline = baseline_week44()
        daily = week_of(W47_MON, [205.0, 223.0, 218.0, 211.0, 198.0, 45.0, 40.0])
        daily[6] = de(W47_MON + timedelta(days=6), None, coverage=0.0)
        wa = analyze_week(daily, "skola", W47_MON, baseline)
        assert wa.mean_kwh_per_day == pytest.approx(211.0, abs=1e-9)


class TestEvaluateIntervention:
    def _weeks(self):
        baseline = baseline_week44()
        comparison = analyze_week(
            week_of(W47_MON, [205.0, 223.0, 218.0, 211.0, 198.0, 45.0, 40.0]),
            "skola", W47_MON, baseline)
        saving = analyze_week(
            week_of(W50_MON, [193.0, 206.0, 201.5, 196.0, 186.0, 52.0, 41.0]),
            "skola", W50_MON, baseline)
        return baseline, comparison, saving

    def test_table_one_reduction_21_percent(self):
        _, comparison, saving = self._weeks()
        result = evaluate_intervention(comparison, saving)
        assert result.reduction_fraction == pytest.approx(1 - 54.6 / 69.1, abs=1e-9)
        assert round(result.reduction_fraction * 100) == 21
        assert result.absolute_saving_kwh_per_day == pytest.approx(69.1 - 54.6, abs=1e-9)

    def test_identical_weeks_zero_reduction(self):
        _, comparison, _ = self._weeks()
        result = evaluate_intervention(comparison, comparison)
        assert result.reduction_fraction == 0.0

    def test_saving_at_baseline_full_reduction(self):
        baseline, comparison, _ = self._weeks()
        at_baseline = analyze_week(week_of(W50_MON, [141.9] * 7), "skola",
                                   W50_MON, baseline)
        result = evaluate_intervention(comparison, at_baseline)
        assert result.reduction_fraction == pytest.approx(1.0, abs=1e-9)

    def test_baseline_mismatch(self):
        baseline, comparison, _ = self._weeks()
        other = baseline_week44(mon_kwh=170.0)
        other_model = compute_baseline(
            {d.day: d for d in week_of(W44_MON, [100.0] * 7)}, "skola",
            DateRange(W44_MON, W44_MON + timedelta(days=6)))
        saving = analyze_week(week_of(W50_MON, [150.0] * 7), "skola", W50_MON,
                              other_model)
        with pytest.raises(BaselineMismatch):
            evaluate_intervention(comparison, saving)

    def test_zero_flexible_comparison_rejected(self):
        baseline = baseline_week44()
        flat = analyze_week(week_of(W47_MON, [141.9] * 7), "skola", W47_MON, baseline)
        saving = analyze_week(week_of(W50_MON, [150.0] * 7), "skola", W50_MON, baseline)
        with pytest.raises(ZeroFlexible):
            evaluate_intervention(flat, saving)

    def test_regressing_week_yields_negative_reduction(self):
        # the fraction may go negative; only presentation rounds it
        baseline, comparison, _ = self._weeks()
        worse = analyze_week(week_of(W50_MON, [260.0] * 7), "skola", W50_MON,
                             baseline)
        result = evaluate_intervention(comparison, worse)
        assert result.reduction_fraction < 0
        assert result.absolute_saving_kwh_per_day < 0


class TestProgress:
    def test_repeated_weeks_repeat_reduction(self):
        baseline = baseline_week44()
        comparison = analyze_week(
            week_of(W47_MON, [205.0, 223.0, 218.0, 211.0, 198.0, 45.0, 40.0]),
            "skola", W47_MON, baseline)
        points = []
        for monday in (W50_MON, W50_MON + timedelta(days=7)):
            wa = analyze_week(week_of(monday, [193.0, 206.0, 201.5, 196.0, 186.0,
                                               52.0, 41.0]),
                              "skola", monday, baseline)
            points.append(progress_point(comparison, wa))
        assert [round(p.reduction_vs_comparison * 100) for p in points] == [21, 21]

    def test_below_baseline_week_caps_at_one(self):
        baseline = baseline_week44()
        comparison = analyze_week(
            week_of(W47_MON, [205.0, 223.0, 218.0, 211.0, 198.0, 45.0, 40.0]),
            "skola", W47_MON, baseline)
        low = analyze_week(week_of(W50_MON, [100.0] * 7), "skola", W50_MON, baseline)
        p = progress_point(comparison, low)
        assert p.reduction_vs_comparison == pytest.approx(1.0)
        assert p.below_baseline

    def test_gap_marker(self):
        p = gap_point("2018-W51")
        assert p.gap and p.flexible_kwh_per_day is None


class TestProfiles:
    def test_soderhamn_like_profile_accepted(self):
        profile = BuildingProfile(
            building_id="skola",
            consumption_points=(
                ConsumptionPoint("teaching_equipment", "computer room"),
                ConsumptionPoint("teaching_equipment", "3D printers and laser cutters"),
                ConsumptionPoint("lighting", "classrooms"),
            ),
            timetable=Timetable(monday=28, tuesday=28, wednesday=28,
                                thursday=28, friday=28),
            occupancy=Occupancy(students=1000, educators=80),
            monitored_rooms=tuple(f"classroom-{i}" for i in range(1, 9)),
        )
        assert profile.timetable.weekly_hours == 140
        assert profile.warnings == ()

    def test_empty_timetable_warns(self):
        profile = BuildingProfile(building_id="b", consumption_points=(
            ConsumptionPoint("lighting", "hall"),))
        assert "timetable_empty" in profile.warnings

    def test_over_168_hours_rejected(self):
        with pytest.raises(ValueError):
            Timetable(monday=169)

    def test_unknown_category_rejected(self):
        with pytest.raises(ValueError):
            ConsumptionPoint("rocketry", "lab")


class TestInvariants:
    @given(st.floats(0.1, 1000), st.lists(st.floats(10, 500), min_size=7, max_size=7))
    @settings(max_examples=60)
    def test_scale_invariance(self, scale, values):
        # Scaling every daily value by c scales baseline/mean/flexible by c
        # and leaves the reduction fraction unchanged.
        base = baseline_from_values(values)
        scaled = baseline_from_values([v * scale for v in values])
        assert scaled.kwh_per_day == pytest.approx(base.kwh_per_day * scale, rel=1e-9)

        comp_vals = [v + 120 for v in values]
        save_vals = [v + 60 for v in values]
        comp = analyze_week(week_of(W47_MON, comp_vals), "skola", W47_MON, base)
        save = analyze_week(week_of(W50_MON, save_vals), "skola", W50_MON, base)
        result = evaluate_intervention(comp, save)

        comp_s = analyze_week(week_of(W47_MON, [v * scale for v in comp_vals]),
                              "skola", W47_MON, scaled)
        save_s = analyze_week(week_of(W50_MON, [v * scale for v in save_vals]),
                              "skola", W50_MON, scaled)
        result_s = evaluate_intervention(comp_s, save_s)

        assert result_s.absolute_saving_kwh_per_day == pytest.approx(
            result.absolute_saving_kwh_per_day * scale, rel=1e-9, abs=1e-9)
        assert result_s.reduction_fraction == pytest.approx(
            result.reduction_fraction, rel=1e-9, abs=1e-9)

    @given(st.integers(0, 4), st.floats(1, 50))
    @settings(max_examples=60)
    def test_lowering_a_saving_day_never_decreases_reduction(self, idx, drop):
        baseline = baseline_week44()
        comparison = analyze_week(
            week_of(W47_MON, [205.0, 223.0, 218.0, 211.0, 198.0, 45.0, 40.0]),
            "skola", W47_MON, baseline)
        save_vals = [193.0, 206.0, 201.5, 196.0, 186.0, 52.0, 41.0]
        before = evaluate_intervention(
            comparison, analyze_week(week_of(W50_MON, save_vals), "skola",
                                     W50_MON, baseline)).reduction_fraction
        lowered = save_vals[:]
        lowered[idx] = max(0.0, lowered[idx] - drop)
        after = evaluate_intervention(
            comparison, analyze_week(week_of(W50_MON, lowered), "skola",
                                     W50_MON, baseline)).reduction_fraction
        assert after >= before - 1e-12

    def test_determinism_bit_identical(self):
        a = baseline_week44()
        b = baseline_week44()
        assert a == b and a.kwh_per_day == b.kwh_per_day
