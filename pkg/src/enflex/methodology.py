"""Five-step energy-saving workflow over daily consumption figures.

The building team first profiles where energy is consumed, then derives a
fixed ("inflexible") baseline in kWh/day from a no-class period, measures a
normal week against it to size the flexible share, evaluates a saving week
against a pinned comparison week, and finally tracks weekly progress.

All functions here are pure over DailyEnergy values; fetching those from
the store is the engine's job.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Mapping, Sequence

from .errors import (
    BaselineMismatch,
    DonorOutsidePeriod,
    InsufficientCoverage,
    NoDonors,
    ZeroFlexible,
)
from .types import DailyEnergy

SCHOOL_DAYS_ONLY = "school_days_only"
ALL_DAYS = "all_days"
DAY_SETS = (SCHOOL_DAYS_ONLY, ALL_DAYS)

DEFAULT_MIN_COVERAGE = 0.9
MIN_BASELINE_DAYS = 5

CONSUMPTION_CATEGORIES = ("lighting", "hvac", "appliances", "teaching_equipment")

WEEKDAY_FIELDS = ("monday", "tuesday", "wednesday", "thursday", "friday",
                  "saturday", "sunday")


# -- step 1: profile ------------------------------------------------------

@dataclass(frozen=True, slots=True)
class ConsumptionPoint:
    category: str
    label: str

    def __post_init__(self):
        if self.category not in CONSUMPTION_CATEGORIES:
            raise ValueError(f"unknown consumption category: {self.category!r}")


@dataclass(frozen=True, slots=True)
class Timetable:
    """Occupied hours per weekday.

    Values are aggregated usage hours (parallel rooms may push a single day
    past 24); only the weekly total is bounded, at one week of wall-clock
    hours.
    """

    monday: float = 0.0
    tuesday: float = 0.0
    wednesday: float = 0.0
    thursday: float = 0.0
    friday: float = 0.0
    saturday: float = 0.0
    sunday: float = 0.0

    def __post_init__(self):
        for name in WEEKDAY_FIELDS:
            if getattr(self, name) < 0:
                raise ValueError(f"{name} hours must be >= 0")
        if not 0 <= self.weekly_hours <= 168:
            raise ValueError(f"timetable hours per week must lie in [0, 168], "
                             f"got {self.weekly_hours}")

    @property
    def weekly_hours(self) -> float:
        return sum(getattr(self, name) for name in WEEKDAY_FIELDS)


@dataclass(frozen=True, slots=True)
class Occupancy:
    students: int = 0
    educators: int = 0

    def __post_init__(self):
        if self.students < 0 or self.educators < 0:
            raise ValueError("occupancy counts must be >= 0")


@dataclass(frozen=True, slots=True)
class BuildingProfile:
    building_id: str
    consumption_points: tuple[ConsumptionPoint, ...] = ()
    timetable: Timetable = field(default_factory=Timetable)
    occupancy: Occupancy = field(default_factory=Occupancy)
    monitored_rooms: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "consumption_points", tuple(self.consumption_points))
        object.__setattr__(self, "monitored_rooms", tuple(self.monitored_rooms))

    @property
    def warnings(self) -> tuple[str, ...]:
        out = []
        if self.timetable.weekly_hours == 0:
            out.append("timetable_empty")
        if not self.consumption_points:
            out.append("no_consumption_points")
        return tuple(out)


@dataclass(frozen=True, slots=True)
class RegisteredProfile:
    profile: BuildingProfile
    version: int
    profile_id: str
    warnings: tuple[str, ...] = ()


# -- period / week helpers -------------------------------------------------

@dataclass(frozen=True, slots=True)
class DateRange:
    """Inclusive calendar-date range."""

    start: date
    end: date

    def __post_init__(self):
        if self.end < self.start:
            raise ValueError(f"range end {self.end} before start {self.start}")

    def __contains__(self, day: date) -> bool:
        return self.start <= day <= self.end

    def days(self) -> list[date]:
        n = (self.end - self.start).days + 1
        return [self.start + timedelta(days=i) for i in range(n)]


def week_id(day: date) -> str:
    year, week, _ = day.isocalendar()
    return f"{year}-W{week:02d}"


def week_start(label: str, *, default_year: int | None = None) -> date:
    """Monday of an ISO week label: '2018-W47', 'W47', or 'w47'."""
    text = label.strip()
    if text[:1] in ("w", "W") and text[1:].isdigit():
        if default_year is None:
            raise ValueError(f"week {label!r} needs a year for context")
        year, week = default_year, int(text[1:])
    else:
        try:
            year_text, week_text = text.split("-W")
            year, week = int(year_text), int(week_text)
        except ValueError:
            raise ValueError(f"bad week id: {label!r} (expected e.g. 2018-W47)") from None
    return date.fromisocalendar(year, week, 1)


def week_dates(start: date) -> tuple[date, ...]:
    if start.weekday() != 0:
        raise ValueError(f"week must start on a Monday, got {start}")
    return tuple(start + timedelta(days=i) for i in range(7))


def _usable(day: DailyEnergy, min_coverage: float) -> bool:
    return day.kwh is not None and day.coverage >= min_coverage


def _in_day_set(day: date, day_set: str) -> bool:
    if day_set == SCHOOL_DAYS_ONLY:
        return day.weekday() < 5
    if day_set == ALL_DAYS:
        return True
    raise ValueError(f"unknown day set: {day_set!r}")


# -- step 2: baseline ------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Substitution:
    day: date
    donor_days: tuple[date, ...]
    reason: str = ""

    def __post_init__(self):
        object.__setattr__(self, "donor_days", tuple(self.donor_days))
        if not self.donor_days:
            raise NoDonors(f"substitution for {self.day} lists no donor days")


@dataclass(frozen=True, slots=True)
class MemberDay:
    day: date
    kwh: float
    used_as: str  # "actual" | "substituted"


@dataclass(frozen=True, slots=True)
class BaselineModel:
    """Fixed consumption estimate: the mean daily kWh with no class activity."""

    building_id: str
    kwh_per_day: float
    member_days: tuple[MemberDay, ...]
    substitutions: tuple[Substitution, ...]
    period: DateRange
    day_set: str = SCHOOL_DAYS_ONLY

    def __post_init__(self):
        object.__setattr__(self, "member_days", tuple(self.member_days))
        object.__setattr__(self, "substitutions", tuple(self.substitutions))
        mean = sum(m.kwh for m in self.member_days) / len(self.member_days)
        if abs(mean - self.kwh_per_day) > 1e-9:
            raise ValueError("kwh_per_day must equal the mean of member days")
        for sub in self.substitutions:
            for donor in sub.donor_days:
                if donor not in self.period:
                    raise DonorOutsidePeriod(
                        f"donor {donor} outside period {self.period.start}..{self.period.end}")

    @property
    def baseline_id(self) -> str:
        seed = "|".join([
            self.building_id, self.period.start.isoformat(),
            self.period.end.isoformat(), self.day_set,
            *(f"{m.day}:{m.kwh!r}:{m.used_as}" for m in self.member_days),
        ])
        digest = hashlib.sha256(seed.encode()).hexdigest()[:8]
        return f"{self.building_id}-{self.period.start.isoformat()}-{digest}"


def substitute_day(target: DailyEnergy, donors: Sequence[DailyEnergy]) -> float:
    """Effective kWh for an anomalous day: the arithmetic mean of its donors."""
    if not donors:
        raise NoDonors(f"no donor days for {target.day}")
    for donor in donors:
        if donor.building_id != target.building_id:
            raise ValueError(f"donor {donor.day} belongs to another building")
        if donor.kwh is None:
            raise InsufficientCoverage(f"donor day {donor.day} has no consumption value")
    return sum(d.kwh for d in donors) / len(donors)


def compute_baseline(daily: Mapping[date, DailyEnergy], building_id: str,
                     period: DateRange, anomalies: Sequence[Substitution] = (), *,
                     day_set: str = SCHOOL_DAYS_ONLY,
                     min_coverage: float = DEFAULT_MIN_COVERAGE,
                     min_days: int = MIN_BASELINE_DAYS) -> BaselineModel:
    """Baseline kWh/day over a no-class period.

    Anomalous days are replaced by the mean of their donor days before the
    period mean is taken; substitution provenance is kept on the model.
    """
    if day_set not in DAY_SETS:
        raise ValueError(f"unknown day set: {day_set!r}")
    by_target = {}
    for sub in anomalies:
        if sub.day not in period:
            raise ValueError(f"anomalous day {sub.day} outside the baseline period")
        by_target[sub.day] = sub
        for donor in sub.donor_days:
            if donor not in period:
                raise DonorOutsidePeriod(
                    f"donor {donor} outside period {period.start}..{period.end}")
            if donor in {s.day for s in anomalies}:
                raise ValueError(f"donor {donor} is itself marked anomalous")

    member_dates = [d for d in period.days() if _in_day_set(d, day_set)]
    members: list[MemberDay] = []
    for day in member_dates:
        entry = daily.get(day)
        sub = by_target.get(day)
        if sub is not None:
            donors = []
            for donor_date in sub.donor_days:
                donor = daily.get(donor_date)
                if donor is None or not _usable(donor, min_coverage):
                    raise InsufficientCoverage(
                        f"donor day {donor_date} below coverage {min_coverage}")
                donors.append(donor)
            target = entry if entry is not None else DailyEnergy(
                building_id=building_id, day=day, kwh=None, coverage=0.0)
            members.append(MemberDay(day=day, kwh=substitute_day(target, donors),
                                     used_as="substituted"))
        else:
            if entry is None or not _usable(entry, min_coverage):
                raise InsufficientCoverage(
                    f"day {day} below coverage {min_coverage} and not substituted")
            members.append(MemberDay(day=day, kwh=entry.kwh, used_as="actual"))

    if len(members) < min_days:
        raise InsufficientCoverage(
            f"need at least {min_days} usable days, got {len(members)}")
    mean = sum(m.kwh for m in members) / len(members)
    return BaselineModel(building_id=building_id, kwh_per_day=mean,
                         member_days=tuple(members),
                         substitutions=tuple(by_target.values()),
                         period=period, day_set=day_set)


# -- step 3: week analysis -------------------------------------------------

@dataclass(frozen=True, slots=True)
class WeekAnalysis:
    """Per-day consumption for one week against a baseline.

    ``flexible_kwh_per_day`` is the influenceable share: the week mean minus
    the baseline, floored at zero.  Weeks landing under the baseline keep
    the floor and set ``below_baseline``.
    """

    building_id: str
    week: str
    dates: tuple[date, ...]
    daily: tuple[DailyEnergy, ...]
    mean_kwh_per_day: float
    flexible_kwh_per_day: float
    baseline_id: str
    baseline_kwh_per_day: float
    day_set: str
    below_baseline: bool = False

    def __post_init__(self):
        expected = max(0.0, self.mean_kwh_per_day - self.baseline_kwh_per_day)
        if abs(self.flexible_kwh_per_day - expected) > 1e-9:
            raise ValueError("flexible consumption must be mean minus baseline, floored at 0")


def analyze_week(daily: Sequence[DailyEnergy], building_id: str, week_monday: date,
                 baseline: BaselineModel, *, day_set: str | None = None,
                 min_coverage: float = DEFAULT_MIN_COVERAGE) -> WeekAnalysis:
    """Mean and flexible consumption for the week starting at ``week_monday``."""
    day_set = day_set or baseline.day_set
    if day_set not in DAY_SETS:
        raise ValueError(f"unknown day set: {day_set!r}")
    dates = week_dates(week_monday)
    by_date = {d.day: d for d in daily}
    missing = [d for d in dates if d not in by_date]
    if missing:
        raise ValueError(f"week analysis needs all 7 daily values; missing {missing}")
    member_values = []
    for d in dates:
        if not _in_day_set(d, day_set):
            continue
        entry = by_date[d]
        if not _usable(entry, min_coverage):
            raise InsufficientCoverage(
                f"day {d} below coverage {min_coverage} in week {week_id(week_monday)}")
        member_values.append(entry.kwh)
    mean = sum(member_values) / len(member_values)
    flexible = max(0.0, mean - baseline.kwh_per_day)
    return WeekAnalysis(
        building_id=building_id, week=week_id(week_monday), dates=dates,
        daily=tuple(by_date[d] for d in dates), mean_kwh_per_day=mean,
        flexible_kwh_per_day=flexible, baseline_id=baseline.baseline_id,
        baseline_kwh_per_day=baseline.kwh_per_day, day_set=day_set,
        below_baseline=mean < baseline.kwh_per_day)


# -- step 4: intervention ----------------------------------------------------

@dataclass(frozen=True, slots=True)
class InterventionResult:
    """Saving week measured against the pinned comparison week.

    ``reduction_fraction`` is 1 - saving.flexible / comparison.flexible;
    full precision is kept here, percent rounding happens only at
    presentation time.
    """

    comparison: WeekAnalysis
    saving: WeekAnalysis
    absolute_saving_kwh_per_day: float
    reduction_fraction: float
    notes: str = ""


def evaluate_intervention(comparison: WeekAnalysis, saving: WeekAnalysis,
                          notes: str = "") -> InterventionResult:
    if comparison.baseline_id != saving.baseline_id:
        raise BaselineMismatch(
            f"comparison uses {comparison.baseline_id}, saving uses {saving.baseline_id}")
    if comparison.building_id != saving.building_id:
        raise BaselineMismatch("weeks belong to different buildings")
    if comparison.flexible_kwh_per_day == 0.0:
        raise ZeroFlexible(
            "comparison week has no flexible consumption; reduction is undefined")
    reduction = 1.0 - saving.flexible_kwh_per_day / comparison.flexible_kwh_per_day
    absolute = comparison.flexible_kwh_per_day - saving.flexible_kwh_per_day
    return InterventionResult(comparison=comparison, saving=saving,
                              absolute_saving_kwh_per_day=absolute,
                              reduction_fraction=reduction, notes=notes)


# -- step 5: progress --------------------------------------------------------

@dataclass(frozen=True, slots=True)
class ProgressPoint:
    week: str
    flexible_kwh_per_day: float | None
    reduction_vs_comparison: float | None
    group_tag: str | None = None
    below_baseline: bool = False
    gap: bool = False


def progress_point(comparison: WeekAnalysis, analysis: WeekAnalysis,
                   group_tag: str | None = None) -> ProgressPoint:
    result = evaluate_intervention(comparison, analysis)
    return ProgressPoint(week=analysis.week,
                         flexible_kwh_per_day=analysis.flexible_kwh_per_day,
                         reduction_vs_comparison=result.reduction_fraction,
                         group_tag=group_tag,
                         below_baseline=analysis.below_baseline)


def gap_point(week: str, group_tag: str | None = None) -> ProgressPoint:
    return ProgressPoint(week=week, flexible_kwh_per_day=None,
                         reduction_vs_comparison=None, group_tag=group_tag, gap=True)
