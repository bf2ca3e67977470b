"""Domain errors raised by the analytics engine.

Every error carries a stable ``code`` so the HTTP service and the CLI can
report machine-readable reasons without string matching.
"""
from __future__ import annotations


class AnalyticsError(Exception):
    """Base class for all domain errors."""

    code = "error"


class UnknownBuilding(AnalyticsError):
    code = "unknown_building"


class UnknownSensor(AnalyticsError):
    code = "unknown_sensor"


class KindMismatch(AnalyticsError):
    """A reading's kind does not match its registered sensor."""

    code = "kind_mismatch"


class DuplicateReading(AnalyticsError):
    """A (sensor_id, timestamp) key already exists; later writes are rejected."""

    code = "duplicate_reading"


class EmptyWindow(AnalyticsError):
    code = "empty_window"


class NoData(AnalyticsError):
    """No reading within or straddling the requested window."""

    code = "no_data"


class GapExceeded(AnalyticsError):
    """Largest uncovered span inside the window exceeds max_gap.

    Carries the coverage-weighted partial result so callers can downgrade
    instead of failing outright.
    """

    code = "gap_exceeded"

    def __init__(self, message: str, *, partial_kwh: float, covered_seconds: float,
                 largest_gap_seconds: float):
        super().__init__(message)
        self.partial_kwh = partial_kwh
        self.covered_seconds = covered_seconds
        self.largest_gap_seconds = largest_gap_seconds


class NoSensors(AnalyticsError):
    code = "no_sensors"


class InsufficientCoverage(AnalyticsError):
    code = "insufficient_coverage"


class MissingProfile(AnalyticsError):
    """Baseline computation requires a registered profile with at least one
    consumption point (the preparatory step precedes observation)."""

    code = "missing_profile"


class NoDonors(AnalyticsError):
    code = "no_donors"


class DonorOutsidePeriod(AnalyticsError):
    code = "donor_outside_period"


class BaselineMismatch(AnalyticsError):
    code = "baseline_mismatch"


class ZeroFlexible(AnalyticsError):
    """Reduction is undefined when the comparison week has no flexible load."""

    code = "zero_flexible"


class MissingSeries(AnalyticsError):
    code = "missing_series"


class ThresholdNonPositive(AnalyticsError):
    code = "threshold_non_positive"


class ThresholdBelowMinimum(AnalyticsError):
    """Lux threshold below the zone's regulatory minimum light level."""

    code = "threshold_below_minimum"


class InfeasibleScenario(AnalyticsError):
    code = "infeasible_scenario"


class UnknownBaseline(AnalyticsError):
    code = "unknown_baseline"


class NoComparisonPinned(AnalyticsError):
    """Progress tracking needs an evaluated intervention to compare against."""

    code = "no_comparison_pinned"
