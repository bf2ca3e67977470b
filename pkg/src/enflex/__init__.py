"""Energy-savings analytics for instrumented school buildings.

Telemetry comes in over a line-based wire format (files, HTTP, or the
deterministic simulator), lands in an append-only store, and feeds a
five-step workflow: building profile, no-class baseline, week analysis of
the flexible share, intervention evaluation, and weekly progress tracking.
A waste detector flags lights burning under sufficient daylight and
oversized weekend baseload.
"""

from .engine import AnalyticsEngine, LiveStatus, WasteReport
from .errors import AnalyticsError
from .methodology import (
    BaselineModel,
    BuildingProfile,
    ConsumptionPoint,
    DateRange,
    InterventionResult,
    Occupancy,
    ProgressPoint,
    Substitution,
    Timetable,
    WeekAnalysis,
)
from .series import daily_energy, diff_energy_counter, integrate_power, resample
from .simulate import SimScenario, simulate_lines
from .store import TelemetryStore
from .types import Building, DailyEnergy, Reading, Sensor
from .waste import OccupancyContrast, WasteInterval

__version__ = "0.1.0"

__all__ = [
    "AnalyticsEngine",
    "AnalyticsError",
    "BaselineModel",
    "Building",
    "BuildingProfile",
    "ConsumptionPoint",
    "DailyEnergy",
    "DateRange",
    "InterventionResult",
    "LiveStatus",
    "Occupancy",
    "OccupancyContrast",
    "ProgressPoint",
    "Reading",
    "Sensor",
    "SimScenario",
    "Substitution",
    "TelemetryStore",
    "Timetable",
    "WasteInterval",
    "WasteReport",
    "WeekAnalysis",
    "daily_energy",
    "diff_energy_counter",
    "integrate_power",
    "resample",
    "simulate_lines",
]
