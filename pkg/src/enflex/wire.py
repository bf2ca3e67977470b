"""Wire format for telemetry: one reading per line.

    timestamp,sensor_id,kind,value,unit

with the timestamp as ISO-8601 UTC at second precision (e.g.
``2018-11-05T08:00:00Z``) and the value as a decimal with a ``.`` separator.
Field order is fixed.  A header line equal to the field names is skipped,
as are blank lines; both are counted.  The same format is the store's
append-only log and the body of the ingest endpoint.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Iterator

from .errors import DuplicateReading, KindMismatch, UnknownSensor
from .types import KIND_UNITS, Reading

HEADER = "timestamp,sensor_id,kind,value,unit"

_TIMESTAMP_RE = re.compile(
    r"^(\d{4})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})(Z|\+00:00)$")


class LineFormatError(ValueError):
    """A wire line that does not parse; ``reason`` is human-readable."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def parse_timestamp(text: str) -> datetime:
    m = _TIMESTAMP_RE.match(text)
    if not m:
        raise LineFormatError(f"bad timestamp: {text!r}")
    try:
        return datetime(int(m[1]), int(m[2]), int(m[3]), int(m[4]), int(m[5]),
                        int(m[6]), tzinfo=timezone.utc)
    except ValueError as exc:
        raise LineFormatError(f"bad timestamp: {text!r} ({exc})") from None


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_line(line: str) -> Reading:
    """Parse one wire line into a Reading or raise LineFormatError."""
    parts = line.split(",")
    if len(parts) != 5:
        raise LineFormatError(f"expected 5 fields, got {len(parts)}")
    ts_text, sensor_id, kind, value_text, unit = parts
    ts = parse_timestamp(ts_text)
    if not sensor_id:
        raise LineFormatError("empty sensor_id")
    if kind not in KIND_UNITS:
        raise LineFormatError(f"unknown kind: {kind!r}")
    if unit != KIND_UNITS[kind]:
        raise LineFormatError(f"unit {unit!r} does not match kind {kind!r}")
    try:
        value = float(value_text)
    except ValueError:
        raise LineFormatError(f"bad value: {value_text!r}") from None
    if not math.isfinite(value):
        raise LineFormatError(f"non-finite value: {value_text!r}")
    try:
        return Reading(sensor_id=sensor_id, timestamp=ts, value=value,
                       kind=kind, unit=unit)
    except ValueError as exc:
        raise LineFormatError(str(exc)) from None


def format_reading(reading: Reading) -> str:
    """Inverse of parse_line; float repr keeps the value bit-exact."""
    return (f"{format_timestamp(reading.timestamp)},{reading.sensor_id},"
            f"{reading.kind},{reading.value!r},{reading.unit}")


@dataclass(frozen=True)
class LineError:
    line_no: int
    reason: str

    def to_jsonable(self) -> dict:
        return {"line": self.line_no, "reason": self.reason}


@dataclass(frozen=True)
class IngestSummary:
    """Per-session outcome: valid lines commit, invalid lines report."""

    accepted: int = 0
    rejected: int = 0
    duplicates: int = 0
    skipped: int = 0
    errors: tuple[LineError, ...] = field(default_factory=tuple)

    def to_jsonable(self) -> dict:
        return {
            "accepted": self.accepted,
            "rejected": self.rejected,
            "duplicates": self.duplicates,
            "skipped": self.skipped,
            "errors": [e.to_jsonable() for e in self.errors],
        }


def iter_parsed(lines: Iterable[str]) -> Iterator[tuple[int, Reading | LineError | None]]:
    """Yield (line_no, Reading | LineError | None); None marks a skipped line."""
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line == HEADER:
            yield line_no, None
            continue
        try:
            yield line_no, parse_line(line)
        except LineFormatError as exc:
            yield line_no, LineError(line_no, exc.reason)


def ingest_lines(store, lines: Iterable[str], *, max_errors: int = 100) -> IngestSummary:
    """Parse and commit a session of wire lines; batches are not atomic.

    Accepted readings are flushed to the log before the summary returns.
    The errors list is capped at max_errors entries; counts stay exact.
    """
    accepted = rejected = duplicates = skipped = 0
    errors: list[LineError] = []
    for line_no, parsed in iter_parsed(lines):
        if parsed is None:
            skipped += 1
            continue
        if isinstance(parsed, LineError):
            rejected += 1
            if len(errors) < max_errors:
                errors.append(parsed)
            continue
        try:
            store.append(parsed, flush=False)
            accepted += 1
        except DuplicateReading:
            duplicates += 1
        except (UnknownSensor, KindMismatch) as exc:
            rejected += 1
            if len(errors) < max_errors:
                errors.append(LineError(line_no, f"{exc.code}: {exc}"))
    store.flush()
    return IngestSummary(accepted=accepted, rejected=rejected, duplicates=duplicates,
                         skipped=skipped, errors=tuple(errors))
