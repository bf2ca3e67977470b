import pytest

from enflex.store import TelemetryStore
from enflex.types import Building, Sensor
from enflex.wire import (
    HEADER,
    LineError,
    LineFormatError,
    format_reading,
    ingest_lines,
    iter_parsed,
    parse_line,
)

from conftest import reading, utc


class TestParseLine:
    def test_valid_power_line(self):
        r = parse_line("2018-11-05T08:00:00Z,main-meter,power,5912.5,W")
        assert r.sensor_id == "main-meter"
        assert r.value == 5912.5
        assert r.timestamp == utc(2018, 11, 5, 8)

    def test_unit_kind_mismatch(self):
        with pytest.raises(LineFormatError, match="does not match"):
            parse_line("2018-11-05T08:00:00Z,m,power,4900,lux")

    def test_bad_timestamp(self):
        with pytest.raises(LineFormatError, match="bad timestamp"):
            parse_line("2018-11-05 08:00:00,m,power,1,W")

    def test_unknown_kind(self):
        with pytest.raises(LineFormatError, match="unknown kind"):
            parse_line("2018-11-05T08:00:00Z,m,pressure,1,W")

    def test_non_finite_value(self):
        with pytest.raises(LineFormatError, match="non-finite"):
            parse_line("2018-11-05T08:00:00Z,m,power,nan,W")

    def test_wrong_field_count(self):
        with pytest.raises(LineFormatError, match="5 fields"):
            parse_line("2018-11-05T08:00:00Z,m,power,1")

    def test_negative_power_rejected(self):
        with pytest.raises(LineFormatError):
            parse_line("2018-11-05T08:00:00Z,m,power,-5,W")

    def test_offset_zero_accepted(self):
        r = parse_line("2018-11-05T08:00:00+00:00,m,power,1.0,W")
        assert r.timestamp == utc(2018, 11, 5, 8)


def test_format_parse_roundtrip():
    original = reading("main-meter", utc(2018, 11, 5, 8), 5912.5)
    line = format_reading(original)
    assert line == "2018-11-05T08:00:00Z,main-meter,power,5912.5,W"
    assert parse_line(line) == original


def test_roundtrip_preserves_awkward_floats():
    for v in (0.1, 1e-9, 123456.789012345, 4900.0):
        original = reading("m", utc(2019, 1, 1), v)
        assert parse_line(format_reading(original)) == original


def test_iter_parsed_skips_blank_and_header():
    lines = [HEADER, "", "2018-11-05T08:00:00Z,m,power,1.0,W", "   ", "junk"]
    out = list(iter_parsed(lines))
    assert out[0][1] is None
    assert out[1][1] is None
    assert out[2][1].value == 1.0
    assert out[3][1] is None
    assert isinstance(out[4][1], LineError)
    assert out[4][1].line_no == 5


class TestIngestLines:
    def _store(self):
        store = TelemetryStore()
        store.add_building(Building(building_id="bld"))
        store.add_sensor(Sensor(sensor_id="m", kind="power", building_id="bld"))
        return store

    def test_thousand_valid_records(self):
        store = self._store()
        lines = [f"2019-01-01T{i // 60:02d}:{i % 60:02d}:00Z,m,power,10.0,W"
                 for i in range(1000)]
        s = ingest_lines(store, lines)
        assert (s.accepted, s.rejected, s.duplicates) == (1000, 0, 0)

    def test_duplicate_counted_once(self):
        store = self._store()
        line = "2019-01-01T00:00:00Z,m,power,10.0,W"
        s = ingest_lines(store, [line, line])
        assert (s.accepted, s.rejected, s.duplicates) == (1, 0, 1)

    def test_valid_plus_malformed(self):
        store = self._store()
        lines = [f"2019-01-01T00:{i:02d}:00Z,m,power,10.0,W" for i in range(10)]
        lines += ["garbage", "2019-01-01T00:30:00Z,m,power,oops,W"]
        s = ingest_lines(store, lines)
        assert (s.accepted, s.rejected, s.duplicates) == (10, 2, 0)
        assert len(s.errors) == 2
        assert s.errors[0].line_no == 11

    def test_unknown_sensor_rejected(self):
        store = self._store()
        s = ingest_lines(store, ["2019-01-01T00:00:00Z,ghost,power,1.0,W"])
        assert (s.accepted, s.rejected) == (0, 1)
        assert "unknown_sensor" in s.errors[0].reason

    def test_order_independence_of_store_state(self):
        lines = [f"2019-01-01T{h:02d}:{m:02d}:00Z,m,power,{h * 60 + m}.0,W"
                 for h in range(2) for m in range(60)]
        a, b = self._store(), self._store()
        ingest_lines(a, lines)
        import random
        shuffled = lines[:]
        random.Random(5).shuffle(shuffled)
        ingest_lines(b, shuffled)
        assert a.snapshot().series("m") == b.snapshot().series("m")
