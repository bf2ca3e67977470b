"""CLI flows: exit codes, table output, JSON mode."""
import contextlib
import io
import json

import pytest

from enflex import cli

from test_service import PROFILE_JSON


def run_cli(args):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        rc = cli.main(args)
    return rc, out.getvalue(), err.getvalue()


@pytest.fixture()
def soderhamn_store(tmp_path):
    store = str(tmp_path / "store")
    rc, _, err = run_cli(["--store", store, "simulate", "soderhamn", "--ingest"])
    assert rc == 0, err
    profile = tmp_path / "profile.json"
    profile.write_text(json.dumps(PROFILE_JSON))
    rc, _, err = run_cli([
        "--store", store, "baseline", "--building", "skola",
        "--start", "2018-10-29", "--end", "2018-11-04",
        "--anomaly",
        "2018-10-29=2018-10-30+2018-10-31+2018-11-01:staff working",
        "--profile", str(profile)])
    assert rc == 0, err
    return store


class TestSimulate:
    def test_writes_stream_to_file(self, tmp_path):
        out_file = tmp_path / "stream.csv"
        rc, _, _ = run_cli(["simulate", "hall-lighting", "--out", str(out_file)])
        assert rc == 0
        lines = out_file.read_text().splitlines()
        assert len(lines) > 1000
        assert lines[0].count(",") == 4

    def test_unknown_scenario_is_io_error(self, tmp_path):
        rc, _, err = run_cli(["simulate", "nope.json"])
        assert rc == 2
        assert "no such scenario" in err

    def test_custom_scenario_file(self, tmp_path):
        from enflex.simulate import soderhamn_scenario
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(soderhamn_scenario().to_dict()))
        rc, out, _ = run_cli(["simulate", str(path)])
        assert rc == 0
        assert out.splitlines()[0].count(",") == 4


class TestIngest:
    def test_ingest_file(self, tmp_path):
        stream = tmp_path / "stream.csv"
        run_cli(["simulate", "soderhamn", "--out", str(stream)])
        store = str(tmp_path / "store")
        # sensors must exist: register via simulate --ingest of an empty clone
        rc, out, err = run_cli(["--store", store, "ingest", str(stream)])
        # every line rejected (unregistered sensors), still a clean run report
        assert rc == 1
        assert "rejected" in out

    def test_ingest_after_registration(self, tmp_path):
        store = str(tmp_path / "store")
        run_cli(["--store", store, "simulate", "soderhamn", "--ingest"])
        stream = tmp_path / "more.csv"
        stream.write_text("2019-01-07T08:00:00Z,skola-main,power,1000.0,W\n")
        rc, out, _ = run_cli(["--store", store, "ingest", str(stream)])
        assert rc == 0
        assert "accepted 1" in out

    def test_missing_file_is_io_error(self, tmp_path):
        rc, _, err = run_cli(["--store", str(tmp_path / "s"), "ingest", "missing.csv"])
        assert rc == 2


class TestEvaluate:
    def test_prints_21_percent(self, soderhamn_store):
        rc, out, err = run_cli([
            "--store", soderhamn_store, "evaluate", "--building", "skola",
            "--comparison", "w47", "--saving", "w50"])
        assert rc == 0, err
        assert "21%" in out

    def test_json_carries_unrounded_fraction(self, soderhamn_store):
        rc, out, _ = run_cli([
            "--store", soderhamn_store, "--format", "json", "evaluate",
            "--building", "skola", "--comparison", "w47", "--saving", "w50"])
        body = json.loads(out)
        assert body["reduction_fraction"] == pytest.approx(1 - 54.6 / 69.1, abs=1e-3)
        assert body["reduction_display"] == "21%"


class TestAnalyzeWeek:
    def test_table_output(self, soderhamn_store):
        rc, out, _ = run_cli(["--store", soderhamn_store, "analyze-week",
                              "--building", "skola", "--week", "2018-W47"])
        assert rc == 0
        assert "mean 211.0 kWh/day" in out
        assert "flexible 69.1 kWh/day" in out

    def test_missing_week_fails_validation(self, soderhamn_store):
        rc, _, err = run_cli(["--store", soderhamn_store, "analyze-week",
                              "--building", "skola", "--week", "2018-W48"])
        assert rc == 1
        assert "insufficient_coverage" in err


class TestDetectWaste:
    def test_lux_fixture_21_kwh(self, tmp_path):
        store = str(tmp_path / "store")
        run_cli(["--store", store, "simulate", "hall-lighting", "--ingest"])
        rc, out, err = run_cli([
            "--store", store, "detect-waste", "--building", "liceo",
            "--day", "2019-03-12", "--threshold", "400",
            "--floor-kw", "1.0", "--minimal-kw", "1.9"])
        assert rc == 0, err
        assert "21.0 kWh/day" in out
        assert "excess 3.0 kW" in out

    def test_threshold_below_minimum_fails(self, tmp_path):
        store = str(tmp_path / "store")
        run_cli(["--store", store, "simulate", "hall-lighting", "--ingest"])
        rc, _, err = run_cli([
            "--store", store, "detect-waste", "--building", "liceo",
            "--day", "2019-03-12", "--threshold", "100"])
        assert rc == 1
        assert "threshold_below_minimum" in err


class TestContrast:
    def test_weekend_scenario(self, tmp_path):
        store = str(tmp_path / "store")
        run_cli(["--store", store, "simulate", "weekend-contrast", "--ingest"])
        rc, out, _ = run_cli([
            "--store", store, "contrast", "--building", "gymnasio",
            "--from", "2019-01-07", "--to", "2019-04-30"])
        assert rc == 0
        assert "ratio 0.3243" in out
        assert "ALERT" in out


class TestProgressAndReport:
    def test_progress_table(self, soderhamn_store):
        run_cli(["--store", soderhamn_store, "evaluate", "--building", "skola",
                 "--comparison", "2018-W47", "--saving", "2018-W50"])
        rc, out, _ = run_cli(["--store", soderhamn_store, "progress",
                              "--building", "skola"])
        assert rc == 0
        assert "2018-W50" in out and "21%" in out
        assert "no usable data" in out  # weeks 48/49

    def test_report_empty_store_exits_1(self, tmp_path):
        store = str(tmp_path / "empty")
        run_cli(["--store", store, "simulate", "soderhamn", "--ingest"])
        # a different building with no data at all
        rc, _, err = run_cli(["--store", store, "report", "--building", "skola"])
        assert rc == 0
        empty = str(tmp_path / "void")
        from enflex.store import TelemetryStore
        from enflex.types import Building
        s = TelemetryStore(empty)
        s.add_building(Building(building_id="skola"))
        s.close()
        rc, _, err = run_cli(["--store", empty, "report", "--building", "skola"])
        assert rc == 1
        assert "no data" in err

    def test_full_report_table(self, soderhamn_store):
        run_cli(["--store", soderhamn_store, "evaluate", "--building", "skola",
                 "--comparison", "2018-W47", "--saving", "2018-W50"])
        rc, out, _ = run_cli(["--store", soderhamn_store, "report",
                              "--building", "skola"])
        assert rc == 0
        assert "Baseline" in out and "Comparison" in out and "Energy saving" in out
        assert "141.9" in out and "211.0" in out and "196.5" in out
        assert "69.1" in out and "54.6" in out
        assert "21%" in out


class TestConfigFile:
    def test_config_registers_buildings_and_sensors(self, tmp_path):
        config = tmp_path / "enflex.conf"
        store = tmp_path / "store"
        config.write_text(
            f"[service]\nstore_path = {store}\ntoken = secret\n\n"
            "[building:villa]\ntimezone = Europe/Rome\n\n"
            "[sensor:villa-main]\nbuilding = villa\nkind = power\n")
        stream = tmp_path / "in.csv"
        stream.write_text("2019-01-07T08:00:00Z,villa-main,power,500.0,W\n")
        rc, out, _ = run_cli(["--config", str(config), "ingest", str(stream)])
        assert rc == 0
        assert "accepted 1" in out
