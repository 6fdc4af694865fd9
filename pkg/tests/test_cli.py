"""Command line surface: exit codes, artifacts on disk, report files."""

import json

import pytest

from spoofkit.cli import EXIT_DOMAIN, EXIT_OK, EXIT_SESSION, EXIT_USAGE, main
from spoofkit.signals import read_trace

from conftest import profile_doc


@pytest.fixture
def battery5_path(tmp_path):
    path = tmp_path / "battery5.json"
    path.write_text(json.dumps(profile_doc(system=[{"key": "battery.level", "value": 5}])))
    return path


@pytest.fixture
def walking_path(tmp_path):
    path = tmp_path / "walking.json"
    path.write_text(
        json.dumps(profile_doc(sensors=[{"sensor": "accelerometer", "mode": "walking"}], rate=50))
    )
    return path


@pytest.fixture
def app_path(tmp_path):
    path = tmp_path / "app.json"
    path.write_text(json.dumps({"process": "com.example.app"}))
    return path


def test_validate_ok(battery5_path, capsys):
    assert main(["validate", str(battery5_path)]) == EXIT_OK
    assert capsys.readouterr().err == ""


def test_validate_reports_errors(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(profile_doc(sensors=[{"sensor": "nope", "mode": "constant"}])))
    assert main(["validate", str(path)]) == EXIT_DOMAIN
    err = capsys.readouterr().err
    assert "error overrides.sensors[0].sensor" in err


def test_validate_warning_still_ok(tmp_path, capsys):
    path = tmp_path / "warn.json"
    path.write_text(
        json.dumps(
            profile_doc(
                sensors=[{"sensor": "ambient_temperature", "mode": "constant", "params": {"value": 30}}],
                system=[{"key": "ambient.temperature_c", "value": 28}],
            )
        )
    )
    assert main(["validate", str(path)]) == EXIT_OK
    assert "warning" in capsys.readouterr().err


def test_validate_bad_json(tmp_path, capsys):
    path = tmp_path / "mangled.json"
    path.write_text("{oops")
    assert main(["validate", str(path)]) == EXIT_DOMAIN
    assert capsys.readouterr().err.startswith("error - ")


def test_missing_file_is_usage_error(tmp_path, capsys):
    assert main(["validate", str(tmp_path / "absent.json")]) == EXIT_USAGE
    assert "no such file" in capsys.readouterr().err


def test_unknown_subcommand_is_usage_error(capsys):
    assert main(["frobnicate"]) == EXIT_USAGE


def test_synth_writes_trace(walking_path, tmp_path, capsys):
    out = tmp_path / "trace.jsonl"
    code = main(["synth", str(walking_path), "--sensor", "accelerometer", "--duration", "2", "--out", str(out)])
    assert code == EXIT_OK
    assert capsys.readouterr().out == f"wrote 100 samples to {out}\n"
    trace = read_trace(out)
    assert len(trace.samples) == 100
    assert trace.rate_hz == 50.0


def test_synth_rejects_unoverridden_sensor(battery5_path, tmp_path, capsys):
    out = tmp_path / "trace.jsonl"
    code = main(["synth", str(battery5_path), "--sensor", "gyroscope", "--duration", "1", "--out", str(out)])
    assert code == EXIT_DOMAIN
    assert "does not override" in capsys.readouterr().err
    assert not out.exists()


def test_synth_rejects_unknown_sensor(battery5_path, tmp_path, capsys):
    code = main(["synth", str(battery5_path), "--sensor", "sonar", "--duration", "1", "--out", str(tmp_path / "t.jsonl")])
    assert code == EXIT_DOMAIN
    assert "unknown sensor" in capsys.readouterr().err


def test_compile_writes_plan(battery5_path, tmp_path, capsys):
    out = tmp_path / "plan.json"
    assert main(["compile", str(battery5_path), "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["target"] == "com.example.app"
    assert doc["hooks"][0]["api"] == "battery.capacity"
    assert doc["plan_id"][:12] in capsys.readouterr().out


def test_emit_agent_writes_script(battery5_path, tmp_path):
    out = tmp_path / "agent.js"
    assert main(["emit-agent", str(battery5_path), "--out", str(out)]) == EXIT_OK
    script = out.read_text()
    assert script.startswith("'use strict';")
    assert "android.os.BatteryManager" in script


def test_run_ok(battery5_path, app_path, tmp_path, capsys):
    report_path = tmp_path / "report.json"
    code = main(["run", str(battery5_path), "--app", str(app_path), "--duration", "1", "--report", str(report_path)])
    assert code == EXIT_OK
    assert capsys.readouterr().out == "session closed, restore verified\n"
    report = json.loads(report_path.read_text())
    assert report["state"] == "CLOSED"
    assert report["restore_outcome"] == "verified"
    assert report["failure_reason"] is None


def test_run_tamper_rejection(battery5_path, tmp_path, capsys):
    app_path = tmp_path / "tamper.json"
    app_path.write_text(json.dumps({"process": "com.example.app", "tamper_mode": "reject_injection"}))
    report_path = tmp_path / "report.json"
    code = main(["run", str(battery5_path), "--app", str(app_path), "--duration", "1", "--report", str(report_path)])
    assert code == EXIT_SESSION
    assert "injection rejected" in capsys.readouterr().err
    report = json.loads(report_path.read_text())
    assert report["state"] == "FAILED"
    assert report["failure_reason"] == "injection rejected"


def test_run_attach_failure_still_writes_report(battery5_path, tmp_path, capsys):
    app_path = tmp_path / "other.json"
    app_path.write_text(json.dumps({"process": "com.other.app"}))
    report_path = tmp_path / "report.json"
    code = main(["run", str(battery5_path), "--app", str(app_path), "--duration", "1", "--report", str(report_path)])
    assert code == EXIT_SESSION
    report = json.loads(report_path.read_text())
    assert report["state"] == "FAILED"
    assert "no such process" in report["failure_reason"]


def test_run_wall_clock(walking_path, app_path, tmp_path):
    report_path = tmp_path / "report.json"
    code = main(
        ["run", str(walking_path), "--app", str(app_path), "--duration", "0.1", "--report", str(report_path), "--clock", "wall"]
    )
    assert code == EXIT_OK
    assert json.loads(report_path.read_text())["samples_sent"] == {"accelerometer": 5}


def test_replay_trace(walking_path, app_path, tmp_path, capsys):
    trace_path = tmp_path / "trace.jsonl"
    main(["synth", str(walking_path), "--sensor", "accelerometer", "--duration", "2", "--out", str(trace_path)])
    capsys.readouterr()
    report_path = tmp_path / "replay_report.json"
    code = main(["replay", str(trace_path), "--app", str(app_path), "--report", str(report_path)])
    assert code == EXIT_OK
    report = json.loads(report_path.read_text())
    assert report["state"] == "CLOSED"
    assert report["samples_sent"] == {"accelerometer": 100}
    assert report["duration_s"] == 2.0


def test_replay_bad_trace(tmp_path, app_path, capsys):
    trace_path = tmp_path / "bad.jsonl"
    trace_path.write_text('{"sensor":"accelerometer","rate_hz":50,"seed":0}\n{"t_ns":1}\n')
    code = main(["replay", str(trace_path), "--app", str(app_path), "--report", str(tmp_path / "r.json")])
    assert code == EXIT_DOMAIN
    assert "error" in capsys.readouterr().err


def test_synthesized_files_byte_identical(walking_path, tmp_path, capsys):
    out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    main(["synth", str(walking_path), "--sensor", "accelerometer", "--duration", "5", "--out", str(out1)])
    main(["synth", str(walking_path), "--sensor", "accelerometer", "--duration", "5", "--out", str(out2)])
    assert out1.read_bytes() == out2.read_bytes()
