"""Mock app semantics: query resolution, dedup, rules, tamper."""

import json

import pytest

from spoofkit import wire
from spoofkit.errors import ConfigError, DuplicateProcess
from spoofkit.mockdev import DEFAULT_BASELINE, MockApp, config_from_doc, spawn_mock_app
from spoofkit.profile import SensorType, SystemKey
from spoofkit.transport import MockTransport


def deliver(app, **msg):
    return app.deliver(msg)


def test_default_baseline_query():
    app = MockApp("x")
    assert app.query_value("battery.level") == 87
    assert app.query_value(SystemKey.BUILD_MODEL) == "MockPhone"
    assert app.query_value("ambient.temperature_c") == 21.0


def test_baseline_override_in_config():
    process, baseline, rules, tamper = config_from_doc(
        {"process": "x", "baseline": {"battery.level": 42}}
    )
    app = MockApp(process, baseline, rules, tamper)
    assert app.query_value("battery.level") == 42
    assert app.query_value("battery.charging") is DEFAULT_BASELINE[SystemKey.BATTERY_CHARGING]


def test_config_rejections():
    for doc, fragment in [
        ({"process": ""}, "process"),
        ({"process": "x", "junk": 1}, "junk"),
        ({"process": "x", "baseline": {"battery.level": 200}}, "out of domain"),
        ({"process": "x", "baseline": {"nope": 1}}, "unknown baseline key"),
        ({"process": "x", "tamper_mode": "explode"}, "tamper_mode"),
        ({"process": "x", "rules": [{"name": "r"}]}, "rules[0]"),
        (
            {"process": "x", "rules": [{"name": "r", "when": {"kind": "threshold", "key": "battery.level", "op": "<", "value": 10}}]},
            "no effect",
        ),
    ]:
        with pytest.raises(ConfigError) as info:
            config_from_doc(doc)
        assert fragment in str(info.value), doc


def test_property_override_wins_over_baseline():
    app = MockApp("x")
    deliver(app, type="set_property", seq=1, key="battery.level", value=5)
    assert app.query_value("battery.level") == 5


def test_latest_ambient_sample_feeds_temperature_query():
    app = MockApp("x")
    assert app.query_value("ambient.temperature_c") == 21.0
    deliver(app, type="sample", seq=1, sensor="ambient_temperature", t_ns=1000, values=[30.5])
    assert app.query_value("ambient.temperature_c") == 30.5
    # an explicit property override still wins
    deliver(app, type="set_property", seq=2, key="ambient.temperature_c", value=19)
    assert app.query_value("ambient.temperature_c") == 19


def test_query_message_roundtrip():
    app = MockApp("x")
    (resp,) = deliver(app, type="query", seq=1, key="build.model")
    assert resp == {"type": "value", "ref": 1, "key": "build.model", "value": "MockPhone"}


def test_unknown_query_key_nacked():
    app = MockApp("x")
    (resp,) = deliver(app, type="query", seq=1, key="cpu.load")
    assert resp == {"type": "nack", "ref": 1, "reason": "unknown key 'cpu.load'"}


def test_duplicate_seq_reacked_without_reprocessing():
    app = MockApp("x")
    deliver(app, type="set_property", seq=5, key="battery.level", value=50)
    (resp,) = deliver(app, type="set_property", seq=5, key="battery.level", value=10)
    assert resp == {"type": "ack", "ref": 5}
    assert app.query_value("battery.level") == 50  # second delivery ignored


def test_stale_seq_reacked():
    app = MockApp("x")
    deliver(app, type="set_property", seq=5, key="battery.level", value=50)
    (resp,) = deliver(app, type="set_property", seq=3, key="battery.level", value=10)
    assert resp == {"type": "ack", "ref": 3}
    assert app.query_value("battery.level") == 50


def test_malformed_messages_nacked():
    app = MockApp("x")
    (resp,) = deliver(app, type="sample", seq="one")
    assert resp == {"type": "nack", "ref": -1, "reason": "malformed message"}
    (resp,) = app.deliver({"seq": 1})
    assert resp["reason"] == "malformed message"
    (resp,) = deliver(app, type="selfdestruct", seq=1)
    assert resp == {"type": "nack", "ref": 1, "reason": "unknown message type"}


def test_sample_validation():
    app = MockApp("x")
    (resp,) = deliver(app, type="sample", seq=1, sensor="heartrate", t_ns=0, values=[1])
    assert resp["reason"] == "unknown sensor 'heartrate'"
    (resp,) = deliver(app, type="sample", seq=2, sensor="accelerometer", t_ns=0, values=[1, 2])
    assert resp["reason"] == "dimension mismatch"
    (resp,) = deliver(app, type="sample", seq=3, sensor="accelerometer", t_ns=-1, values=[1, 2, 3])
    assert resp["reason"] == "malformed message"
    (resp,) = deliver(app, type="sample", seq=4, sensor="accelerometer", t_ns=0, values=[1, 2, True])
    assert resp["reason"] == "malformed message"


def test_apply_plan_installs_overrides():
    app = MockApp("x")
    plan = {
        "plan_id": "p",
        "target": "x",
        "hooks": [
            {"api": "battery.capacity", "kind": "property_constant", "payload": {"key": "battery.level", "value": 5}},
            {"api": "sensor.accelerometer.onSensorChanged", "kind": "sensor_stream", "payload": {"mode": "walking", "params": {}}, "rate_hz": 50},
        ],
    }
    (resp,) = deliver(app, type="apply_plan", seq=1, plan=plan)
    assert resp == {"type": "ack", "ref": 1}
    assert app.query_value("battery.level") == 5
    assert "accelerometer" in app.spoofed_sensors


def test_tamper_mode_rejects_plan():
    app = MockApp("x", tamper_mode="reject_injection")
    (resp,) = deliver(app, type="apply_plan", seq=1, plan={"hooks": []})
    assert resp == {"type": "nack", "ref": 1, "reason": "injection rejected"}
    assert app.property_overrides == {}
    # everything else still works
    (resp,) = deliver(app, type="query", seq=2, key="battery.level")
    assert resp["value"] == 87


def test_restore_clears_everything_and_is_idempotent():
    app = MockApp("x")
    deliver(app, type="set_property", seq=1, key="battery.level", value=5)
    deliver(app, type="sample", seq=2, sensor="ambient_temperature", t_ns=10, values=[30])
    (resp,) = deliver(app, type="restore", seq=3)
    assert resp == {"type": "ack", "ref": 3}
    assert app.query_value("battery.level") == 87
    assert app.query_value("ambient.temperature_c") == 21.0
    (resp,) = deliver(app, type="restore", seq=4)
    assert resp == {"type": "ack", "ref": 4}


# -- behavior rules -----------------------------------------------------------


def rule_app(*rules):
    return MockApp("x", rules=config_from_doc({"process": "x", "rules": list(rules)})[2])


def test_threshold_rule_fires_once_on_falling_level():
    app = rule_app({"name": "low", "when": {"kind": "threshold", "key": "battery.level", "op": "<", "value": 20}, "emit": "low_battery"})
    events = []
    for seq, level in enumerate([25, 18, 15], start=1):
        out = deliver(app, type="set_property", seq=seq, key="battery.level", value=level)
        events.extend(o for o in out if o["type"] == "event")
    assert [e["name"] for e in events] == ["low_battery"]
    assert app.event_log == events


def test_threshold_rule_rearms_after_recovery():
    app = rule_app({"name": "low", "when": {"kind": "threshold", "key": "battery.level", "op": "<", "value": 20}, "emit": "low_battery"})
    names = []
    for seq, level in enumerate([15, 50, 10], start=1):
        out = deliver(app, type="set_property", seq=seq, key="battery.level", value=level)
        names.extend(o["name"] for o in out if o["type"] == "event")
    assert names == ["low_battery", "low_battery"]


def test_magnitude_rule_with_sustain():
    app = rule_app({"name": "fall", "when": {"kind": "magnitude", "sensor": "accelerometer", "op": ">", "value": 30, "sustain_samples": 2}, "emit": "fall_alarm"})
    seqs = [
        ([0, 0, 31], 0),  # 1 of 2
        ([0, 0, 9.8], 0),  # reset
        ([0, 0, 32], 0),  # 1 of 2
        ([0, 0, 33], 1),  # 2 of 2 -> event
        ([0, 0, 34], 0),  # still true, no re-fire
    ]
    for i, (values, expected_events) in enumerate(seqs, start=1):
        out = deliver(app, type="sample", seq=i, sensor="accelerometer", t_ns=i * 20_000_000, values=values)
        got = [o for o in out if o["type"] == "event"]
        assert len(got) == expected_events, (i, out)


def test_delta_rule_window():
    app = rule_app({"name": "active", "when": {"kind": "delta", "sensor": "step_counter", "min_increase": 30, "window_s": 60}, "emit": "active_minute"})
    fired = []
    t = 0
    for i, count in enumerate([0, 10, 20, 29, 31, 40], start=1):
        t = i * 10_000_000_000  # ten-second strides
        out = deliver(app, type="sample", seq=i, sensor="step_counter", t_ns=t, values=[count])
        fired.extend(o["name"] for o in out if o["type"] == "event")
    # 31 - 0 >= 30 inside one 60 s window, exactly one rising edge
    assert fired == ["active_minute"]


def test_delta_rule_window_expires():
    app = rule_app({"name": "active", "when": {"kind": "delta", "sensor": "step_counter", "min_increase": 30, "window_s": 60}, "emit": "active_minute"})
    fired = []
    samples = [(0, 0), (70_000_000_000, 10), (140_000_000_000, 20)]  # 10 steps per 70 s
    for i, (t_ns, count) in enumerate(samples, start=1):
        out = deliver(app, type="sample", seq=i, sensor="step_counter", t_ns=t_ns, values=[count])
        fired.extend(o["name"] for o in out if o["type"] == "event")
    assert fired == []


def test_set_flag_rule():
    app = rule_app({"name": "saver", "when": {"kind": "threshold", "key": "battery.level", "op": "<=", "value": 10}, "set_flag": "battery_saver"})
    deliver(app, type="set_property", seq=1, key="battery.level", value=8)
    assert app.mode_flags == {"battery_saver": True}


def test_apply_plan_triggers_rule_evaluation():
    app = rule_app({"name": "saver", "when": {"kind": "threshold", "key": "battery.level", "op": "<", "value": 20}, "emit": "battery_saver_on"})
    plan = {"hooks": [{"api": "battery.capacity", "kind": "property_constant", "payload": {"key": "battery.level", "value": 5}}]}
    out = deliver(app, type="apply_plan", seq=1, plan=plan)
    assert [o["type"] for o in out] == ["ack", "event"]
    assert out[1]["name"] == "battery_saver_on"


def test_event_seq_increments():
    app = rule_app(
        {"name": "a", "when": {"kind": "threshold", "key": "battery.level", "op": "<", "value": 50}, "emit": "a"},
        {"name": "b", "when": {"kind": "threshold", "key": "battery.level", "op": "<", "value": 40}, "emit": "b"},
    )
    out = deliver(app, type="set_property", seq=1, key="battery.level", value=30)
    events = [o for o in out if o["type"] == "event"]
    assert [e["seq"] for e in events] == [1, 2]


# -- transports ---------------------------------------------------------------


def test_spawn_and_wire_roundtrip():
    transport = MockTransport()
    app = spawn_mock_app(json.dumps({"process": "com.a"}), transport)
    transport.attach("com.a")
    transport.send(wire.encode_line({"type": "query", "seq": 1, "key": "battery.level"}))
    line = transport.receive()
    assert json.loads(line) == {"type": "value", "ref": 1, "key": "battery.level", "value": 87}
    assert transport.receive() is None
    assert app.received[0]["type"] == "query"


def test_duplicate_process_rejected():
    transport = MockTransport()
    spawn_mock_app({"process": "com.a"}, transport)
    with pytest.raises(DuplicateProcess):
        spawn_mock_app({"process": "com.a"}, transport)


def test_attach_unknown_process():
    from spoofkit.errors import AttachError

    transport = MockTransport()
    with pytest.raises(AttachError):
        transport.attach("com.missing")


def test_baseline_sensor_values():
    app = MockApp("x")
    assert app.baseline_sensor_values(SensorType.ACCELEROMETER) == (0.0, 0.0, 9.81)
    assert app.baseline_sensor_values(SensorType.GYROSCOPE) == (0.0, 0.0, 0.0)
    assert app.baseline_sensor_values(SensorType.STEP_COUNTER) == (0.0,)
    assert app.baseline_sensor_values(SensorType.AMBIENT_TEMPERATURE) == (21.0,)
