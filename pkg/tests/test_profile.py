"""Profile parsing, validation diagnostics, and document round-trips."""

import json

import pytest

from spoofkit.errors import ProfileSyntaxError, SchemaError
from spoofkit.profile import (
    DEFAULT_RATE_HZ,
    SensorOverride,
    SensorType,
    SignalSpec,
    SpoofProfile,
    SystemKey,
    SystemOverride,
    parse_profile,
    parse_profile_diagnostics,
    serialize_profile,
    validate_profile,
)

from conftest import profile_text


def errors_of(diags):
    return [d for d in diags if d.severity == "error"]


def warnings_of(diags):
    return [d for d in diags if d.severity == "warning"]


def test_minimal_profile_parses():
    p = parse_profile(profile_text())
    assert p.version == 1
    assert p.target == "com.example.app"
    assert p.sensor_overrides == ()
    assert p.system_overrides == ()
    assert p.default_rate_hz == DEFAULT_RATE_HZ


def test_battery_value_form(battery5_text):
    p = parse_profile(battery5_text)
    (override,) = p.system_overrides
    assert override.key is SystemKey.BATTERY_LEVEL
    assert override.program == SignalSpec("constant", {"value": 5})


def test_sensor_override_with_params_and_rate():
    text = profile_text(
        sensors=[
            {
                "sensor": "accelerometer",
                "mode": "walking",
                "params": {"noise_sigma": 0.05, "seed": 7},
                "rate_hz": 100,
            }
        ]
    )
    p = parse_profile(text)
    (so,) = p.sensor_overrides
    assert so.sensor is SensorType.ACCELEROMETER
    assert so.signal == SignalSpec("walking", {"noise_sigma": 0.05}, seed=7)
    assert so.rate_hz == 100.0


def test_bad_json_raises_syntax_error():
    with pytest.raises(ProfileSyntaxError):
        parse_profile("{not json")


def test_schema_error_carries_path_and_diagnostics():
    text = profile_text(sensors=[{"sensor": "thermometer", "mode": "constant"}])
    with pytest.raises(SchemaError) as info:
        parse_profile(text)
    assert info.value.path == "overrides.sensors[0].sensor"
    assert "thermometer" in info.value.reason
    assert errors_of(info.value.diagnostics)


@pytest.mark.parametrize(
    "doc,path_part",
    [
        ({"target": {"process": "x"}}, "version"),
        ({"version": 2, "target": {"process": "x"}}, "version"),
        ({"version": 1}, "target"),
        ({"version": 1, "target": {"process": ""}}, "target"),
        ({"version": 1, "target": {"process": "x"}, "junk": 1}, "junk"),
        ({"version": 1, "target": {"process": "x"}, "default_rate_hz": -5}, "default_rate_hz"),
    ],
)
def test_document_level_errors(doc, path_part):
    profile, diags = parse_profile_diagnostics(json.dumps(doc))
    assert profile is None
    assert any(path_part in d.path for d in errors_of(diags))


def test_unknown_mode_rejected():
    _, diags = parse_profile_diagnostics(
        profile_text(sensors=[{"sensor": "accelerometer", "mode": "teleport"}])
    )
    assert any("teleport" in d.message for d in errors_of(diags))


def test_incompatible_mode_rejected():
    # a gait oscillation makes no sense on a thermometer
    _, diags = parse_profile_diagnostics(
        profile_text(sensors=[{"sensor": "ambient_temperature", "mode": "walking"}])
    )
    errs = errors_of(diags)
    assert len(errs) == 1
    assert "walking" in errs[0].message


def test_unknown_param_rejected():
    _, diags = parse_profile_diagnostics(
        profile_text(sensors=[{"sensor": "accelerometer", "mode": "walking", "params": {"speed": 3}}])
    )
    assert any("speed" in d.message for d in errors_of(diags))


def test_param_domain_checked():
    _, diags = parse_profile_diagnostics(
        profile_text(sensors=[{"sensor": "accelerometer", "mode": "walking", "params": {"noise_sigma": -1}}])
    )
    assert errors_of(diags)


def test_negative_seed_rejected():
    _, diags = parse_profile_diagnostics(
        profile_text(sensors=[{"sensor": "accelerometer", "mode": "walking", "params": {"seed": -1}}])
    )
    assert any("seed" in d.path for d in errors_of(diags))


def test_system_value_and_program_are_exclusive():
    _, diags = parse_profile_diagnostics(
        profile_text(system=[{"key": "battery.level", "value": 5, "program": {"mode": "constant"}}])
    )
    assert any("exactly one" in d.message for d in errors_of(diags))


def test_system_value_domain_checked():
    for bad in (101, -1, 5.5):
        _, diags = parse_profile_diagnostics(
            profile_text(system=[{"key": "battery.level", "value": bad}])
        )
        assert errors_of(diags), bad


def test_charging_must_be_bool():
    _, diags = parse_profile_diagnostics(
        profile_text(system=[{"key": "battery.charging", "value": 1}])
    )
    assert errors_of(diags)
    p = parse_profile(profile_text(system=[{"key": "battery.charging", "value": True}]))
    assert p.system_overrides[0].program.params["value"] is True


def test_program_mode_restricted_per_key():
    # a discharge curve on a build string is unmappable
    _, diags = parse_profile_diagnostics(
        profile_text(
            system=[{"key": "build.model", "program": {"mode": "battery_discharge", "params": {"start_level": 50, "discharge_rate": 1}}}]
        )
    )
    assert errors_of(diags)


def test_clock_override_owns_single_param():
    ok = profile_text(
        system=[{"key": "clock.offset_ms", "program": {"mode": "clock_warp", "params": {"offset_ms": 60000}}}]
    )
    p = parse_profile(ok)
    assert p.system_overrides[0].program.params == {"offset_ms": 60000}

    mixed = profile_text(
        system=[{"key": "clock.offset_ms", "program": {"mode": "clock_warp", "params": {"offset_ms": 1, "scale": 2}}}]
    )
    _, diags = parse_profile_diagnostics(mixed)
    assert any("conflicting clock parameters" in d.message for d in errors_of(diags))


def test_duplicate_sensor_rejected():
    _, diags = parse_profile_diagnostics(
        profile_text(
            sensors=[
                {"sensor": "accelerometer", "mode": "walking"},
                {"sensor": "accelerometer", "mode": "running"},
            ]
        )
    )
    assert any("duplicate sensor type" in d.message for d in errors_of(diags))


def test_duplicate_system_key_rejected():
    _, diags = parse_profile_diagnostics(
        profile_text(
            system=[
                {"key": "battery.level", "value": 5},
                {"key": "battery.level", "value": 50},
            ]
        )
    )
    assert any("duplicate system key" in d.message for d in errors_of(diags))


def test_high_rate_warns_but_parses():
    profile, diags = parse_profile_diagnostics(
        profile_text(sensors=[{"sensor": "gyroscope", "mode": "constant", "params": {"value": [0, 0, 0]}, "rate_hz": 2000}])
    )
    assert profile is not None
    assert any("unusually high sampling rate" in d.message for d in warnings_of(diags))
    assert not errors_of(diags)


def test_ambient_shadow_warning():
    profile, diags = parse_profile_diagnostics(
        profile_text(
            sensors=[{"sensor": "ambient_temperature", "mode": "constant", "params": {"value": 30}}],
            system=[{"key": "ambient.temperature_c", "value": 28}],
        )
    )
    assert profile is not None
    assert any("shadowed" in d.message for d in warnings_of(diags))


def test_validate_profile_on_constructed_object():
    profile = SpoofProfile(
        version=1,
        target="x",
        sensor_overrides=(
            SensorOverride(SensorType.STEP_COUNTER, SignalSpec("shake_spike", {"spike_magnitude": 10})),
        ),
        system_overrides=(),
    )
    diags = validate_profile(profile)
    assert any(d.severity == "error" for d in diags)


def test_serialize_roundtrip_value_form(battery5_text):
    p = parse_profile(battery5_text)
    text = serialize_profile(p)
    assert parse_profile(text) == p
    # a plain constant override keeps the compact value form
    assert '"value": 5' in text
    assert '"program"' not in text


def test_serialize_roundtrip_rich_profile():
    text = profile_text(
        sensors=[
            {"sensor": "accelerometer", "mode": "running", "params": {"noise_sigma": 0.1, "seed": 3}},
            {"sensor": "step_counter", "mode": "walking", "rate_hz": 25},
        ],
        system=[
            {"key": "battery.level", "program": {"mode": "battery_discharge", "params": {"start_level": 64, "discharge_rate": 2}}},
            {"key": "build.model", "value": "Pixel 4"},
            {"key": "clock.scale", "program": {"mode": "clock_warp", "params": {"scale": 10}}},
        ],
        rate=50,
    )
    p = parse_profile(text)
    assert parse_profile(serialize_profile(p)) == p


def test_serialized_seed_travels_in_params():
    p = parse_profile(
        profile_text(sensors=[{"sensor": "gyroscope", "mode": "running", "params": {"seed": 11}}])
    )
    assert p.sensor_overrides[0].signal.seed == 11
    doc = json.loads(serialize_profile(p))
    assert doc["overrides"]["sensors"][0]["params"]["seed"] == 11


def test_serialize_ends_with_newline(battery5_text):
    assert serialize_profile(parse_profile(battery5_text)).endswith("\n")
