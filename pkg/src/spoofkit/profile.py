"""Spoof profile schema: parsing, validation, serialization.

A profile is a JSON document declaring what a target process should be made
to observe. Schema version 1:

    {
      "version": 1,
      "target": {"process": "com.example.app"},
      "default_rate_hz": 50,
      "overrides": {
        "sensors": [
          {"sensor": "accelerometer", "mode": "walking",
           "params": {"noise_sigma": 0.05, "seed": 7}, "rate_hz": 100}
        ],
        "system": [
          {"key": "battery.level", "value": 5},
          {"key": "battery.level",
           "program": {"mode": "battery_discharge",
                       "params": {"start_level": 100, "discharge_rate": 1.0}}}
        ]
      }
    }

``default_rate_hz`` and per-override ``rate_hz`` are optional; sensor
``params`` defaults to {}. A system override carries exactly one of
``value`` (held constant) or ``program`` (re-evaluated over session time).
The RNG seed for noisy modes travels inside ``params`` as ``seed``.

Unknown fields, unknown names, duplicate overrides, and out-of-domain
values are all rejected; suspicious but legal values (sampling rates above
1 kHz) produce warnings.
"""

import json
import math
from dataclasses import dataclass, field
from enum import Enum

from spoofkit.errors import ProfileSyntaxError, SchemaError

SCHEMA_VERSION = 1
DEFAULT_RATE_HZ = 50.0
RATE_WARN_HZ = 1000.0


class SensorType(Enum):
    ACCELEROMETER = "accelerometer"
    GYROSCOPE = "gyroscope"
    STEP_COUNTER = "step_counter"
    AMBIENT_TEMPERATURE = "ambient_temperature"

    @property
    def dims(self):
        return _SENSOR_DIMS[self]

    @property
    def unit(self):
        return _SENSOR_UNITS[self]


_SENSOR_DIMS = {
    SensorType.ACCELEROMETER: 3,
    SensorType.GYROSCOPE: 3,
    SensorType.STEP_COUNTER: 1,
    SensorType.AMBIENT_TEMPERATURE: 1,
}

_SENSOR_UNITS = {
    SensorType.ACCELEROMETER: "m/s^2",
    SensorType.GYROSCOPE: "rad/s",
    SensorType.STEP_COUNTER: "steps",
    SensorType.AMBIENT_TEMPERATURE: "degC",
}


class SystemKey(Enum):
    BATTERY_LEVEL = "battery.level"
    BATTERY_CHARGING = "battery.charging"
    CLOCK_OFFSET_MS = "clock.offset_ms"
    CLOCK_SCALE = "clock.scale"
    BUILD_MODEL = "build.model"
    BUILD_MANUFACTURER = "build.manufacturer"
    BUILD_ANDROID_VERSION = "build.android_version"
    AMBIENT_TEMPERATURE_C = "ambient.temperature_c"


CLOCK_KEYS = frozenset({SystemKey.CLOCK_OFFSET_MS, SystemKey.CLOCK_SCALE})
BUILD_KEYS = frozenset(
    {SystemKey.BUILD_MODEL, SystemKey.BUILD_MANUFACTURER, SystemKey.BUILD_ANDROID_VERSION}
)

MODE_CONSTANT = "constant"
MODE_WALKING = "walking"
MODE_RUNNING = "running"
MODE_SHAKE_SPIKE = "shake_spike"
MODE_SINE = "sine"
MODE_BATTERY_DISCHARGE = "battery_discharge"
MODE_CLOCK_WARP = "clock_warp"

SIGNAL_MODES = frozenset(
    {
        MODE_CONSTANT,
        MODE_WALKING,
        MODE_RUNNING,
        MODE_SHAKE_SPIKE,
        MODE_SINE,
        MODE_BATTERY_DISCHARGE,
        MODE_CLOCK_WARP,
    }
)

# Modes that can drive each sensor stream. Parametric system programs
# (battery_discharge, clock_warp) are never valid on a sensor.
SENSOR_MODES = {
    SensorType.ACCELEROMETER: frozenset(
        {MODE_CONSTANT, MODE_SINE, MODE_WALKING, MODE_RUNNING, MODE_SHAKE_SPIKE}
    ),
    SensorType.GYROSCOPE: frozenset(
        {MODE_CONSTANT, MODE_SINE, MODE_WALKING, MODE_RUNNING, MODE_SHAKE_SPIKE}
    ),
    SensorType.STEP_COUNTER: frozenset({MODE_CONSTANT, MODE_SINE, MODE_WALKING, MODE_RUNNING}),
    SensorType.AMBIENT_TEMPERATURE: frozenset({MODE_CONSTANT, MODE_SINE}),
}


@dataclass(frozen=True)
class SignalSpec:
    """One synthesizable signal: a mode plus its parameters and RNG seed."""

    mode: str
    params: dict = field(default_factory=dict)
    seed: int = 0


@dataclass(frozen=True)
class SensorOverride:
    sensor: SensorType
    signal: SignalSpec
    rate_hz: float | None = None


@dataclass(frozen=True)
class SystemOverride:
    key: SystemKey
    program: SignalSpec


@dataclass(frozen=True)
class SpoofProfile:
    version: int
    target: str
    sensor_overrides: tuple = ()
    system_overrides: tuple = ()
    default_rate_hz: float = DEFAULT_RATE_HZ


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    path: str
    message: str


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


# Per-mode parameter domains: name -> predicate. Closed schemas; anything
# not listed for the mode is rejected so a typo cannot silently no-op.
_COMMON_MOTION_PARAMS = {
    "amplitude": lambda v: _is_number(v) and v >= 0,
    "cadence_hz": lambda v: _is_number(v) and v > 0,
    "noise_sigma": lambda v: _is_number(v) and v >= 0,
    "initial": lambda v: _is_int(v) and v >= 0,
}

_MODE_PARAMS = {
    MODE_CONSTANT: {"value": lambda v: True},  # checked against the sensor below
    MODE_WALKING: _COMMON_MOTION_PARAMS,
    MODE_RUNNING: _COMMON_MOTION_PARAMS,
    MODE_SHAKE_SPIKE: {
        "spike_magnitude": lambda v: _is_number(v) and v > 0,
        "start_s": lambda v: _is_number(v) and v >= 0,
        "noise_sigma": lambda v: _is_number(v) and v >= 0,
    },
    MODE_SINE: {
        "amplitude": _is_number,
        "freq_hz": lambda v: _is_number(v) and v > 0,
        "phase_rad": _is_number,
        "offset": _is_number,
        "noise_sigma": lambda v: _is_number(v) and v >= 0,
    },
    MODE_BATTERY_DISCHARGE: {
        "start_level": lambda v: _is_int(v) and 0 <= v <= 100,
        "discharge_rate": lambda v: _is_number(v) and v >= 0,
    },
    MODE_CLOCK_WARP: {
        "offset_ms": _is_int,
        "scale": lambda v: _is_number(v) and v > 0,
    },
}


def _constant_value_errors(value, sensor):
    """Domain check for constant-mode ``value`` against a sensor, if known."""
    if sensor is None:
        if not (_is_number(value) or (isinstance(value, list) and all(_is_number(v) for v in value))):
            return ["constant value must be a number or list of numbers"]
        return []
    dims = sensor.dims
    if isinstance(value, list):
        if len(value) != dims:
            return [f"dimensionality mismatch: expected {dims} values"]
        if not all(_is_number(v) for v in value):
            return ["constant value entries must be finite numbers"]
        entries = value
    elif _is_number(value):
        if dims != 1:
            return [f"dimensionality mismatch: expected {dims} values"]
        entries = [value]
    else:
        return ["constant value must be a number or list of numbers"]
    if sensor is SensorType.STEP_COUNTER:
        v = entries[0]
        if not (_is_int(v) or (isinstance(v, float) and v.is_integer())) or v < 0:
            return ["step counter constant must be a non-negative integer"]
    return []


def validate_signal_params(spec, sensor=None):
    """Return a list of error strings for ``spec.params`` (empty when valid)."""
    errors = []
    if spec.mode not in SIGNAL_MODES:
        return [f"unknown mode {spec.mode!r}"]
    allowed = _MODE_PARAMS[spec.mode]
    for name, value in spec.params.items():
        if name == "seed":
            errors.append("seed belongs on the spec, not inside params")
            continue
        if name not in allowed:
            errors.append(f"unknown parameter {name!r} for mode {spec.mode!r}")
            continue
        if name == "value":
            errors.extend(_constant_value_errors(value, sensor))
        elif not allowed[name](value):
            errors.append(f"parameter {name!r} out of domain")
    if spec.mode == MODE_CONSTANT and "value" not in spec.params:
        errors.append("constant mode requires a 'value' parameter")
    if not (_is_int(spec.seed) and spec.seed >= 0):
        errors.append("seed must be a non-negative integer")
    return errors


# System key value domains for the constant (``value``) form.
_KEY_VALUE_CHECKS = {
    SystemKey.BATTERY_LEVEL: (lambda v: _is_int(v) and 0 <= v <= 100, "battery.level out of [0,100]"),
    SystemKey.BATTERY_CHARGING: (lambda v: isinstance(v, bool), "battery.charging must be a boolean"),
    SystemKey.CLOCK_OFFSET_MS: (_is_int, "clock.offset_ms must be an integer"),
    SystemKey.CLOCK_SCALE: (lambda v: _is_number(v) and v > 0, "clock.scale must be a positive number"),
    SystemKey.BUILD_MODEL: (lambda v: isinstance(v, str) and v != "", "build.model must be a non-empty string"),
    SystemKey.BUILD_MANUFACTURER: (
        lambda v: isinstance(v, str) and v != "",
        "build.manufacturer must be a non-empty string",
    ),
    SystemKey.BUILD_ANDROID_VERSION: (
        lambda v: isinstance(v, str) and v != "",
        "build.android_version must be a non-empty string",
    ),
    SystemKey.AMBIENT_TEMPERATURE_C: (_is_number, "ambient.temperature_c must be a finite number"),
}

# Program modes accepted per system key beyond the plain value form. Clock
# keys each accept only their own warp parameter so that two clock overrides
# can never disagree about the shared warp.
_KEY_PROGRAM_MODES = {
    SystemKey.BATTERY_LEVEL: frozenset({MODE_BATTERY_DISCHARGE}),
    SystemKey.CLOCK_OFFSET_MS: frozenset({MODE_CLOCK_WARP}),
    SystemKey.CLOCK_SCALE: frozenset({MODE_CLOCK_WARP}),
    SystemKey.AMBIENT_TEMPERATURE_C: frozenset({MODE_CONSTANT, MODE_SINE}),
}

_CLOCK_OWN_PARAM = {SystemKey.CLOCK_OFFSET_MS: "offset_ms", SystemKey.CLOCK_SCALE: "scale"}


def _system_override_errors(override):
    errors = []
    key, program = override.key, override.program
    if program.mode == MODE_CONSTANT:
        foreign = set(program.params) - {"value"}
        if foreign:
            errors.append(f"unknown parameter {sorted(foreign)[0]!r} for mode 'constant'")
        check, message = _KEY_VALUE_CHECKS[key]
        if not check(program.params.get("value")):
            errors.append(message)
        return errors
    allowed = _KEY_PROGRAM_MODES.get(key, frozenset())
    if program.mode not in allowed:
        errors.append(f"mode {program.mode!r} not valid for key {key.value!r}")
        return errors
    errors.extend(validate_signal_params(program, None))
    if key in _CLOCK_OWN_PARAM:
        own = _CLOCK_OWN_PARAM[key]
        foreign = set(program.params) - {own}
        if foreign:
            errors.append(f"conflicting clock parameters: {sorted(foreign)}")
    return errors


def validate_profile(profile):
    """Run every semantic check on a constructed profile.

    Returns a list of Diagnostic; the profile is usable iff no entry has
    error severity.
    """
    diags = []

    def err(path, message):
        diags.append(Diagnostic("error", path, message))

    def warn(path, message):
        diags.append(Diagnostic("warning", path, message))

    if profile.version != SCHEMA_VERSION:
        err("version", f"unsupported schema version {profile.version!r}")
    if not isinstance(profile.target, str) or not profile.target:
        err("target.process", "target process must be a non-empty string")
    if not (_is_number(profile.default_rate_hz) and profile.default_rate_hz > 0):
        err("default_rate_hz", "default_rate_hz must be a positive number")
    elif profile.default_rate_hz > RATE_WARN_HZ:
        warn("default_rate_hz", "unusually high sampling rate")

    seen_sensors = set()
    for i, so in enumerate(profile.sensor_overrides):
        path = f"overrides.sensors[{i}]"
        if so.sensor in seen_sensors:
            err(path + ".sensor", "duplicate sensor type")
        seen_sensors.add(so.sensor)
        if so.signal.mode not in SIGNAL_MODES:
            err(path + ".mode", f"unknown mode {so.signal.mode!r}")
        elif so.signal.mode not in SENSOR_MODES[so.sensor]:
            err(path + ".mode", f"mode {so.signal.mode!r} not valid for sensor {so.sensor.value!r}")
        else:
            for message in validate_signal_params(so.signal, so.sensor):
                err(path + ".params", message)
        if so.rate_hz is not None:
            if not (_is_number(so.rate_hz) and so.rate_hz > 0):
                err(path + ".rate_hz", "rate_hz must be a positive number")
            elif so.rate_hz > RATE_WARN_HZ:
                warn(path + ".rate_hz", "unusually high sampling rate")

    seen_keys = set()
    for i, sy in enumerate(profile.system_overrides):
        path = f"overrides.system[{i}]"
        if sy.key in seen_keys:
            err(path + ".key", "duplicate system key")
        seen_keys.add(sy.key)
        for message in _system_override_errors(sy):
            err(path, message)

    # An ambient temperature key override and an ambient sensor override
    # drive the same delivery path; the sensor override takes precedence.
    if SystemKey.AMBIENT_TEMPERATURE_C in seen_keys and SensorType.AMBIENT_TEMPERATURE in seen_sensors:
        warn(
            "overrides.system",
            "ambient.temperature_c is shadowed by the ambient_temperature sensor override",
        )

    return diags


def _signal_from_doc(doc, path, err):
    mode = doc.get("mode")
    if not isinstance(mode, str) or mode not in SIGNAL_MODES:
        err(path + ".mode", f"unknown mode {mode!r}")
        return None
    params = doc.get("params", {})
    if not isinstance(params, dict):
        err(path + ".params", "params must be an object")
        return None
    unknown = set(doc) - {"mode", "params"}
    if unknown:
        err(path, f"unknown field {sorted(unknown)[0]!r}")
        return None
    params = dict(params)
    seed = params.pop("seed", 0)
    if not (_is_int(seed) and seed >= 0):
        err(path + ".params.seed", "seed must be a non-negative integer")
        return None
    return SignalSpec(mode, params, seed)


def parse_profile_diagnostics(text):
    """Parse with full diagnostic collection.

    Returns (profile_or_None, diagnostics). The profile is None whenever an
    error-severity diagnostic is present. Undecodable input raises
    ProfileSyntaxError since there is nothing to collect from.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProfileSyntaxError(f"not valid JSON: {exc}") from None

    diags = []

    def err(path, message):
        diags.append(Diagnostic("error", path, message))

    if not isinstance(doc, dict):
        err("", "document must be a JSON object")
        return None, diags

    unknown = set(doc) - {"version", "target", "overrides", "default_rate_hz"}
    for name in sorted(unknown):
        err(name, "unknown field")

    version = doc.get("version")
    if not _is_int(version):
        err("version", "version must be an integer")
        version = 0

    target = ""
    target_doc = doc.get("target")
    if not isinstance(target_doc, dict):
        err("target", "target must be an object with a process name")
    else:
        for name in sorted(set(target_doc) - {"process"}):
            err(f"target.{name}", "unknown field")
        process = target_doc.get("process")
        if not isinstance(process, str) or not process:
            err("target.process", "target process must be a non-empty string")
        else:
            target = process

    default_rate = doc.get("default_rate_hz", DEFAULT_RATE_HZ)
    if not _is_number(default_rate):
        err("default_rate_hz", "default_rate_hz must be a positive number")
        default_rate = DEFAULT_RATE_HZ

    sensor_overrides = []
    system_overrides = []
    overrides = doc.get("overrides", {})
    if not isinstance(overrides, dict):
        err("overrides", "overrides must be an object")
        overrides = {}
    for name in sorted(set(overrides) - {"sensors", "system"}):
        err(f"overrides.{name}", "unknown field")

    sensors_doc = overrides.get("sensors", [])
    if not isinstance(sensors_doc, list):
        err("overrides.sensors", "must be an array")
        sensors_doc = []
    for i, entry in enumerate(sensors_doc):
        path = f"overrides.sensors[{i}]"
        if not isinstance(entry, dict):
            err(path, "must be an object")
            continue
        for name in sorted(set(entry) - {"sensor", "mode", "params", "rate_hz"}):
            err(f"{path}.{name}", "unknown field")
        sensor_name = entry.get("sensor")
        try:
            sensor = SensorType(sensor_name)
        except ValueError:
            err(path + ".sensor", f"unknown sensor {sensor_name!r}")
            continue
        signal = _signal_from_doc(
            {"mode": entry.get("mode"), "params": entry.get("params", {})}, path, err
        )
        if signal is None:
            continue
        rate_hz = entry.get("rate_hz")
        if rate_hz is not None:
            if not _is_number(rate_hz):
                err(path + ".rate_hz", "rate_hz must be a positive number")
                continue
            rate_hz = float(rate_hz)
        sensor_overrides.append(SensorOverride(sensor, signal, rate_hz))

    system_doc = overrides.get("system", [])
    if not isinstance(system_doc, list):
        err("overrides.system", "must be an array")
        system_doc = []
    for i, entry in enumerate(system_doc):
        path = f"overrides.system[{i}]"
        if not isinstance(entry, dict):
            err(path, "must be an object")
            continue
        for name in sorted(set(entry) - {"key", "value", "program"}):
            err(f"{path}.{name}", "unknown field")
        key_name = entry.get("key")
        try:
            key = SystemKey(key_name)
        except ValueError:
            err(path + ".key", f"unknown system key {key_name!r}")
            continue
        has_value = "value" in entry
        has_program = "program" in entry
        if has_value == has_program:
            err(path, "exactly one of 'value' or 'program' is required")
            continue
        if has_value:
            program = SignalSpec(MODE_CONSTANT, {"value": entry["value"]})
        else:
            program_doc = entry["program"]
            if not isinstance(program_doc, dict):
                err(path + ".program", "program must be an object")
                continue
            program = _signal_from_doc(program_doc, path + ".program", err)
            if program is None:
                continue
        system_overrides.append(SystemOverride(key, program))

    profile = SpoofProfile(
        version=version,
        target=target,
        sensor_overrides=tuple(sensor_overrides),
        system_overrides=tuple(system_overrides),
        default_rate_hz=float(default_rate),
    )
    diags.extend(validate_profile(profile))
    if any(d.severity == "error" for d in diags):
        return None, diags
    return profile, diags


def parse_profile(text):
    """Parse and validate a profile document; raises on any error diagnostic."""
    profile, diags = parse_profile_diagnostics(text)
    if profile is None:
        first = next(d for d in diags if d.severity == "error")
        raise SchemaError(first.path, first.message, diags)
    return profile


def profile_to_doc(profile):
    """Plain-dict form of a profile, field order fixed for determinism."""
    doc = {
        "version": profile.version,
        "target": {"process": profile.target},
        "default_rate_hz": profile.default_rate_hz,
        "overrides": {"sensors": [], "system": []},
    }
    for so in profile.sensor_overrides:
        entry = {"sensor": so.sensor.value, "mode": so.signal.mode, "params": dict(so.signal.params)}
        if so.signal.seed:
            entry["params"]["seed"] = so.signal.seed
        if so.rate_hz is not None:
            entry["rate_hz"] = so.rate_hz
        doc["overrides"]["sensors"].append(entry)
    for sy in profile.system_overrides:
        if sy.program.mode == MODE_CONSTANT and set(sy.program.params) == {"value"} and not sy.program.seed:
            entry = {"key": sy.key.value, "value": sy.program.params["value"]}
        else:
            program = {"mode": sy.program.mode, "params": dict(sy.program.params)}
            if sy.program.seed:
                program["params"]["seed"] = sy.program.seed
            entry = {"key": sy.key.value, "program": program}
        doc["overrides"]["system"].append(entry)
    return doc


def serialize_profile(profile):
    """Deterministic human-readable text; parse_profile inverts it."""
    from spoofkit.wire import normalize

    return json.dumps(normalize(profile_to_doc(profile)), indent=2, ensure_ascii=False) + "\n"
