"""Hook plans: the bridge from a declarative profile to injectable hooks.

compile() lowers a validated profile into a HookPlan: one hook per target
API, each carrying a payload the agent can act on without doing any signal
math. Sensor overrides become sensor_stream hooks (samples arrive from the
host at the hook rate); constant system values become property_constant
hooks; parametric programs become property_program hooks whose initial
value is applied with the plan and re-pushed by the host as time advances.

Two lowering rules are not 1:1. The clock keys share one warp, so any
clock override produces exactly two hooks (System.currentTimeMillis and
SystemClock.elapsedRealtime) with a merged program. And an
ambient.temperature_c override rides the ambient temperature sensor API as
a constant stream, since that sensor is the only way the value reaches the
app; when a profile also overrides the sensor directly, the sensor
override wins.

emit_agent_script() renders a plan as a standalone Frida-style JavaScript
agent: one commented stanza per hook, a message pump for host traffic, and
a restore stanza that detaches everything. Identical plans emit identical
bytes.
"""

import json
from dataclasses import dataclass, field
from enum import Enum

from spoofkit import wire
from spoofkit.errors import FormatError, SchemaError, UnmappableOverride
from spoofkit.profile import (
    CLOCK_KEYS,
    MODE_BATTERY_DISCHARGE,
    MODE_CLOCK_WARP,
    MODE_CONSTANT,
    SIGNAL_MODES,
    SensorType,
    SignalSpec,
    SystemKey,
    profile_to_doc,
    validate_profile,
)

KIND_SENSOR_STREAM = "sensor_stream"
KIND_PROPERTY_CONSTANT = "property_constant"
KIND_PROPERTY_PROGRAM = "property_program"


class TargetApi(Enum):
    SENSOR_ACCELEROMETER = "sensor.accelerometer.onSensorChanged"
    SENSOR_GYROSCOPE = "sensor.gyroscope.onSensorChanged"
    SENSOR_STEP_COUNTER = "sensor.step_counter.onSensorChanged"
    SENSOR_AMBIENT_TEMPERATURE = "sensor.ambient_temperature.onSensorChanged"
    BATTERY_CAPACITY = "battery.capacity"
    BATTERY_IS_CHARGING = "battery.isCharging"
    CLOCK_CURRENT_TIME_MILLIS = "clock.currentTimeMillis"
    CLOCK_ELAPSED_REALTIME = "clock.elapsedRealtime"
    BUILD_MODEL = "build.MODEL"
    BUILD_MANUFACTURER = "build.MANUFACTURER"
    BUILD_VERSION_RELEASE = "build.VERSION.RELEASE"


_API_ORDER = {api: i for i, api in enumerate(TargetApi)}

SENSOR_API = {
    SensorType.ACCELEROMETER: TargetApi.SENSOR_ACCELEROMETER,
    SensorType.GYROSCOPE: TargetApi.SENSOR_GYROSCOPE,
    SensorType.STEP_COUNTER: TargetApi.SENSOR_STEP_COUNTER,
    SensorType.AMBIENT_TEMPERATURE: TargetApi.SENSOR_AMBIENT_TEMPERATURE,
}

API_SENSOR = {api: sensor for sensor, api in SENSOR_API.items()}

# Java class each API is reached through, plus the Android sensor type ids
# the generated agent needs to recognize hooked streams.
API_JAVA_CLASS = {
    TargetApi.SENSOR_ACCELEROMETER: "android.hardware.SensorManager",
    TargetApi.SENSOR_GYROSCOPE: "android.hardware.SensorManager",
    TargetApi.SENSOR_STEP_COUNTER: "android.hardware.SensorManager",
    TargetApi.SENSOR_AMBIENT_TEMPERATURE: "android.hardware.SensorManager",
    TargetApi.BATTERY_CAPACITY: "android.os.BatteryManager",
    TargetApi.BATTERY_IS_CHARGING: "android.os.BatteryManager",
    TargetApi.CLOCK_CURRENT_TIME_MILLIS: "java.lang.System",
    TargetApi.CLOCK_ELAPSED_REALTIME: "android.os.SystemClock",
    TargetApi.BUILD_MODEL: "android.os.Build",
    TargetApi.BUILD_MANUFACTURER: "android.os.Build",
    TargetApi.BUILD_VERSION_RELEASE: "android.os.Build$VERSION",
}

ANDROID_SENSOR_TYPE = {
    SensorType.ACCELEROMETER: 1,
    SensorType.GYROSCOPE: 4,
    SensorType.AMBIENT_TEMPERATURE: 13,
    SensorType.STEP_COUNTER: 19,
}

# System key each property API answers for (the reverse of the lowering).
API_PROPERTY_KEY = {
    TargetApi.BATTERY_CAPACITY: SystemKey.BATTERY_LEVEL,
    TargetApi.BATTERY_IS_CHARGING: SystemKey.BATTERY_CHARGING,
    TargetApi.CLOCK_CURRENT_TIME_MILLIS: SystemKey.CLOCK_OFFSET_MS,
    TargetApi.CLOCK_ELAPSED_REALTIME: SystemKey.CLOCK_OFFSET_MS,
    TargetApi.BUILD_MODEL: SystemKey.BUILD_MODEL,
    TargetApi.BUILD_MANUFACTURER: SystemKey.BUILD_MANUFACTURER,
    TargetApi.BUILD_VERSION_RELEASE: SystemKey.BUILD_ANDROID_VERSION,
}

_PROPERTY_API = {
    SystemKey.BATTERY_LEVEL: TargetApi.BATTERY_CAPACITY,
    SystemKey.BATTERY_CHARGING: TargetApi.BATTERY_IS_CHARGING,
    SystemKey.BUILD_MODEL: TargetApi.BUILD_MODEL,
    SystemKey.BUILD_MANUFACTURER: TargetApi.BUILD_MANUFACTURER,
    SystemKey.BUILD_ANDROID_VERSION: TargetApi.BUILD_VERSION_RELEASE,
}


@dataclass(frozen=True)
class Hook:
    api: TargetApi
    kind: str
    payload: dict
    rate_hz: float | None = None


@dataclass(frozen=True)
class HookPlan:
    """A compiled plan. ``created_from`` is the digest of the source profile,
    kept as provenance outside equality and outside the document form."""

    plan_id: str
    target: str
    hooks: tuple
    created_from: str | None = field(default=None, compare=False)


def signal_to_doc(spec):
    return {"mode": spec.mode, "params": dict(spec.params), "seed": spec.seed}


def signal_from_doc(doc):
    return SignalSpec(doc["mode"], dict(doc.get("params", {})), doc.get("seed", 0))


def _content_doc(target, hooks):
    doc = {"target": target, "hooks": []}
    for hook in hooks:
        entry = {"api": hook.api.value, "kind": hook.kind, "payload": hook.payload}
        if hook.rate_hz is not None:
            entry["rate_hz"] = hook.rate_hz
        doc["hooks"].append(entry)
    return doc


def _merged_clock_program(overrides):
    """Fold the clock overrides (at most one per key) into one warp spec."""
    params = {}
    initial = {}
    for sy in overrides:
        own = "offset_ms" if sy.key is SystemKey.CLOCK_OFFSET_MS else "scale"
        if sy.program.mode == MODE_CONSTANT:
            value = sy.program.params["value"]
        else:
            value = sy.program.params.get(own, 0 if own == "offset_ms" else 1.0)
        params[own] = value
        initial[sy.key.value] = value
    return SignalSpec(MODE_CLOCK_WARP, params), initial


def compile(profile):
    """Lower a validated profile to a HookPlan.

    The profile must carry no error diagnostics; compile re-checks and
    refuses rather than emit hooks from a bad document.
    """
    diags = [d for d in validate_profile(profile) if d.severity == "error"]
    if diags:
        raise SchemaError(diags[0].path, diags[0].message, diags)

    hooks = []
    hooked_sensors = set()
    for so in profile.sensor_overrides:
        rate = so.rate_hz if so.rate_hz is not None else profile.default_rate_hz
        hooks.append(
            Hook(SENSOR_API[so.sensor], KIND_SENSOR_STREAM, signal_to_doc(so.signal), float(rate))
        )
        hooked_sensors.add(so.sensor)

    clock_overrides = []
    for sy in profile.system_overrides:
        if sy.key in CLOCK_KEYS:
            clock_overrides.append(sy)
        elif sy.key is SystemKey.AMBIENT_TEMPERATURE_C:
            if SensorType.AMBIENT_TEMPERATURE in hooked_sensors:
                continue  # shadowed; the sensor override already owns the API
            program = sy.program
            if program.mode == MODE_CONSTANT:
                program = SignalSpec(MODE_CONSTANT, {"value": [program.params["value"]]})
            hooks.append(
                Hook(
                    TargetApi.SENSOR_AMBIENT_TEMPERATURE,
                    KIND_SENSOR_STREAM,
                    signal_to_doc(program),
                    profile.default_rate_hz,
                )
            )
        elif sy.program.mode == MODE_CONSTANT:
            hooks.append(
                Hook(
                    _PROPERTY_API[sy.key],
                    KIND_PROPERTY_CONSTANT,
                    {"key": sy.key.value, "value": sy.program.params["value"]},
                )
            )
        elif sy.program.mode == MODE_BATTERY_DISCHARGE:
            start = sy.program.params.get("start_level", 100)
            hooks.append(
                Hook(
                    TargetApi.BATTERY_CAPACITY,
                    KIND_PROPERTY_PROGRAM,
                    {
                        "program": signal_to_doc(sy.program),
                        "initial": {SystemKey.BATTERY_LEVEL.value: start},
                    },
                )
            )
        else:
            raise UnmappableOverride(f"no target API for {sy.key.value!r} via {sy.program.mode!r}")

    if clock_overrides:
        program, initial = _merged_clock_program(clock_overrides)
        payload = {"program": signal_to_doc(program), "initial": initial}
        hooks.append(Hook(TargetApi.CLOCK_CURRENT_TIME_MILLIS, KIND_PROPERTY_PROGRAM, payload))
        hooks.append(Hook(TargetApi.CLOCK_ELAPSED_REALTIME, KIND_PROPERTY_PROGRAM, payload))

    hooks.sort(key=lambda h: _API_ORDER[h.api])
    seen = set()
    for hook in hooks:
        if hook.api in seen:
            raise UnmappableOverride(f"two hooks target {hook.api.value!r}")
        seen.add(hook.api)

    hooks = tuple(hooks)
    plan_id = wire.digest(_content_doc(profile.target, hooks))
    created_from = wire.digest(profile_to_doc(profile))
    return HookPlan(plan_id, profile.target, hooks, created_from)


def plan_to_doc(plan):
    doc = _content_doc(plan.target, plan.hooks)
    return {"plan_id": plan.plan_id, "target": doc["target"], "hooks": doc["hooks"]}


def plan_to_document(plan):
    """Deterministic text form of a plan; plan_from_document inverts it."""
    return json.dumps(wire.normalize(plan_to_doc(plan)), indent=2, ensure_ascii=False) + "\n"


def _check_payload(hook_doc, api, path):
    kind = hook_doc.get("kind")
    payload = hook_doc.get("payload")
    if not isinstance(payload, dict):
        raise FormatError(f"{path}: payload must be an object")
    if kind == KIND_SENSOR_STREAM:
        if api not in API_SENSOR:
            raise FormatError(f"{path}: sensor_stream on a non-sensor API")
        mode = payload.get("mode")
        if mode not in SIGNAL_MODES:
            raise FormatError(f"{path}: unknown mode {mode!r}")
        if not isinstance(payload.get("params", {}), dict):
            raise FormatError(f"{path}: params must be an object")
        rate = hook_doc.get("rate_hz")
        if not isinstance(rate, (int, float)) or isinstance(rate, bool) or rate <= 0:
            raise FormatError(f"{path}: sensor_stream requires a positive rate_hz")
    elif kind == KIND_PROPERTY_CONSTANT:
        if api in API_SENSOR:
            raise FormatError(f"{path}: property hook on a sensor API")
        key = payload.get("key")
        try:
            SystemKey(key)
        except ValueError:
            raise FormatError(f"{path}: unknown key {key!r}") from None
        if "value" not in payload:
            raise FormatError(f"{path}: property_constant requires a value")
    elif kind == KIND_PROPERTY_PROGRAM:
        if api in API_SENSOR:
            raise FormatError(f"{path}: property hook on a sensor API")
        program = payload.get("program")
        evaluable = (MODE_CONSTANT, MODE_BATTERY_DISCHARGE, MODE_CLOCK_WARP)
        if not isinstance(program, dict) or program.get("mode") not in evaluable:
            raise FormatError(f"{path}: property_program requires an evaluable program")
        initial = payload.get("initial")
        if not isinstance(initial, dict) or not initial:
            raise FormatError(f"{path}: property_program requires initial values")
        for key in initial:
            try:
                SystemKey(key)
            except ValueError:
                raise FormatError(f"{path}: unknown key {key!r}") from None
    else:
        raise FormatError(f"{path}: unknown hook kind {kind!r}")


def plan_from_document(text):
    """Parse a plan document; verifies shape and the content digest."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or set(doc) != {"plan_id", "target", "hooks"}:
        raise FormatError("plan must carry exactly plan_id, target, hooks")
    target = doc["target"]
    if not isinstance(target, str) or not target:
        raise FormatError("target must be a non-empty string")
    if not isinstance(doc["hooks"], list):
        raise FormatError("hooks must be an array")

    hooks = []
    seen = set()
    for i, hook_doc in enumerate(doc["hooks"]):
        path = f"hooks[{i}]"
        if not isinstance(hook_doc, dict):
            raise FormatError(f"{path}: must be an object")
        unknown = set(hook_doc) - {"api", "kind", "payload", "rate_hz"}
        if unknown:
            raise FormatError(f"{path}: unknown field {sorted(unknown)[0]!r}")
        try:
            api = TargetApi(hook_doc.get("api"))
        except ValueError:
            raise FormatError(f"{path}: unknown api {hook_doc.get('api')!r}") from None
        if api in seen:
            raise FormatError(f"{path}: duplicate api {api.value!r}")
        seen.add(api)
        _check_payload(hook_doc, api, path)
        rate = hook_doc.get("rate_hz")
        hooks.append(
            Hook(api, hook_doc["kind"], hook_doc["payload"], float(rate) if rate is not None else None)
        )

    hooks = tuple(hooks)
    expected = wire.digest(_content_doc(target, hooks))
    if doc["plan_id"] != expected:
        raise FormatError("plan_id does not match plan content")
    return HookPlan(expected, target, hooks)


def plan_queryable_keys(plan):
    """System keys the host can query back while this plan is active."""
    keys = []
    for hook in plan.hooks:
        if hook.kind == KIND_PROPERTY_CONSTANT:
            keys.append(SystemKey(hook.payload["key"]))
        elif hook.kind == KIND_PROPERTY_PROGRAM:
            keys.extend(SystemKey(k) for k in hook.payload["initial"])
        elif hook.api is TargetApi.SENSOR_AMBIENT_TEMPERATURE:
            keys.append(SystemKey.AMBIENT_TEMPERATURE_C)
    seen = []
    for key in keys:
        if key not in seen:
            seen.append(key)
    return seen


def plan_initial_overrides(plan):
    """Property values the agent applies the moment the plan lands."""
    initial = {}
    for hook in plan.hooks:
        if hook.kind == KIND_PROPERTY_CONSTANT:
            initial[hook.payload["key"]] = hook.payload["value"]
        elif hook.kind == KIND_PROPERTY_PROGRAM:
            initial.update(hook.payload["initial"])
    return initial


def _js(value):
    """Canonical JSON fragment for embedding a value in the script."""
    return wire.encode_line(value) if isinstance(value, dict) else json.dumps(wire.normalize(value))


def _sensor_stanza(hook):
    sensor = API_SENSOR[hook.api]
    entry = {
        "api": hook.api.value,
        "javaClass": API_JAVA_CLASS[hook.api],
        "sensorType": ANDROID_SENSOR_TYPE[sensor],
        "sensor": sensor.value,
        "rateHz": hook.rate_hz,
    }
    lines = [f"    // hook {hook.api.value} via {API_JAVA_CLASS[hook.api]} listener path"]
    lines.append("    registerSensorHook({")
    lines.append(f"      api: {_js(entry['api'])},")
    lines.append(f"      javaClass: {_js(entry['javaClass'])},")
    lines.append(f"      sensorType: {_js(entry['sensorType'])},")
    lines.append(f"      sensor: {_js(entry['sensor'])},")
    lines.append(f"      rateHz: {_js(entry['rateHz'])}")
    lines.append("    });")
    return "\n".join(lines)


def _battery_capacity_stanza(hook):
    return f"""    // hook {hook.api.value} via android.os.BatteryManager
    (function () {{
      var BatteryManager = Java.use('android.os.BatteryManager');
      var getIntProperty = BatteryManager.getIntProperty.overload('int');
      getIntProperty.implementation = function (id) {{
        if (id === BATTERY_PROPERTY_CAPACITY && OVERRIDES['battery.level'] !== undefined) {{
          return OVERRIDES['battery.level'];
        }}
        return getIntProperty.call(this, id);
      }};
      INSTALLED.push(function () {{
        getIntProperty.implementation = null;
      }});
    }})();"""


def _battery_charging_stanza(hook):
    return f"""    // hook {hook.api.value} via android.os.BatteryManager
    (function () {{
      var BatteryManager = Java.use('android.os.BatteryManager');
      var isCharging = BatteryManager.isCharging;
      isCharging.implementation = function () {{
        if (OVERRIDES['battery.charging'] !== undefined) {{
          return OVERRIDES['battery.charging'];
        }}
        return isCharging.call(this);
      }};
      INSTALLED.push(function () {{
        isCharging.implementation = null;
      }});
    }})();"""


def _clock_stanza(hook, js_class, var_name, method):
    program = hook.payload["program"]["params"]
    scale = _js(program.get("scale", 1))
    offset = _js(program.get("offset_ms", 0))
    return f"""    // hook {hook.api.value} via {js_class}
    (function () {{
      var {var_name} = Java.use('{js_class}');
      var method = {var_name}.{method};
      var epochMs = null;
      method.implementation = function () {{
        var real = method.call(this);
        if (epochMs === null) {{
          epochMs = real;
        }}
        var scale = OVERRIDES['clock.scale'] !== undefined ? OVERRIDES['clock.scale'] : {scale};
        var offset = OVERRIDES['clock.offset_ms'] !== undefined ? OVERRIDES['clock.offset_ms'] : {offset};
        return epochMs + Math.round((real - epochMs) * scale) + offset;
      }};
      INSTALLED.push(function () {{
        method.implementation = null;
        epochMs = null;
      }});
    }})();"""


def _build_field_stanza(hook, js_class, var_name, js_field, key):
    return f"""    // hook {hook.api.value} via {js_class}
    (function () {{
      var {var_name} = Java.use('{js_class}');
      var original = {var_name}.{js_field}.value;
      {var_name}.{js_field}.value = OVERRIDES[{_js(key)}];
      INSTALLED.push(function () {{
        {var_name}.{js_field}.value = original;
      }});
    }})();"""


def _hook_stanza(hook):
    api = hook.api
    if hook.kind == KIND_SENSOR_STREAM:
        return _sensor_stanza(hook)
    if api is TargetApi.BATTERY_CAPACITY:
        return _battery_capacity_stanza(hook)
    if api is TargetApi.BATTERY_IS_CHARGING:
        return _battery_charging_stanza(hook)
    if api is TargetApi.CLOCK_CURRENT_TIME_MILLIS:
        return _clock_stanza(hook, "java.lang.System", "SystemClass", "currentTimeMillis")
    if api is TargetApi.CLOCK_ELAPSED_REALTIME:
        return _clock_stanza(hook, "android.os.SystemClock", "SystemClock", "elapsedRealtime")
    if api is TargetApi.BUILD_MODEL:
        return _build_field_stanza(hook, "android.os.Build", "Build", "MODEL", "build.model")
    if api is TargetApi.BUILD_MANUFACTURER:
        return _build_field_stanza(hook, "android.os.Build", "Build", "MANUFACTURER", "build.manufacturer")
    if api is TargetApi.BUILD_VERSION_RELEASE:
        return _build_field_stanza(
            hook, "android.os.Build$VERSION", "BuildVersion", "RELEASE", "build.android_version"
        )
    raise UnmappableOverride(f"no stanza for {api.value!r}")


_SCRIPT_PRELUDE = """'use strict';

// generated hook agent
// plan {plan_id}
// target {target}

var PLAN_ID = {plan_id_js};
var TARGET = {target_js};
var BATTERY_PROPERTY_CAPACITY = 4;

var OVERRIDES = {overrides_js};
var LATEST_SAMPLES = {{}};
var SENSOR_HOOKS = {{}};
var INSTALLED = [];
var RESTORED = false;

function reply(obj) {{
  send(JSON.stringify(obj));
}}

// Shared sensor delivery rewrite. Sensor stanzas register their type here;
// the dispatch interception is installed once, on the first registration.
function registerSensorHook(entry) {{
  SENSOR_HOOKS[entry.sensorType] = entry;
  installSensorRewrite();
}}

function installSensorRewrite() {{
  if (installSensorRewrite.installed) {{
    return;
  }}
  installSensorRewrite.installed = true;
  var queue = Java.use('android.hardware.SystemSensorManager$SensorEventQueue');
  var dispatch = queue.dispatchSensorEvent.overload('int', '[F', 'int', 'long');
  dispatch.implementation = function (handle, values, accuracy, timestamp) {{
    var entry = lookupHookedSensor(this, handle);
    if (entry !== null) {{
      var spoofed = LATEST_SAMPLES[entry.sensor];
      if (spoofed !== undefined) {{
        for (var i = 0; i < spoofed.length && i < values.length; i++) {{
          values[i] = spoofed[i];
        }}
      }}
    }}
    return dispatch.call(this, handle, values, accuracy, timestamp);
  }};
  INSTALLED.push(function () {{
    dispatch.implementation = null;
    installSensorRewrite.installed = false;
  }});
}}

function lookupHookedSensor(eventQueue, handle) {{
  var sensor = eventQueue.mSensorsMap.value.get(handle);
  if (sensor === null) {{
    return null;
  }}
  var entry = SENSOR_HOOKS[sensor.getType()];
  return entry !== undefined ? entry : null;
}}

function installHooks() {{{install_body}}}
"""

_SCRIPT_POSTLUDE = """
// restore: detach every interception and drop all overrides
function restoreAll() {
  if (RESTORED) {
    return;
  }
  RESTORED = true;
  while (INSTALLED.length > 0) {
    var undo = INSTALLED.pop();
    undo();
  }
  OVERRIDES = {};
  LATEST_SAMPLES = {};
  SENSOR_HOOKS = {};
}

function handleHostMessage(msg) {
  if (msg === null || typeof msg !== 'object' || typeof msg.type !== 'string' ||
      typeof msg.seq !== 'number') {
    reply({ type: 'nack', ref: msg && typeof msg.seq === 'number' ? msg.seq : -1,
            reason: 'malformed message' });
    return;
  }
  switch (msg.type) {
    case 'apply_plan':
      reply({ type: 'ack', ref: msg.seq });
      break;
    case 'sample':
      LATEST_SAMPLES[msg.sensor] = msg.values;
      reply({ type: 'ack', ref: msg.seq });
      break;
    case 'set_property':
      OVERRIDES[msg.key] = msg.value;
      reply({ type: 'ack', ref: msg.seq });
      break;
    case 'query':
      reply({ type: 'value', ref: msg.seq, key: msg.key,
              value: OVERRIDES[msg.key] !== undefined ? OVERRIDES[msg.key] : null });
      break;
    case 'restore':
      restoreAll();
      reply({ type: 'ack', ref: msg.seq });
      break;
    default:
      reply({ type: 'nack', ref: msg.seq, reason: 'unknown message type' });
  }
}

function pump() {
  recv(function (raw) {
    var msg = raw;
    if (typeof raw === 'string') {
      try {
        msg = JSON.parse(raw);
      } catch (e) {
        msg = null;
      }
    }
    handleHostMessage(msg);
    pump();
  });
}

installHooks();
pump();
"""


def emit_agent_script(plan):
    """Render the plan as one deterministic JavaScript agent."""
    stanzas = [_hook_stanza(hook) for hook in plan.hooks]
    if stanzas:
        install_body = "\n  Java.perform(function () {\n" + "\n\n".join(stanzas) + "\n  });\n"
    else:
        install_body = "\n  // empty plan: nothing to install\n"
    prelude = _SCRIPT_PRELUDE.format(
        plan_id=plan.plan_id,
        target=plan.target,
        plan_id_js=_js(plan.plan_id),
        target_js=_js(plan.target),
        overrides_js=_js(plan_initial_overrides(plan)) if plan_initial_overrides(plan) else "{}",
        install_body=install_body,
    )
    return prelude + _SCRIPT_POSTLUDE
