"""Mock target processes: the desk-scale stand-in for an instrumented device.

A MockApp holds a baseline system state, accepts the same wire messages a
real injected agent would, and runs configurable behavior rules so a spoof
can be audited end to end: does the app actually perceive the injected
values, does it react, and does restore really put everything back?

Configuration document:

    {
      "process": "com.fitness.app",
      "baseline": {"battery.level": 87},
      "rules": [
        {"name": "battery_saver",
         "when": {"kind": "threshold", "key": "battery.level", "op": "<", "value": 20},
         "emit": "battery_saver_on",
         "set_flag": "battery_saver"}
      ],
      "tamper_mode": "none"
    }

Rule kinds:
  threshold — compare the currently perceived value of a system key;
  magnitude — Euclidean norm of a sensor sample, optionally required to
              hold for ``sustain_samples`` consecutive samples;
  delta     — increase of a one-dimensional sensor (step counter) by at
              least ``min_increase`` within ``window_s`` seconds.

Rules fire on rising edges only: an event is emitted when the condition
goes false -> true, never while it merely stays true. Every delivered
observation (sample, property push, or plan application) evaluates every
rule against the app's current perception.

With ``tamper_mode`` "reject_injection" the app nacks any apply_plan, the
way a hardened target refuses instrumentation, while still answering
queries and honoring restore.
"""

import json
import math
from collections import deque
from dataclasses import dataclass, field

from spoofkit import wire
from spoofkit.errors import ConfigError, ProtocolError
from spoofkit.profile import SensorType, SystemKey

TAMPER_NONE = "none"
TAMPER_REJECT_INJECTION = "reject_injection"
TAMPER_MODES = (TAMPER_NONE, TAMPER_REJECT_INJECTION)

REJECTION_REASON = "injection rejected"

DEFAULT_BASELINE = {
    SystemKey.BATTERY_LEVEL: 87,
    SystemKey.BATTERY_CHARGING: False,
    SystemKey.CLOCK_OFFSET_MS: 0,
    SystemKey.CLOCK_SCALE: 1,
    SystemKey.BUILD_MODEL: "MockPhone",
    SystemKey.BUILD_MANUFACTURER: "MockWorks",
    SystemKey.BUILD_ANDROID_VERSION: "14",
    SystemKey.AMBIENT_TEMPERATURE_C: 21.0,
}

_BASELINE_CHECKS = {
    SystemKey.BATTERY_LEVEL: lambda v: isinstance(v, int) and not isinstance(v, bool) and 0 <= v <= 100,
    SystemKey.BATTERY_CHARGING: lambda v: isinstance(v, bool),
    SystemKey.CLOCK_OFFSET_MS: lambda v: isinstance(v, int) and not isinstance(v, bool),
    SystemKey.CLOCK_SCALE: lambda v: isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0,
    SystemKey.BUILD_MODEL: lambda v: isinstance(v, str) and v != "",
    SystemKey.BUILD_MANUFACTURER: lambda v: isinstance(v, str) and v != "",
    SystemKey.BUILD_ANDROID_VERSION: lambda v: isinstance(v, str) and v != "",
    SystemKey.AMBIENT_TEMPERATURE_C: lambda v: isinstance(v, (int, float))
    and not isinstance(v, bool)
    and math.isfinite(v),
}

_COMPARATORS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}
_ORDERED_OPS = frozenset({"<", "<=", ">", ">="})


@dataclass(frozen=True)
class ThresholdCondition:
    key: SystemKey
    op: str
    value: object


@dataclass(frozen=True)
class MagnitudeCondition:
    sensor: SensorType
    op: str
    value: float
    sustain_samples: int = 1


@dataclass(frozen=True)
class DeltaCondition:
    sensor: SensorType
    min_increase: float
    window_s: float


@dataclass(frozen=True)
class BehaviorRule:
    name: str
    when: object
    emit: str | None = None
    set_flag: str | None = None


@dataclass
class _RuleState:
    rule: BehaviorRule
    prev: bool = False
    sustain_count: int = 0
    window: deque = field(default_factory=deque)
    latest: bool = False


def _condition_from_doc(doc, rule_name):
    if not isinstance(doc, dict):
        raise ConfigError(f"rule {rule_name!r}: 'when' must be an object")
    kind = doc.get("kind")
    if kind == "threshold":
        allowed = {"kind", "key", "op", "value"}
        unknown = set(doc) - allowed
        if unknown:
            raise ConfigError(f"rule {rule_name!r}: unknown field {sorted(unknown)[0]!r}")
        try:
            key = SystemKey(doc.get("key"))
        except ValueError:
            raise ConfigError(f"rule {rule_name!r}: unknown system key {doc.get('key')!r}") from None
        op = doc.get("op")
        if op not in _COMPARATORS:
            raise ConfigError(f"rule {rule_name!r}: unknown comparator {op!r}")
        value = doc.get("value")
        numeric = isinstance(value, (int, float)) and not isinstance(value, bool)
        if op in _ORDERED_OPS and not numeric:
            raise ConfigError(f"rule {rule_name!r}: ordered comparison needs a numeric value")
        return ThresholdCondition(key, op, value)
    if kind == "magnitude":
        allowed = {"kind", "sensor", "op", "value", "sustain_samples"}
        unknown = set(doc) - allowed
        if unknown:
            raise ConfigError(f"rule {rule_name!r}: unknown field {sorted(unknown)[0]!r}")
        try:
            sensor = SensorType(doc.get("sensor"))
        except ValueError:
            raise ConfigError(f"rule {rule_name!r}: unknown sensor {doc.get('sensor')!r}") from None
        op = doc.get("op", ">")
        if op not in _ORDERED_OPS:
            raise ConfigError(f"rule {rule_name!r}: magnitude comparator must be ordered")
        value = doc.get("value")
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"rule {rule_name!r}: magnitude needs a numeric value")
        sustain = doc.get("sustain_samples", 1)
        if not isinstance(sustain, int) or isinstance(sustain, bool) or sustain < 1:
            raise ConfigError(f"rule {rule_name!r}: sustain_samples must be a positive integer")
        return MagnitudeCondition(sensor, op, float(value), sustain)
    if kind == "delta":
        allowed = {"kind", "sensor", "min_increase", "window_s"}
        unknown = set(doc) - allowed
        if unknown:
            raise ConfigError(f"rule {rule_name!r}: unknown field {sorted(unknown)[0]!r}")
        sensor_name = doc.get("sensor", SensorType.STEP_COUNTER.value)
        try:
            sensor = SensorType(sensor_name)
        except ValueError:
            raise ConfigError(f"rule {rule_name!r}: unknown sensor {sensor_name!r}") from None
        if sensor.dims != 1:
            raise ConfigError(f"rule {rule_name!r}: delta rules need a one-dimensional sensor")
        inc = doc.get("min_increase")
        if not isinstance(inc, (int, float)) or isinstance(inc, bool) or inc <= 0:
            raise ConfigError(f"rule {rule_name!r}: min_increase must be positive")
        window = doc.get("window_s")
        if not isinstance(window, (int, float)) or isinstance(window, bool) or window <= 0:
            raise ConfigError(f"rule {rule_name!r}: window_s must be positive")
        return DeltaCondition(sensor, float(inc), float(window))
    raise ConfigError(f"rule {rule_name!r}: unknown condition kind {kind!r}")


def _rules_from_doc(doc):
    rules = []
    names = set()
    for i, entry in enumerate(doc):
        if not isinstance(entry, dict):
            raise ConfigError(f"rules[{i}] must be an object")
        unknown = set(entry) - {"name", "when", "emit", "set_flag"}
        if unknown:
            raise ConfigError(f"rules[{i}]: unknown field {sorted(unknown)[0]!r}")
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise ConfigError(f"rules[{i}]: name must be a non-empty string")
        if name in names:
            raise ConfigError(f"rules[{i}]: duplicate rule name {name!r}")
        names.add(name)
        emit = entry.get("emit")
        set_flag = entry.get("set_flag")
        for label, v in (("emit", emit), ("set_flag", set_flag)):
            if v is not None and (not isinstance(v, str) or not v):
                raise ConfigError(f"rules[{i}]: {label} must be a non-empty string")
        if emit is None and set_flag is None:
            raise ConfigError(f"rules[{i}]: rule has no effect (emit or set_flag required)")
        rules.append(BehaviorRule(name, _condition_from_doc(entry.get("when"), name), emit, set_flag))
    return rules


class MockApp:
    """One simulated target process."""

    def __init__(self, process_name, baseline=None, rules=(), tamper_mode=TAMPER_NONE):
        self.process_name = process_name
        self.baseline = dict(DEFAULT_BASELINE)
        if baseline:
            self.baseline.update(baseline)
        self.rules = list(rules)
        self.tamper_mode = tamper_mode
        self.property_overrides = {}
        self.latest_samples = {}
        self.spoofed_sensors = set()
        self.mode_flags = {}
        self.event_log = []
        self.received = []
        self._rule_states = [_RuleState(rule) for rule in self.rules]
        self._event_seq = 0
        self._last_seq = 0
        self._last_t_ns = 0

    # -- state inspection -------------------------------------------------

    def query_value(self, key):
        """What the app currently perceives for a system key."""
        if isinstance(key, str):
            key = SystemKey(key)
        if key.value in self.property_overrides:
            return self.property_overrides[key.value]
        if key is SystemKey.AMBIENT_TEMPERATURE_C:
            sample = self.latest_samples.get(SensorType.AMBIENT_TEMPERATURE.value)
            if sample is not None:
                return sample[0]
        return self.baseline[key]

    def baseline_sensor_values(self, sensor):
        if sensor is SensorType.ACCELEROMETER:
            return (0.0, 0.0, 9.81)
        if sensor is SensorType.GYROSCOPE:
            return (0.0, 0.0, 0.0)
        if sensor is SensorType.STEP_COUNTER:
            return (0.0,)
        return (float(self.baseline[SystemKey.AMBIENT_TEMPERATURE_C]),)

    # -- rule engine -------------------------------------------------------

    def _norm(self, values):
        return math.sqrt(sum(v * v for v in values))

    def _evaluate_rules(self, observation, t_ns):
        """One pass over all rules; returns event dicts for rising edges."""
        events = []
        kind = observation[0]
        for state in self._rule_states:
            cond = state.rule.when
            if isinstance(cond, ThresholdCondition):
                perceived = self.query_value(cond.key)
                try:
                    current = _COMPARATORS[cond.op](perceived, cond.value)
                except TypeError:
                    current = False
            elif isinstance(cond, MagnitudeCondition):
                if kind == "sample" and observation[1] == cond.sensor.value:
                    matched = _COMPARATORS[cond.op](self._norm(observation[2]), cond.value)
                    state.sustain_count = state.sustain_count + 1 if matched else 0
                    state.latest = state.sustain_count >= cond.sustain_samples
                current = state.latest
            else:  # DeltaCondition
                if kind == "sample" and observation[1] == cond.sensor.value:
                    window = state.window
                    window.append((t_ns, observation[2][0]))
                    horizon = t_ns - int(cond.window_s * 1e9)
                    while window and window[0][0] < horizon:
                        window.popleft()
                    state.latest = window[-1][1] - window[0][1] >= cond.min_increase
                current = state.latest
            if current and not state.prev:
                if state.rule.set_flag:
                    self.mode_flags[state.rule.set_flag] = True
                if state.rule.emit:
                    self._event_seq += 1
                    event = {
                        "type": "event",
                        "seq": self._event_seq,
                        "name": state.rule.emit,
                        "t_ns": t_ns,
                    }
                    self.event_log.append(event)
                    events.append(event)
            state.prev = current
        return events

    # -- message handling --------------------------------------------------

    def deliver_line(self, line):
        """Process one host line; returns the response lines in order."""
        msg = wire.decode_line(line)
        return [wire.encode_line(obj) for obj in self.deliver(msg)]

    def deliver(self, msg):
        if not isinstance(msg, dict):
            raise ProtocolError("message is not an object")
        seq = msg.get("seq")
        mtype = msg.get("type")
        if not isinstance(mtype, str) or not isinstance(seq, int) or isinstance(seq, bool):
            return [self._nack(seq if isinstance(seq, int) else -1, "malformed message")]
        if seq <= self._last_seq:
            # Duplicate or stale delivery: acknowledge, never reprocess.
            return [{"type": "ack", "ref": seq}]
        self._last_seq = seq
        self.received.append(msg)

        if mtype == "apply_plan":
            return self._on_apply_plan(msg)
        if mtype == "sample":
            return self._on_sample(msg)
        if mtype == "set_property":
            return self._on_set_property(msg)
        if mtype == "query":
            return self._on_query(msg)
        if mtype == "restore":
            return self._on_restore(msg)
        return [self._nack(seq, "unknown message type")]

    def _nack(self, ref, reason):
        return {"type": "nack", "ref": ref, "reason": reason}

    def _ack(self, ref):
        return {"type": "ack", "ref": ref}

    def _on_apply_plan(self, msg):
        seq = msg["seq"]
        if self.tamper_mode == TAMPER_REJECT_INJECTION:
            return [self._nack(seq, REJECTION_REASON)]
        plan = msg.get("plan")
        if not isinstance(plan, dict) or not isinstance(plan.get("hooks"), list):
            return [self._nack(seq, "malformed message")]
        for hook in plan["hooks"]:
            if not isinstance(hook, dict):
                return [self._nack(seq, "malformed message")]
            kind = hook.get("kind")
            payload = hook.get("payload", {})
            if kind == "property_constant":
                self.property_overrides[payload["key"]] = payload["value"]
            elif kind == "property_program":
                self.property_overrides.update(payload.get("initial", {}))
            elif kind == "sensor_stream":
                api = hook.get("api", "")
                self.spoofed_sensors.add(api.split(".")[1] if "." in api else api)
        # Installing overrides changes what the app perceives, so it counts
        # as an observation for the rules.
        events = self._evaluate_rules(("plan",), self._last_t_ns)
        return [self._ack(seq)] + events

    def _on_sample(self, msg):
        seq = msg["seq"]
        sensor_name = msg.get("sensor")
        try:
            sensor = SensorType(sensor_name)
        except ValueError:
            return [self._nack(seq, f"unknown sensor {sensor_name!r}")]
        values = msg.get("values")
        if not isinstance(values, list) or len(values) != sensor.dims:
            return [self._nack(seq, "dimension mismatch")]
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
            return [self._nack(seq, "malformed message")]
        t_ns = msg.get("t_ns")
        if not isinstance(t_ns, int) or isinstance(t_ns, bool) or t_ns < 0:
            return [self._nack(seq, "malformed message")]
        values = [float(v) for v in values]
        self.latest_samples[sensor.value] = values
        self._last_t_ns = max(self._last_t_ns, t_ns)
        events = self._evaluate_rules(("sample", sensor.value, values), t_ns)
        return [self._ack(seq)] + events

    def _on_set_property(self, msg):
        seq = msg["seq"]
        key_name = msg.get("key")
        try:
            SystemKey(key_name)
        except ValueError:
            return [self._nack(seq, f"unknown key {key_name!r}")]
        if "value" not in msg:
            return [self._nack(seq, "malformed message")]
        self.property_overrides[key_name] = msg["value"]
        events = self._evaluate_rules(("property", key_name), self._last_t_ns)
        return [self._ack(seq)] + events

    def _on_query(self, msg):
        seq = msg["seq"]
        key_name = msg.get("key")
        try:
            key = SystemKey(key_name)
        except ValueError:
            return [self._nack(seq, f"unknown key {key_name!r}")]
        return [{"type": "value", "ref": seq, "key": key_name, "value": self.query_value(key)}]

    def _on_restore(self, msg):
        self.property_overrides.clear()
        self.latest_samples.clear()
        self.spoofed_sensors.clear()
        return [self._ack(msg["seq"])]


def config_from_doc(doc):
    """Validate a configuration document into MockApp constructor arguments."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(doc) - {"process", "baseline", "rules", "tamper_mode"}
    if unknown:
        raise ConfigError(f"unknown field {sorted(unknown)[0]!r}")
    process = doc.get("process")
    if not isinstance(process, str) or not process:
        raise ConfigError("process must be a non-empty string")
    baseline = {}
    baseline_doc = doc.get("baseline", {})
    if not isinstance(baseline_doc, dict):
        raise ConfigError("baseline must be an object")
    for key_name, value in baseline_doc.items():
        try:
            key = SystemKey(key_name)
        except ValueError:
            raise ConfigError(f"unknown baseline key {key_name!r}") from None
        if not _BASELINE_CHECKS[key](value):
            raise ConfigError(f"baseline value for {key_name!r} out of domain")
        baseline[key] = value
    rules_doc = doc.get("rules", [])
    if not isinstance(rules_doc, list):
        raise ConfigError("rules must be an array")
    rules = _rules_from_doc(rules_doc)
    tamper_mode = doc.get("tamper_mode", TAMPER_NONE)
    if tamper_mode not in TAMPER_MODES:
        raise ConfigError(f"unknown tamper_mode {tamper_mode!r}")
    return process, baseline, rules, tamper_mode


def spawn_mock_app(config, transport):
    """Build a MockApp from a config document (text or dict) and register it."""
    if isinstance(config, str):
        try:
            config = json.loads(config)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"not valid JSON: {exc}") from None
    process, baseline, rules, tamper_mode = config_from_doc(config)
    app = MockApp(process, baseline, rules, tamper_mode)
    transport.register(app)
    return app
