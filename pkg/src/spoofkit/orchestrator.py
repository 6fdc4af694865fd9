"""Session orchestration: drive a hook plan against a target over a transport.

Lifecycle: CREATED -> ATTACHED -> INJECTED -> RUNNING -> RESTORING ->
CLOSED, with FAILED reachable from anywhere. A session is single-use; once
CLOSED or FAILED it is sealed.

Wire protocol (host -> agent), one JSON object per line, ``seq`` strictly
monotone per direction, responses carry ``ref`` = the request's seq:

    {"type": "apply_plan", "seq": n, "plan": {...}}
    {"type": "sample", "seq": n, "sensor": "accelerometer",
     "t_ns": 123, "values": [..]}
    {"type": "set_property", "seq": n, "key": "battery.level", "value": 42}
    {"type": "query", "seq": n, "key": "battery.level"}
    {"type": "restore", "seq": n}

Agent -> host: {"type":"ack","ref":n}, {"type":"nack","ref":n,"reason":..},
{"type":"value","ref":n,"key":..,"value":..}, and unsolicited
{"type":"event","seq":m,"name":..,"t_ns":..}.

Time is a session-local clock starting at 0 at inject. The virtual clock
jumps instead of sleeping, so a 600 s session finishes in well under a
second of wall time while sending exactly floor(rate * duration) samples
per stream; the wall clock sleeps for real. Sensor samples are
fire-and-forget (acks are collected, unexpected nacks fail the session);
apply_plan, query, and restore block for their response.

Restore discipline: before injecting, the orchestrator queries every key
the plan will touch and stores the answers. Whatever happens afterwards,
restore is attempted at most once, and the outcome is recorded as
``verified`` (every stored key reads back bit-identically), ``attempted``
(restore sent but not confirmed), or ``not_needed`` (no plan ever landed).
"""

import heapq
import threading
import time
import uuid
from dataclasses import dataclass
from enum import Enum

from spoofkit import wire
from spoofkit.errors import (
    AttachError,
    IllegalStateError,
    InjectError,
    ProtocolError,
    TransportError,
)
from spoofkit.hookplan import (
    API_SENSOR,
    KIND_PROPERTY_PROGRAM,
    KIND_SENSOR_STREAM,
    plan_queryable_keys,
    signal_from_doc,
)
from spoofkit.profile import MODE_BATTERY_DISCHARGE, MODE_CLOCK_WARP, MODE_CONSTANT
from spoofkit.signals import battery_level_at, floor_snap, round_half_up, synth_trace

RESTORE_VERIFIED = "verified"
RESTORE_ATTEMPTED = "attempted"
RESTORE_NOT_NEEDED = "not_needed"

RESTORE_ATTEMPTS = 4  # bounds how many transient faults the teardown absorbs

_TICK_NS = 1_000_000_000  # property programs re-evaluate on 1 s boundaries


class SessionState(Enum):
    CREATED = "CREATED"
    ATTACHED = "ATTACHED"
    INJECTED = "INJECTED"
    RUNNING = "RUNNING"
    RESTORING = "RESTORING"
    CLOSED = "CLOSED"
    FAILED = "FAILED"


class VirtualClock:
    """Session clock that jumps: advancing is free."""

    is_virtual = True

    def __init__(self):
        self._now_ns = 0

    def now_ns(self):
        return self._now_ns

    def advance_to_ns(self, t_ns):
        if t_ns > self._now_ns:
            self._now_ns = t_ns


class WallClock:
    """Session clock pinned to the monotonic clock; advancing sleeps."""

    is_virtual = False

    def __init__(self):
        self._origin = time.monotonic_ns()

    def now_ns(self):
        return time.monotonic_ns() - self._origin

    def advance_to_ns(self, t_ns):
        delta_ns = t_ns - self.now_ns()
        if delta_ns > 0:
            time.sleep(delta_ns / 1e9)


@dataclass
class SessionReport:
    session_id: str
    plan_id: str
    state: str
    duration_s: float
    samples_sent: dict
    properties_applied: list
    app_events: list
    restore_outcome: str | None
    failure_reason: str | None

    def to_doc(self):
        return {
            "session_id": self.session_id,
            "plan_id": self.plan_id,
            "state": self.state,
            "duration_s": self.duration_s,
            "samples_sent": self.samples_sent,
            "properties_applied": self.properties_applied,
            "app_events": self.app_events,
            "restore_outcome": self.restore_outcome,
            "failure_reason": self.failure_reason,
        }


def _program_value(program_doc, key, t_s):
    """Evaluate a property program at session time t (seconds)."""
    params = program_doc.get("params", {})
    mode = program_doc["mode"]
    if mode == MODE_BATTERY_DISCHARGE:
        return battery_level_at(params.get("start_level", 100), params.get("discharge_rate", 1.0), t_s)
    if mode == MODE_CLOCK_WARP:
        scale = params.get("scale", 1.0)
        if key == "clock.scale":
            return scale
        # Total instantaneous offset of the warped clock against real time.
        t_ms = int(t_s * 1000)
        return round_half_up(scale * t_ms) - t_ms + params.get("offset_ms", 0)
    if mode == MODE_CONSTANT:
        return params.get("value")
    raise ProtocolError(f"no evaluator for program mode {mode!r}")


class Session:
    def __init__(self, plan, transport, clock="virtual", ack_timeout_s=5.0):
        self.session_id = uuid.uuid4().hex
        self.plan = plan
        self.transport = transport
        self.clock = VirtualClock() if clock == "virtual" else WallClock()
        self.ack_timeout_s = ack_timeout_s
        self.state = SessionState.CREATED
        self.log = []
        self._lock = threading.RLock()
        self._seq = 0
        self._responses = {}
        self._awaiting = None
        self._baselines = {}
        self._samples_sent = {}
        self._prop_pushes = {}
        self._app_events = []
        self._restore_outcome = None
        self._failure_reason = None
        self._plan_sent = False
        self._duration_s = 0.0
        self._log("state", self.state.value)

    # -- bookkeeping --------------------------------------------------------

    def _log(self, kind, detail):
        self.log.append({"t_ns": self.clock.now_ns(), "kind": kind, "detail": detail})

    def _set_state(self, state):
        self.state = state
        self._log("state", state.value)

    def _require(self, expected, op):
        if self.state is not expected:
            raise IllegalStateError(f"{op} requires state {expected.value}, session is {self.state.value}")

    # -- messaging ----------------------------------------------------------

    def _send(self, mtype, **fields):
        self._seq += 1
        msg = {"type": mtype, "seq": self._seq}
        msg.update(fields)
        self.transport.send(wire.encode_line(msg))
        return self._seq

    def _drain(self):
        while True:
            line = self.transport.receive()
            if line is None:
                return
            doc = wire.decode_line(line)
            dtype = doc.get("type")
            if dtype == "event":
                event = {"name": doc.get("name"), "t_ns": doc.get("t_ns"), "seq": doc.get("seq")}
                self._app_events.append(event)
                self._log("event", event["name"])
            elif dtype == "ack" and doc.get("ref") != self._awaiting:
                # Fire-and-forget confirmation (samples, property pushes);
                # keeping them all would only grow the response table.
                continue
            else:
                self._responses[doc.get("ref")] = doc

    def _await(self, ref):
        self._awaiting = ref
        try:
            self._drain()
            if ref in self._responses:
                return self._responses.pop(ref)
            if self.clock.is_virtual:
                # Nothing queued and nothing can arrive later without a send:
                # charge the timeout to virtual time and give up.
                self.clock.advance_to_ns(self.clock.now_ns() + int(self.ack_timeout_s * 1e9))
                raise TransportError(f"timeout waiting for response {ref}")
            deadline = time.monotonic() + self.ack_timeout_s
            while time.monotonic() < deadline:
                time.sleep(0.001)
                self._drain()
                if ref in self._responses:
                    return self._responses.pop(ref)
            raise TransportError(f"timeout waiting for response {ref}")
        finally:
            self._awaiting = None

    def _await_ack(self, ref):
        resp = self._await(ref)
        if resp.get("type") != "ack":
            raise TransportError(resp.get("reason", "request rejected"))
        return resp

    def _query(self, key_name):
        ref = self._send("query", key=key_name)
        resp = self._await(ref)
        if resp.get("type") != "value":
            raise TransportError(resp.get("reason", f"query for {key_name!r} rejected"))
        return resp.get("value")

    def _unexpected_nacks(self):
        return [r for r in self._responses.values() if r.get("type") == "nack"]

    # -- lifecycle ----------------------------------------------------------

    def attach(self):
        with self._lock:
            self._require(SessionState.CREATED, "attach")
            try:
                self.transport.attach(self.plan.target)
            except AttachError as exc:
                self._fail(str(exc))
                raise
            self._set_state(SessionState.ATTACHED)

    def inject(self):
        with self._lock:
            self._require(SessionState.ATTACHED, "inject")
            try:
                for key in plan_queryable_keys(self.plan):
                    self._baselines[key.value] = self._query(key.value)
                from spoofkit.hookplan import plan_to_doc

                ref = self._send("apply_plan", plan=plan_to_doc(self.plan))
                self._plan_sent = True
                resp = self._await(ref)
            except TransportError as exc:
                self._fail(str(exc))
                raise InjectError(str(exc)) from exc
            if resp.get("type") != "ack":
                reason = resp.get("reason", "plan rejected")
                self._fail(reason)
                raise InjectError(reason)
            self._set_state(SessionState.INJECTED)

    def query_property(self, key_name):
        """Ask the target what it currently perceives for a system key."""
        with self._lock:
            if self.state not in (SessionState.ATTACHED, SessionState.INJECTED, SessionState.RUNNING):
                raise IllegalStateError(f"query_property not available in {self.state.value}")
            return self._query(key_name)

    def _sample_schedule(self, duration_s, sample_streams):
        """All timed sends for the run, ordered by (t_ns, samples-first)."""
        entries = []
        order = 0
        for hook in self.plan.hooks:
            if hook.kind != KIND_SENSOR_STREAM:
                continue
            sensor = API_SENSOR[hook.api]
            order += 1
            if sample_streams and sensor.value in sample_streams:
                for t_ns, values in sample_streams[sensor.value]:
                    entries.append((t_ns, 0, order, ("sample", sensor.value, t_ns, values)))
                continue
            trace = synth_trace(signal_from_doc(hook.payload), sensor, hook.rate_hz, duration_s)
            for sample in trace.samples:
                entries.append(
                    (sample.t_ns, 0, order, ("sample", sensor.value, sample.t_ns, list(sample.values)))
                )

        programs = {}
        for hook in self.plan.hooks:
            if hook.kind == KIND_PROPERTY_PROGRAM:
                for key_name in hook.payload["initial"]:
                    programs[key_name] = hook.payload["program"]
        for tick in range(1, floor_snap(duration_s) + 1):
            t_ns = tick * _TICK_NS
            for order, key_name in enumerate(programs):
                entries.append((t_ns, 1, order, ("property", key_name, programs[key_name], tick)))

        heapq.heapify(entries)
        return entries

    def run(self, duration_s, sample_streams=None):
        """Drive the session for ``duration_s`` of session time, then restore.

        Always returns a report; failures land in it rather than raising.
        ``sample_streams`` substitutes recorded samples (sensor name ->
        [(t_ns, values), ...]) for synthesis, which is how replay works.
        """
        with self._lock:
            self._require(SessionState.INJECTED, "run")
            self._duration_s = float(duration_s)
            self._set_state(SessionState.RUNNING)
            try:
                entries = self._sample_schedule(duration_s, sample_streams)
                while entries:
                    t_ns, _, _, item = heapq.heappop(entries)
                    self.clock.advance_to_ns(t_ns)
                    if item[0] == "sample":
                        _, sensor_name, sample_t, values = item
                        self._send("sample", sensor=sensor_name, t_ns=sample_t, values=values)
                        self._samples_sent[sensor_name] = self._samples_sent.get(sensor_name, 0) + 1
                    else:
                        _, key_name, program_doc, tick = item
                        value = _program_value(program_doc, key_name, float(tick))
                        self._send("set_property", key=key_name, value=value)
                        push = self._prop_pushes.setdefault(key_name, {"pushes": 0, "last_value": None})
                        push["pushes"] += 1
                        push["last_value"] = value
                    self._drain()
                    nacks = self._unexpected_nacks()
                    if nacks:
                        raise TransportError(nacks[0].get("reason", "request rejected"))
                self.clock.advance_to_ns(int(duration_s * 1e9))
                self._drain()
            except TransportError as exc:
                self._fail(str(exc))
                return self.report()
            self.restore()
            return self.report()

    def restore(self):
        """Send restore and verify the baseline; legal once per session."""
        with self._lock:
            if self.state not in (SessionState.ATTACHED, SessionState.INJECTED, SessionState.RUNNING):
                raise IllegalStateError(f"restore not available in {self.state.value}")
            if not self._plan_sent:
                self._restore_outcome = RESTORE_NOT_NEEDED
                self._log("restore", RESTORE_NOT_NEEDED)
                self._set_state(SessionState.CLOSED)
                self._detach_quietly()
                return self._restore_outcome
            self._set_state(SessionState.RESTORING)
            outcome = self._attempt_restore()
            self._restore_outcome = outcome
            self._log("restore", outcome)
            if outcome == RESTORE_VERIFIED:
                self._set_state(SessionState.CLOSED)
            else:
                if self._failure_reason is None:
                    self._failure_reason = "restore not verified"
                self._set_state(SessionState.FAILED)
            self._detach_quietly()
            return outcome

    def _attempt_restore(self):
        # restore is idempotent app-side and verification is read-only, so
        # transient transport faults are absorbed by retrying the whole pass
        for _ in range(RESTORE_ATTEMPTS):
            self._log("restore", "attempt")
            if self._restore_once():
                return RESTORE_VERIFIED
        return RESTORE_ATTEMPTED

    def _restore_once(self):
        try:
            ref = self._send("restore")
            self._await_ack(ref)
            for key_name, baseline_value in self._baselines.items():
                value = self._query(key_name)
                if wire.encode_line({"v": value}) != wire.encode_line({"v": baseline_value}):
                    return False
        except (TransportError, ProtocolError):
            return False
        return True

    def _fail(self, reason):
        if self._failure_reason is None:
            self._failure_reason = reason
        self._log("failure", reason)
        if self._restore_outcome is None:
            if self._plan_sent:
                self._restore_outcome = self._attempt_restore()
            else:
                self._restore_outcome = RESTORE_NOT_NEEDED
            self._log("restore", self._restore_outcome)
        self._set_state(SessionState.FAILED)
        self._detach_quietly()

    def _detach_quietly(self):
        try:
            self.transport.detach()
        except TransportError:
            pass

    def report(self):
        properties = [
            {"key": key, "pushes": push["pushes"], "last_value": push["last_value"]}
            for key, push in self._prop_pushes.items()
        ]
        return SessionReport(
            session_id=self.session_id,
            plan_id=self.plan.plan_id,
            state=self.state.value,
            duration_s=self._duration_s,
            samples_sent=dict(self._samples_sent),
            properties_applied=properties,
            app_events=list(self._app_events),
            restore_outcome=self._restore_outcome,
            failure_reason=self._failure_reason,
        )


def create_session(plan, transport, clock="virtual", ack_timeout_s=5.0):
    """New CREATED session over an already-configured transport."""
    return Session(plan, transport, clock=clock, ack_timeout_s=ack_timeout_s)
