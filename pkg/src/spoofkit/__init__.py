"""spoofkit: scriptable sensor and system-value spoofing with a mock-device bench.

Pipeline: a declarative profile (what the target should perceive) compiles
into a hook plan (which APIs to intercept, with what payloads), which can
be emitted as an injectable agent script or driven live by a session over a
transport. The mock device stands in for a real instrumented process so
spoof, audit, and restore behavior can be exercised entirely on the desk.
"""

from spoofkit.hookplan import HookPlan, TargetApi, compile, emit_agent_script
from spoofkit.mockdev import MockApp, spawn_mock_app
from spoofkit.orchestrator import Session, SessionState, create_session
from spoofkit.profile import (
    SensorType,
    SignalSpec,
    SpoofProfile,
    SystemKey,
    parse_profile,
    serialize_profile,
    validate_profile,
)
from spoofkit.signals import SensorTrace, detect_steps, read_trace, synth_trace, write_trace
from spoofkit.transport import MockTransport

__version__ = "0.1.0"

__all__ = [
    "HookPlan",
    "MockApp",
    "MockTransport",
    "SensorTrace",
    "SensorType",
    "Session",
    "SessionState",
    "SignalSpec",
    "SpoofProfile",
    "SystemKey",
    "TargetApi",
    "compile",
    "create_session",
    "detect_steps",
    "emit_agent_script",
    "parse_profile",
    "read_trace",
    "serialize_profile",
    "spawn_mock_app",
    "synth_trace",
    "validate_profile",
    "write_trace",
]
