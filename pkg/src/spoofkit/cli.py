"""Command line interface.

Exit codes: 0 success, 1 validation or domain error, 2 usage error
(including missing files), 3 session failure. ``run`` and ``replay`` write
their report even when the session fails, so there is always an artifact
to audit.
"""

import argparse
import json
import sys

from spoofkit import wire
from spoofkit.errors import (
    AttachError,
    ConfigError,
    FormatError,
    InjectError,
    ProfileSyntaxError,
    SchemaError,
    SpoofkitError,
)
from spoofkit.hookplan import compile as compile_plan
from spoofkit.hookplan import emit_agent_script, plan_to_document, SENSOR_API, KIND_SENSOR_STREAM
from spoofkit.mockdev import spawn_mock_app
from spoofkit.orchestrator import (
    RESTORE_NOT_NEEDED,
    RESTORE_VERIFIED,
    SessionState,
    create_session,
)
from spoofkit.profile import SensorType, parse_profile, parse_profile_diagnostics
from spoofkit.signals import read_trace, synth_trace, write_trace
from spoofkit.transport import MockTransport

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_SESSION = 3


def _read_text(path):
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write_text(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def cmd_validate(args):
    try:
        _, diags = parse_profile_diagnostics(_read_text(args.profile))
    except ProfileSyntaxError as exc:
        print(f"error - {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    for d in diags:
        print(f"{d.severity} {d.path} {d.message}", file=sys.stderr)
    return EXIT_DOMAIN if any(d.severity == "error" for d in diags) else EXIT_OK


def cmd_synth(args):
    profile = parse_profile(_read_text(args.profile))
    try:
        sensor = SensorType(args.sensor)
    except ValueError:
        print(f"error: unknown sensor {args.sensor!r}", file=sys.stderr)
        return EXIT_DOMAIN
    override = next((so for so in profile.sensor_overrides if so.sensor is sensor), None)
    if override is None:
        print(f"error: profile does not override sensor {args.sensor!r}", file=sys.stderr)
        return EXIT_DOMAIN
    rate = override.rate_hz if override.rate_hz is not None else profile.default_rate_hz
    trace = synth_trace(override.signal, sensor, rate, args.duration)
    write_trace(trace, args.out)
    print(f"wrote {len(trace.samples)} samples to {args.out}")
    return EXIT_OK


def cmd_compile(args):
    profile = parse_profile(_read_text(args.profile))
    plan = compile_plan(profile)
    _write_text(args.out, plan_to_document(plan))
    print(f"wrote plan {plan.plan_id[:12]} with {len(plan.hooks)} hooks to {args.out}")
    return EXIT_OK


def cmd_emit_agent(args):
    profile = parse_profile(_read_text(args.profile))
    plan = compile_plan(profile)
    _write_text(args.out, emit_agent_script(plan))
    print(f"wrote agent script for plan {plan.plan_id[:12]} to {args.out}")
    return EXIT_OK


def _write_report(path, session):
    if path:
        _write_text(path, json.dumps(wire.normalize(session.report().to_doc()), indent=2) + "\n")


def _finish_session(args, session):
    _write_report(args.report, session)
    report = session.report()
    ok = report.state == SessionState.CLOSED.value and report.restore_outcome in (
        RESTORE_VERIFIED,
        RESTORE_NOT_NEEDED,
    )
    summary = f"session {report.state.lower()}"
    if report.restore_outcome:
        summary += f", restore {report.restore_outcome}"
    if report.failure_reason:
        summary += f": {report.failure_reason}"
    print(summary, file=sys.stdout if ok else sys.stderr)
    return EXIT_OK if ok else EXIT_SESSION


def _session_over_mock(plan, app_config_text, clock):
    transport = MockTransport()
    spawn_mock_app(app_config_text, transport)
    return create_session(plan, transport, clock=clock)


def cmd_run(args):
    profile = parse_profile(_read_text(args.profile))
    plan = compile_plan(profile)
    session = _session_over_mock(plan, _read_text(args.app), args.clock)
    try:
        session.attach()
        session.inject()
        session.run(args.duration)
    except (AttachError, InjectError):
        pass  # the report carries the failure
    return _finish_session(args, session)


def cmd_replay(args):
    trace = read_trace(args.trace)
    app_config = json.loads(_read_text(args.app))
    process = app_config.get("process") if isinstance(app_config, dict) else None
    if not isinstance(process, str) or not process:
        raise ConfigError("app configuration must name a process")

    from spoofkit.hookplan import Hook, HookPlan, _content_doc

    payload = {
        "mode": "constant",
        "params": {"value": [0.0] * trace.sensor.dims},
        "seed": trace.seed,
    }
    hook = Hook(SENSOR_API[trace.sensor], KIND_SENSOR_STREAM, payload, trace.rate_hz)
    plan_id = wire.digest(_content_doc(process, (hook,)))
    plan = HookPlan(plan_id, process, (hook,))

    session = _session_over_mock(plan, json.dumps(app_config), args.clock)
    duration = trace.samples[-1].t_ns / 1e9 if trace.samples else 0.0
    streams = {trace.sensor.value: [(s.t_ns, list(s.values)) for s in trace.samples]}
    try:
        session.attach()
        session.inject()
        session.run(duration, sample_streams=streams)
    except (AttachError, InjectError):
        pass
    return _finish_session(args, session)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spoofkit",
        description="Compile spoof profiles into hook plans and drive them against a target.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a profile document")
    p.add_argument("profile")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("synth", help="synthesize a sensor trace from a profile override")
    p.add_argument("profile")
    p.add_argument("--sensor", required=True)
    p.add_argument("--duration", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("compile", help="lower a profile to a hook plan document")
    p.add_argument("profile")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("emit-agent", help="emit the injectable agent script for a profile")
    p.add_argument("profile")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_emit_agent)

    p = sub.add_parser("run", help="drive a spoof session against a mock app")
    p.add_argument("profile")
    p.add_argument("--app", required=True, help="mock app configuration (JSON)")
    p.add_argument("--duration", type=float, required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--transport", default="mock", choices=["mock"])
    p.add_argument("--clock", default="virtual", choices=["virtual", "wall"])
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("replay", help="replay a recorded trace against a mock app")
    p.add_argument("trace")
    p.add_argument("--app", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--clock", default="virtual", choices=["virtual", "wall"])
    p.set_defaults(func=cmd_replay)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: no such file: {exc.filename}", file=sys.stderr)
        return EXIT_USAGE
    except (ProfileSyntaxError, SchemaError, FormatError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SpoofkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except json.JSONDecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
