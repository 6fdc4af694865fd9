"""Deterministic, seeded synthesis of sensor streams and value programs.

Motion model: a gait is gravity on the vertical axis plus a sinusoid at the
step cadence, a quarter-phase lateral sway at 0.3x the amplitude, and
optional Gaussian noise:

    z = 9.81 + A sin(2 pi f t)
    x = 0.3 A sin(2 pi f t + pi/2)
    y = 0

Walking is A = 2.0 m/s^2 at 1.9 Hz; running is A = 6.0 m/s^2 at 2.8 Hz. On
the gyroscope the same shape applies around a zero baseline with smaller
default amplitudes. A shake is a single 0.2 s half-sine spike on z.

Value programs cover the non-stream spoofs: linear battery discharge
(rounded to whole percent, clamped to [0,100]) and clock warp
(epoch + round(scale * (now - epoch)) + offset).

Everything is reproducible: same spec, same seed, same trace, byte for
byte. Timestamps are uniform at round(1e9 / rate_hz) nanoseconds with the
first sample one interval in, so a 10 s trace ends exactly at t = 10 s.
"""

import io
import math
from dataclasses import dataclass, field

from spoofkit import kernels, wire
from spoofkit.errors import EmptyTrace, FormatError, IncompatibleMode, InvalidParams
from spoofkit.profile import (
    MODE_CONSTANT,
    MODE_RUNNING,
    MODE_SHAKE_SPIKE,
    MODE_SINE,
    MODE_WALKING,
    SENSOR_MODES,
    SensorType,
    SignalSpec,
    validate_signal_params,
)

GRAVITY_MS2 = 9.81
ACCURACY_HIGH = 3

WALK_AMPLITUDE = 2.0
WALK_CADENCE_HZ = 1.9
RUN_AMPLITUDE = 6.0
RUN_CADENCE_HZ = 2.8
GYRO_WALK_AMPLITUDE = 0.5
GYRO_RUN_AMPLITUDE = 1.5
LATERAL_RATIO = 0.3
SPIKE_WIDTH_S = 0.2
SPIKE_MAGNITUDE = 35.0
MIN_PEAK_SEPARATION_S = 0.25

# Snap tolerance for products like 1.9 * 60 that land a hair under the
# intended integer; floor would otherwise lose a whole step / sample.
_SNAP_EPS = 1e-9


def floor_snap(x):
    """floor(x) treating values within 1e-9 below an integer as that integer."""
    return math.floor(x + _SNAP_EPS)


def round_half_up(x):
    """Deterministic rounding: halves go toward positive infinity."""
    return math.floor(x + 0.5)


@dataclass(frozen=True)
class SensorSample:
    t_ns: int
    sensor: SensorType
    values: tuple
    accuracy: int = ACCURACY_HIGH


@dataclass(frozen=True)
class SensorTrace:
    """A finite sampled stream. ``spec`` is provenance only: it records what
    produced the trace, is dropped by the file format, and does not take
    part in equality."""

    sensor: SensorType
    rate_hz: float
    samples: tuple
    seed: int
    spec: SignalSpec | None = field(default=None, compare=False)

    @property
    def sample_interval_ns(self):
        return int(round(1e9 / self.rate_hz))


def _mode_defaults(mode, sensor):
    """(base_z, amplitude, cadence) defaults for a gait mode on a sensor."""
    if sensor is SensorType.ACCELEROMETER:
        base_z = GRAVITY_MS2
        amplitude = WALK_AMPLITUDE if mode == MODE_WALKING else RUN_AMPLITUDE
    else:
        base_z = 0.0
        amplitude = GYRO_WALK_AMPLITUDE if mode == MODE_WALKING else GYRO_RUN_AMPLITUDE
    cadence = WALK_CADENCE_HZ if mode == MODE_WALKING else RUN_CADENCE_HZ
    return base_z, amplitude, cadence


def walking_accel(t_s, amplitude=WALK_AMPLITUDE, cadence_hz=WALK_CADENCE_HZ, noise_sigma=0.0, rng=None):
    """Accelerometer vector of the gait model at one instant.

    With noise_sigma > 0 an ``rng`` with a ``next()`` method supplies the
    Gaussian draws (three per call, x then y then z).
    """
    ph = 2.0 * math.pi * cadence_hz * t_s
    x = LATERAL_RATIO * amplitude * math.sin(ph + math.pi / 2.0)
    y = 0.0
    z = GRAVITY_MS2 + amplitude * math.sin(ph)
    if noise_sigma > 0.0:
        if rng is None:
            raise InvalidParams("noise requires an rng")
        x = x + noise_sigma * rng.next()
        y = y + noise_sigma * rng.next()
        z = z + noise_sigma * rng.next()
    return (x, y, z)


def step_count_at(cadence_hz, t_s, initial=0):
    """Cumulative step counter value at time t: initial + floor(cadence * t)."""
    return initial + floor_snap(cadence_hz * t_s)


def battery_level_at(start_level, discharge_rate_per_min, t_s):
    """Battery percentage after t seconds of linear discharge, clamped."""
    level = round_half_up(start_level - discharge_rate_per_min * t_s / 60.0)
    return max(0, min(100, level))


def warped_clock(real_now_ms, offset_ms, scale, epoch_ms):
    """Spoofed wall-clock milliseconds for a real reading."""
    return epoch_ms + round_half_up(scale * (real_now_ms - epoch_ms)) + offset_ms


def _constant_values(spec, sensor):
    value = spec.params["value"]
    entries = value if isinstance(value, list) else [value]
    if sensor is SensorType.STEP_COUNTER:
        return (float(int(entries[0])),)
    return tuple(float(v) for v in entries)


def _step_rows(spec, n, dt_ns):
    """Step-counter rows for a gait mode: a monotone staircase."""
    _, _, cadence_default = _mode_defaults(spec.mode, SensorType.STEP_COUNTER)
    cadence = spec.params.get("cadence_hz", cadence_default)
    initial = spec.params.get("initial", 0)
    rows = []
    for k in range(1, n + 1):
        t_s = (k * dt_ns) / 1e9
        rows.append((float(step_count_at(cadence, t_s, initial)),))
    return rows


def _sine_rows(spec, sensor, n, dt_ns):
    amplitude = spec.params.get("amplitude", 1.0)
    freq = spec.params.get("freq_hz", 1.0)
    phase = spec.params.get("phase_rad", 0.0)
    offset = spec.params.get("offset", 0.0)
    sigma = spec.params.get("noise_sigma", 0.0)
    dims = sensor.dims
    noise = kernels.gaussians(spec.seed, n * dims) if sigma > 0.0 else None
    rows = []
    for k in range(1, n + 1):
        t_s = (k * dt_ns) / 1e9
        row = [0.0] * dims
        row[dims - 1] = offset + amplitude * math.sin(2.0 * math.pi * freq * t_s + phase)
        if noise is not None:
            base = (k - 1) * dims
            for a in range(dims):
                row[a] = row[a] + sigma * noise[base + a]
        rows.append(tuple(row))
    if sensor is SensorType.STEP_COUNTER:
        # The counter can only ever grow; clamp the wave to a staircase.
        staircase = []
        high = 0
        for (v,) in rows:
            high = max(high, max(0, round_half_up(v)))
            staircase.append((float(high),))
        return staircase
    return rows


def _chunk3(flat):
    return [tuple(flat[i : i + 3]) for i in range(0, len(flat), 3)]


def synth_trace(spec, sensor, rate_hz, duration_s):
    """Synthesize a full trace for one sensor.

    Raises IncompatibleMode when the mode cannot drive the sensor and
    InvalidParams when parameters are outside their domain.
    """
    if not isinstance(sensor, SensorType):
        raise InvalidParams(f"not a sensor: {sensor!r}")
    if not isinstance(rate_hz, (int, float)) or rate_hz <= 0 or not math.isfinite(rate_hz):
        raise InvalidParams("rate_hz must be a positive number")
    if not isinstance(duration_s, (int, float)) or duration_s < 0 or not math.isfinite(duration_s):
        raise InvalidParams("duration_s must be a non-negative number")
    if spec.mode not in SENSOR_MODES[sensor]:
        raise IncompatibleMode(f"mode {spec.mode!r} cannot drive sensor {sensor.value!r}")
    errors = validate_signal_params(spec, sensor)
    if errors:
        raise InvalidParams("; ".join(errors))

    n = floor_snap(rate_hz * duration_s)
    dt_ns = int(round(1e9 / rate_hz))

    if spec.mode == MODE_CONSTANT:
        constant = _constant_values(spec, sensor)
        rows = [constant] * n
    elif spec.mode in (MODE_WALKING, MODE_RUNNING):
        if sensor is SensorType.STEP_COUNTER:
            rows = _step_rows(spec, n, dt_ns)
        else:
            base_z, amp_default, cadence_default = _mode_defaults(spec.mode, sensor)
            flat = kernels.oscillation_values(
                n,
                dt_ns,
                base_z,
                spec.params.get("amplitude", amp_default),
                LATERAL_RATIO,
                spec.params.get("cadence_hz", cadence_default),
                spec.params.get("noise_sigma", 0.0),
                spec.seed,
            )
            rows = _chunk3(flat)
    elif spec.mode == MODE_SHAKE_SPIKE:
        base_z = GRAVITY_MS2 if sensor is SensorType.ACCELEROMETER else 0.0
        flat = kernels.halfsine_values(
            n,
            dt_ns,
            base_z,
            spec.params.get("spike_magnitude", SPIKE_MAGNITUDE),
            spec.params.get("start_s", 0.0),
            SPIKE_WIDTH_S,
            spec.params.get("noise_sigma", 0.0),
            spec.seed,
        )
        rows = _chunk3(flat)
    elif spec.mode == MODE_SINE:
        rows = _sine_rows(spec, sensor, n, dt_ns)
    else:
        raise IncompatibleMode(f"mode {spec.mode!r} cannot drive sensor {sensor.value!r}")

    samples = tuple(
        SensorSample((k + 1) * dt_ns, sensor, rows[k], ACCURACY_HIGH) for k in range(n)
    )
    return SensorTrace(sensor, float(rate_hz), samples, spec.seed, spec)


def _detect_threshold(trace):
    """Default step threshold: gravity + half the gait amplitude when the
    trace's provenance knows it, a conservative 1 m/s^2 margin otherwise."""
    amplitude = 1.0
    spec = trace.spec
    if spec is not None and spec.mode in (MODE_WALKING, MODE_RUNNING):
        _, default_amp, _ = _mode_defaults(spec.mode, trace.sensor)
        amplitude = spec.params.get("amplitude", default_amp)
    return GRAVITY_MS2 + amplitude / 2.0


def detect_steps(trace, threshold=None, min_separation_s=MIN_PEAK_SEPARATION_S):
    """Count gait peaks on the vertical axis of an accelerometer trace.

    A step is a local maximum above the threshold; peaks closer together
    than ``min_separation_s`` collapse into one.
    """
    if not trace.samples:
        raise EmptyTrace("cannot detect steps in an empty trace")
    if threshold is None:
        threshold = _detect_threshold(trace)
    vertical = [s.values[-1] for s in trace.samples]
    min_gap = math.ceil(min_separation_s * trace.rate_hz - _SNAP_EPS)
    return kernels.peak_count(vertical, threshold, max(1, min_gap))


def write_trace(trace, sink):
    """Write a trace: one JSON header line, then one line per sample."""
    if isinstance(sink, (str, bytes)) or hasattr(sink, "__fspath__"):
        with open(sink, "w", encoding="utf-8") as fh:
            write_trace(trace, fh)
        return
    sink.write(
        wire.encode_line({"sensor": trace.sensor.value, "rate_hz": trace.rate_hz, "seed": trace.seed})
    )
    sink.write("\n")
    for sample in trace.samples:
        sink.write(wire.encode_line({"t_ns": sample.t_ns, "values": list(sample.values)}))
        sink.write("\n")


def trace_to_text(trace):
    buf = io.StringIO()
    write_trace(trace, buf)
    return buf.getvalue()


def _read_number(doc, key, line_no):
    value = doc.get(key)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise FormatError(f"line {line_no}: {key} must be a number")
    return value


def read_trace(source):
    """Read a trace file back; validates structure, ordering, and spacing."""
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, "r", encoding="utf-8") as fh:
            return read_trace(fh)
    lines = [line for line in source.read().splitlines() if line.strip()]
    if not lines:
        raise FormatError("empty trace file")
    try:
        header = wire.decode_line(lines[0])
    except Exception as exc:
        raise FormatError(f"bad header: {exc}") from None
    if set(header) != {"sensor", "rate_hz", "seed"}:
        raise FormatError("header must carry exactly sensor, rate_hz, seed")
    try:
        sensor = SensorType(header["sensor"])
    except ValueError:
        raise FormatError(f"unknown sensor {header['sensor']!r}") from None
    rate_hz = header["rate_hz"]
    if not isinstance(rate_hz, (int, float)) or isinstance(rate_hz, bool) or rate_hz <= 0:
        raise FormatError("rate_hz must be a positive number")
    seed = header["seed"]
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise FormatError("seed must be a non-negative integer")

    dt_ns = int(round(1e9 / rate_hz))
    samples = []
    prev_t = 0
    prev_step = None
    for line_no, line in enumerate(lines[1:], start=2):
        try:
            doc = wire.decode_line(line)
        except Exception as exc:
            raise FormatError(f"line {line_no}: {exc}") from None
        if set(doc) != {"t_ns", "values"}:
            raise FormatError(f"line {line_no}: sample must carry exactly t_ns and values")
        t_ns = doc["t_ns"]
        if not isinstance(t_ns, int) or isinstance(t_ns, bool) or t_ns <= 0:
            raise FormatError(f"line {line_no}: t_ns must be a positive integer")
        if t_ns <= prev_t:
            raise FormatError(f"line {line_no}: t_ns not strictly increasing")
        if t_ns - prev_t != dt_ns:
            raise FormatError(f"line {line_no}: spacing is not uniform at the header rate")
        values = doc["values"]
        if not isinstance(values, list) or len(values) != sensor.dims:
            raise FormatError(f"line {line_no}: expected {sensor.dims} values")
        row = []
        for v in values:
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise FormatError(f"line {line_no}: values must be finite numbers")
            row.append(float(v))
        if sensor is SensorType.STEP_COUNTER:
            if prev_step is not None and row[0] < prev_step:
                raise FormatError(f"line {line_no}: step counter must be monotone")
            prev_step = row[0]
        samples.append(SensorSample(t_ns, sensor, tuple(row), ACCURACY_HIGH))
        prev_t = t_ns
    return SensorTrace(sensor, float(rate_hz), tuple(samples), seed, None)
