"""Pure-Python fallback for the synthesis inner loops.

Mirrors the compiled extension (spoofkit._kernels) bit for bit: same
generator, same Gaussian shaping, same expression order. Any change here
must be made in _kernels.pyx as well; the parity tests enforce equality.

Generator: splitmix64. State advances by the 64-bit golden-ratio gamma
0x9E3779B97F4A7C15 and each output is finalized with the standard two
xor-multiply rounds. Uniform doubles take the top 53 bits of an output
word. Gaussians come from Box-Muller, two uniforms per pair:

    u1 in (0,1]:  ((z1 >> 11) + 1) * 2^-53
    u2 in [0,1):  (z2 >> 11) * 2^-53
    r = sqrt(-2 ln u1)
    g0 = r cos(2 pi u2),  g1 = r sin(2 pi u2)

The pair is consumed in order (g0 first, g1 cached), so a stream of n
gaussians costs ceil(n/2) pairs and is identical for any call pattern that
reads the same count from the same seed.
"""

import math

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV_2_53 = 2.0 ** -53
_TAU = 2.0 * math.pi
_HALF_PI = math.pi / 2.0


class _Gauss:
    """Stateful Box-Muller stream over splitmix64."""

    __slots__ = ("_state", "_spare", "_has_spare")

    def __init__(self, seed):
        self._state = seed & _MASK64
        self._spare = 0.0
        self._has_spare = False

    def _next_word(self):
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def next(self):
        if self._has_spare:
            self._has_spare = False
            return self._spare
        u1 = ((self._next_word() >> 11) + 1) * _INV_2_53
        u2 = (self._next_word() >> 11) * _INV_2_53
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare = r * math.sin(_TAU * u2)
        self._has_spare = True
        return r * math.cos(_TAU * u2)


def gaussians(seed, n):
    """First ``n`` values of the seeded Gaussian stream."""
    g = _Gauss(seed)
    return [g.next() for _ in range(n)]


def oscillation_values(n, dt_ns, base_z, amplitude, lateral_ratio, cadence_hz, noise_sigma, seed):
    """Gait oscillation: flat [x0,y0,z0, x1,y1,z1, ...] for samples 1..n.

    Sample k (1-based) sits at t = k*dt_ns nanoseconds:
        z = base_z + A sin(2 pi f t)
        x = lateral_ratio * A sin(2 pi f t + pi/2)
        y = 0
    plus seeded Gaussian noise per axis when noise_sigma > 0.
    """
    out = []
    g = _Gauss(seed) if noise_sigma > 0.0 else None
    for k in range(1, n + 1):
        t = (k * dt_ns) / 1e9
        ph = _TAU * cadence_hz * t
        x = lateral_ratio * amplitude * math.sin(ph + _HALF_PI)
        y = 0.0
        z = base_z + amplitude * math.sin(ph)
        if g is not None:
            x = x + noise_sigma * g.next()
            y = y + noise_sigma * g.next()
            z = z + noise_sigma * g.next()
        out.append(x)
        out.append(y)
        out.append(z)
    return out


def halfsine_values(n, dt_ns, base_z, magnitude, start_s, width_s, noise_sigma, seed):
    """Resting baseline with one half-sine pulse of ``magnitude`` on the z axis.

    The pulse spans [start_s, start_s + width_s]; outside it the vector is
    [0, 0, base_z]. Same layout and noise discipline as oscillation_values.
    """
    out = []
    g = _Gauss(seed) if noise_sigma > 0.0 else None
    for k in range(1, n + 1):
        t = (k * dt_ns) / 1e9
        x = 0.0
        y = 0.0
        z = base_z
        if start_s <= t <= start_s + width_s:
            z = z + magnitude * math.sin(math.pi * (t - start_s) / width_s)
        if g is not None:
            x = x + noise_sigma * g.next()
            y = y + noise_sigma * g.next()
            z = z + noise_sigma * g.next()
        out.append(x)
        out.append(y)
        out.append(z)
    return out


def peak_count(values, threshold, min_gap):
    """Count local maxima above ``threshold`` at least ``min_gap`` indices apart.

    A peak rises strictly above its left neighbor and is >= its right one,
    so a flat crest counts once. Endpoints never qualify.
    """
    count = 0
    last = -(1 << 62)
    for i in range(1, len(values) - 1):
        v = values[i]
        if v > threshold and v > values[i - 1] and v >= values[i + 1] and i - last >= min_gap:
            count += 1
            last = i
    return count
