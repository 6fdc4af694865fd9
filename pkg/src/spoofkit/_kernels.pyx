# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled synthesis inner loops.

Bit-identical twin of spoofkit._kernels_py; see that module for the
algorithm notes. Compiled with -ffp-contract=off so no fused multiply-add
can perturb results relative to the pure path.
"""

from libc.math cimport sin, cos, log, sqrt, M_PI

ctypedef unsigned long long u64

cdef u64 _GAMMA = 0x9E3779B97F4A7C15ULL
cdef u64 _MIX1 = 0xBF58476D1CE4E5B9ULL
cdef u64 _MIX2 = 0x94D049BB133111EBULL
cdef double _INV_2_53 = 2.0 ** -53
cdef double _TAU = 2.0 * M_PI
cdef double _HALF_PI = M_PI / 2.0


cdef struct GaussState:
    u64 state
    double spare
    bint has_spare


cdef inline u64 _next_word(GaussState* g) noexcept nogil:
    g.state = g.state + _GAMMA
    cdef u64 z = g.state
    z = (z ^ (z >> 30)) * _MIX1
    z = (z ^ (z >> 27)) * _MIX2
    return z ^ (z >> 31)


cdef inline double _next_gauss(GaussState* g) noexcept nogil:
    cdef double u1, u2, r
    if g.has_spare:
        g.has_spare = False
        return g.spare
    u1 = <double> ((_next_word(g) >> 11) + 1) * _INV_2_53
    u2 = <double> (_next_word(g) >> 11) * _INV_2_53
    r = sqrt(-2.0 * log(u1))
    g.spare = r * sin(_TAU * u2)
    g.has_spare = True
    return r * cos(_TAU * u2)


cdef inline void _init_gauss(GaussState* g, u64 seed) noexcept nogil:
    g.state = seed
    g.spare = 0.0
    g.has_spare = False


def gaussians(seed, n):
    """First ``n`` values of the seeded Gaussian stream."""
    cdef GaussState g
    cdef Py_ssize_t i, count = n
    _init_gauss(&g, <u64> seed)
    out = []
    for i in range(count):
        out.append(_next_gauss(&g))
    return out


def oscillation_values(n, dt_ns, base_z, amplitude, lateral_ratio, cadence_hz, noise_sigma, seed):
    """Gait oscillation samples; see the pure twin for the formula."""
    cdef GaussState g
    cdef Py_ssize_t k, count = n
    cdef u64 step_ns = <u64> dt_ns
    cdef double bz = base_z, amp = amplitude, lat = lateral_ratio
    cdef double cadence = cadence_hz, sigma = noise_sigma
    cdef double t, ph, x, y, z
    cdef bint noisy = sigma > 0.0
    if noisy:
        _init_gauss(&g, <u64> seed)
    out = []
    for k in range(1, count + 1):
        t = (<double> (<u64> k * step_ns)) / 1e9
        ph = _TAU * cadence * t
        x = lat * amp * sin(ph + _HALF_PI)
        y = 0.0
        z = bz + amp * sin(ph)
        if noisy:
            x = x + sigma * _next_gauss(&g)
            y = y + sigma * _next_gauss(&g)
            z = z + sigma * _next_gauss(&g)
        out.append(x)
        out.append(y)
        out.append(z)
    return out


def halfsine_values(n, dt_ns, base_z, magnitude, start_s, width_s, noise_sigma, seed):
    """Half-sine pulse samples; see the pure twin for the formula."""
    cdef GaussState g
    cdef Py_ssize_t k, count = n
    cdef u64 step_ns = <u64> dt_ns
    cdef double bz = base_z, mag = magnitude, t0 = start_s, width = width_s
    cdef double sigma = noise_sigma
    cdef double t, x, y, z
    cdef bint noisy = sigma > 0.0
    if noisy:
        _init_gauss(&g, <u64> seed)
    out = []
    for k in range(1, count + 1):
        t = (<double> (<u64> k * step_ns)) / 1e9
        x = 0.0
        y = 0.0
        z = bz
        if t0 <= t <= t0 + width:
            z = z + mag * sin(M_PI * (t - t0) / width)
        if noisy:
            x = x + sigma * _next_gauss(&g)
            y = y + sigma * _next_gauss(&g)
            z = z + sigma * _next_gauss(&g)
        out.append(x)
        out.append(y)
        out.append(z)
    return out


def peak_count(values, threshold, min_gap):
    """Count thresholded local maxima with an index-gap floor."""
    cdef Py_ssize_t i, n = len(values)
    cdef Py_ssize_t gap = min_gap
    cdef Py_ssize_t last = -(1 << 62)
    cdef double thr = threshold
    cdef double prev, v, nxt
    cdef long count = 0
    if n < 3:
        return 0
    prev = values[0]
    v = values[1]
    for i in range(1, n - 1):
        nxt = values[i + 1]
        if v > thr and v > prev and v >= nxt and i - last >= gap:
            count += 1
            last = i
        prev = v
        v = nxt
    return count
