"""Pure-Python kernels: reference implementation of the hot loops.

The compiled twin (_core.pyx) must produce bit-identical results; tests
compare the two element for element. Keep every floating-point expression
here in exactly the same shape as in _core.pyx.

Uniform stream: splitmix64, a counter-based 64-bit generator (Weyl sequence
stepped by GAMMA, then a two-round multiply/xor-shift finalizer). Draw k of
stream `seed` depends only on (seed, k), so any position is addressable
directly and batch fills match one-at-a-time draws. A double in [0, 1) is
formed from the 53 high bits of the output word.
"""

import math

BACKEND = "pure"

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TO_UNIT = 2.0 ** -53

_TWO_OVER_SQRT_PI = 1.1283791670955126


def next_uniform(seed, index):
    """Uniform in [0, 1) at position `index` of the stream for `seed`."""
    z = (seed + (index + 1) * _GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    z = z ^ (z >> 31)
    return (z >> 11) * _TO_UNIT


def fill_uniforms(out, seed, start_index=0):
    """Fill a float64 buffer with stream positions start_index, start_index+1, ..."""
    for i in range(len(out)):
        out[i] = next_uniform(seed, start_index + i)


def fill_exp_delays(out, sizes, seed, start_index, d_min, capacity, lam):
    """Inverse-transform exponential delays, one per packet size.

    out[i] = (d_min + sizes[i]/capacity) - log1p(-u_i)/lam with u_i drawn
    from the seeded uniform stream. `capacity` may be math.inf.
    """
    for i in range(len(out)):
        u = next_uniform(seed, start_index + i)
        out[i] = (d_min + sizes[i] / capacity) - math.log1p(-u) / lam


_LOG_SQRT_PI = 0.5723649429247001


def _erfc_tail(z):
    # upper regularized gamma Q(1/2, z) by modified Lentz continued
    # fraction; equals erfc(sqrt(z)) and is relative-accurate, so 1 - Q
    # stays monotone at the ulp level deep in the tail
    tiny = 1e-300
    b = z + 0.5
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 200):
        an = -i * (i - 0.5)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-z + 0.5 * math.log(z) - _LOG_SQRT_PI) * h


def erf(x):
    """Error function: confluent series below |x| = 3, complementary
    continued fraction beyond.

    Series: erf(x) = (2x/sqrt(pi)) exp(-x^2) sum_k (2x^2)^k/(1*3*...*(2k+1));
    all terms positive, no cancellation.
    """
    ax = abs(x)
    x2 = ax * ax
    if ax >= 3.0:
        value = 1.0 - _erfc_tail(x2)
    else:
        term = 1.0
        total = 1.0
        k = 0
        while term > total * 1e-17:
            k += 1
            term *= 2.0 * x2 / (2.0 * k + 1.0)
            total += term
        value = _TWO_OVER_SQRT_PI * ax * math.exp(-x2) * total
    return value if x >= 0.0 else -value


def fill_erf(out, xs):
    for i in range(len(out)):
        out[i] = erf(xs[i])
