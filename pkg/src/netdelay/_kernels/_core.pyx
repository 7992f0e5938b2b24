# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: hot loops behind trace generation and the error function.

Bit-for-bit twin of _pure.py; see that module for the algorithm notes.
Do not compile with -ffast-math: expression shapes are pinned so both
backends produce identical doubles.
"""

from libc.math cimport exp, fabs, log, log1p

cdef unsigned long long GAMMA = 0x9E3779B97F4A7C15
cdef unsigned long long MIX1 = 0xBF58476D1CE4E5B9
cdef unsigned long long MIX2 = 0x94D049BB133111EB

cdef double TO_UNIT = 2.0 ** -53
cdef double TWO_OVER_SQRT_PI = 1.1283791670955126
cdef double LOG_SQRT_PI = 0.5723649429247001

BACKEND = "compiled"


cdef inline double _uniform_at(unsigned long long seed, unsigned long long index) nogil:
    cdef unsigned long long z = seed + (index + 1) * GAMMA
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    z = z ^ (z >> 31)
    return <double> (z >> 11) * TO_UNIT


cdef inline double _erfc_tail(double z) nogil:
    # upper regularized gamma Q(1/2, z) by modified Lentz continued
    # fraction; equals erfc(sqrt(z)), relative-accurate in the tail
    cdef double tiny = 1e-300
    cdef double b = z + 0.5
    cdef double c = 1.0 / tiny
    cdef double d = 1.0 / b
    cdef double h = d
    cdef double an, delta
    cdef int i
    for i in range(1, 200):
        an = -i * (i - 0.5)
        b += 2.0
        d = an * d + b
        if fabs(d) < tiny:
            d = tiny
        c = b + an / c
        if fabs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < 1e-16:
            break
    return exp(-z + 0.5 * log(z) - LOG_SQRT_PI) * h


cdef inline double _erf_scalar(double x) nogil:
    cdef double ax = -x if x < 0.0 else x
    cdef double x2 = ax * ax
    cdef double term, total, value
    cdef unsigned int k = 0
    if ax >= 3.0:
        value = 1.0 - _erfc_tail(x2)
    else:
        term = 1.0
        total = 1.0
        while term > total * 1e-17:
            k += 1
            term *= 2.0 * x2 / (2.0 * k + 1.0)
            total += term
        value = TWO_OVER_SQRT_PI * ax * exp(-x2) * total
    return value if x >= 0.0 else -value


def next_uniform(seed, index):
    """Uniform in [0, 1) at position `index` of the stream for `seed`."""
    return _uniform_at(<unsigned long long> seed, <unsigned long long> index)


def fill_uniforms(double[::1] out, seed, start_index=0):
    """Fill a float64 buffer with stream positions start_index, start_index+1, ..."""
    cdef unsigned long long s = <unsigned long long> seed
    cdef unsigned long long base = <unsigned long long> start_index
    cdef Py_ssize_t i, n = out.shape[0]
    with nogil:
        for i in range(n):
            out[i] = _uniform_at(s, base + <unsigned long long> i)


def fill_exp_delays(double[::1] out, double[::1] sizes, seed, start_index,
                    double d_min, double capacity, double lam):
    """Inverse-transform exponential delays, one per packet size."""
    cdef unsigned long long s = <unsigned long long> seed
    cdef unsigned long long base = <unsigned long long> start_index
    cdef Py_ssize_t i, n = out.shape[0]
    cdef double u
    if sizes.shape[0] != n:
        raise ValueError("out and sizes must have equal length")
    with nogil:
        for i in range(n):
            u = _uniform_at(s, base + <unsigned long long> i)
            out[i] = (d_min + sizes[i] / capacity) - log1p(-u) / lam


def erf(double x):
    """Error function via the all-positive-term confluent series."""
    return _erf_scalar(x)


def fill_erf(double[::1] out, double[::1] xs):
    cdef Py_ssize_t i, n = out.shape[0]
    if xs.shape[0] != n:
        raise ValueError("out and xs must have equal length")
    with nogil:
        for i in range(n):
            out[i] = _erf_scalar(xs[i])
