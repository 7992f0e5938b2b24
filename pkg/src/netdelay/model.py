"""Delay-model types and parameter estimation.

The end-to-end delay of a packet of size W is modeled as an affine fixed
part plus a random variable part:

    D(W) = d_min + W/capacity + d_var,   d_var ~ Exponential(lam)

`fixed_delay` evaluates the affine part; `estimate_capacity` and
`estimate_d_min` recover its slope and intercept from two packet sizes;
`fit_parameters` / `fit_single` / `fit_two_size` estimate the variable-part
scale. All types are immutable and all operations are pure functions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from netdelay.errors import (
    DegenerateSizes,
    EmptyTrace,
    NegativeResult,
    NonPositiveScale,
    NonPositiveSlope,
    SizeConflict,
    TooFewSamples,
)

# Quick fits are meaningful from about 20 probes; estimation refuses shorter
# traces unless the caller overrides min_samples explicitly.
DEFAULT_MIN_SAMPLES = 20


class TraceKind(enum.Enum):
    RTT = "RTT"
    OWD = "OWD"


@dataclass(frozen=True)
class DelaySample:
    """One measured delay observation."""

    sent_at: float      # seconds since epoch
    delay: float        # seconds
    packet_size: int    # bytes

    def __post_init__(self):
        if not self.delay > 0:
            raise ValueError(f"delay must be > 0, got {self.delay}")
        if self.packet_size < 1:
            raise ValueError(f"packet_size must be >= 1, got {self.packet_size}")


@dataclass(frozen=True)
class DelayTrace:
    """Ordered sample collection with path metadata."""

    samples: tuple[DelaySample, ...]
    source: str
    destination: str
    kind: TraceKind

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        times = [s.sent_at for s in self.samples]
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("samples must be ordered by non-decreasing sent_at")

    def __len__(self):
        return len(self.samples)

    def delays(self) -> np.ndarray:
        return np.array([s.delay for s in self.samples], dtype=np.float64)

    def sizes(self) -> np.ndarray:
        return np.array([s.packet_size for s in self.samples], dtype=np.float64)

    def uniform_size(self) -> int:
        """The single packet size used throughout, or SizeConflict."""
        if not self.samples:
            raise EmptyTrace("trace has no samples")
        sizes = {s.packet_size for s in self.samples}
        if len(sizes) != 1:
            raise SizeConflict(f"trace mixes packet sizes {sorted(sizes)}")
        return self.samples[0].packet_size


@dataclass(frozen=True)
class PathParameters:
    """Fitted model for one path.

    `sigma` (the mean variable delay, seconds) is the stored source of
    truth; the exponential rate `lam` is derived as 1/sigma so the pair can
    never drift apart. `d_av` is the average delay at `packet_size_ref`,
    i.e. d_min + packet_size_ref/capacity + sigma up to float rounding.
    `capacity` may be math.inf when only one packet size was observed and
    the slope is unidentifiable.
    """

    d_min: float            # seconds, zero-size intercept
    capacity: float         # bytes/second, may be math.inf
    sigma: float            # seconds, mean variable delay
    d_av: float             # seconds, average delay at packet_size_ref
    packet_size_ref: int    # bytes, the W used during fitting

    def __post_init__(self):
        if not self.d_min > 0:
            raise ValueError(f"d_min must be > 0, got {self.d_min}")
        if not self.capacity > 0:
            raise ValueError(f"capacity must be > 0, got {self.capacity}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if self.packet_size_ref < 1:
            raise ValueError("packet_size_ref must be >= 1")
        offset = self.d_min + self.packet_size_ref / self.capacity
        # allow ulp-of-d_av slack so sigma << offset stays constructible
        tolerance = 1e-9 * self.sigma + 8e-16 * abs(self.d_av)
        if abs((self.d_av - offset) - self.sigma) > tolerance:
            raise ValueError(
                f"inconsistent parameters: d_av - fixed delay = "
                f"{self.d_av - offset!r}, sigma = {self.sigma!r}"
            )

    @property
    def lam(self) -> float:
        """Exponential rate, 1/seconds (reciprocal of sigma)."""
        return 1.0 / self.sigma

    @classmethod
    def create(cls, d_min, capacity, packet_size_ref, sigma=None, lam=None,
               d_av=None) -> "PathParameters":
        """Build parameters from either sigma or lam, deriving d_av if omitted."""
        if (sigma is None) == (lam is None):
            raise ValueError("give exactly one of sigma or lam")
        if sigma is None:
            sigma = 1.0 / lam
        if d_av is None:
            d_av = (d_min + packet_size_ref / capacity) + sigma
        return cls(d_min=d_min, capacity=capacity, sigma=sigma, d_av=d_av,
                   packet_size_ref=packet_size_ref)


def fixed_delay(params: PathParameters, w: int) -> float:
    """Minimum (fixed) delay for a packet of w bytes: d_min + w/capacity."""
    if w < 1:
        raise ValueError(f"packet size must be >= 1, got {w}")
    return params.d_min + w / params.capacity


def _check_length(trace: DelayTrace, min_samples: int):
    if len(trace) == 0:
        raise EmptyTrace("trace has no samples")
    if len(trace) < min_samples:
        raise TooFewSamples(
            f"trace has {len(trace)} samples, need >= {min_samples} "
            f"(pass min_samples to override)"
        )


def _trace_statistic(trace: DelayTrace, statistic: str) -> float:
    delays = trace.delays()
    if statistic == "mean":
        return float(delays.mean())
    if statistic == "min":
        return float(delays.min())
    raise ValueError(f"unknown statistic {statistic!r}, use 'mean' or 'min'")


def estimate_capacity(trace_small: DelayTrace, trace_large: DelayTrace,
                      statistic: str = "mean",
                      min_samples: int = DEFAULT_MIN_SAMPLES) -> float:
    """End-to-end capacity from two uniform-size traces: (W2-W1)/(D2-D1).

    D_i is the per-trace delay statistic: the mean by default, or the
    per-trace minimum with statistic="min". Traces may be given in either
    size order.
    """
    _check_length(trace_small, min_samples)
    _check_length(trace_large, min_samples)
    w_a, w_b = trace_small.uniform_size(), trace_large.uniform_size()
    if w_a == w_b:
        raise SizeConflict(f"both traces use {w_a}-byte packets")
    d_a = _trace_statistic(trace_small, statistic)
    d_b = _trace_statistic(trace_large, statistic)
    if w_a > w_b:
        w_a, w_b, d_a, d_b = w_b, w_a, d_b, d_a
    if d_b <= d_a:
        raise NonPositiveSlope(
            f"delay statistic did not grow with size: D({w_a})={d_a}, D({w_b})={d_b}"
        )
    return (w_b - w_a) / (d_b - d_a)


def estimate_d_min(w1: int, d_fixed_1: float, w2: int, d_fixed_2: float) -> float:
    """Zero-size delay intercept from two (size, fixed delay) points."""
    if w1 == w2:
        raise DegenerateSizes(f"need two distinct sizes, got {w1} twice")
    value = (w2 * d_fixed_1 - w1 * d_fixed_2) / (w2 - w1)
    if value <= 0:
        raise NegativeResult(
            f"intercept {value} is not positive; inputs are inconsistent"
        )
    return value


def decompose(trace: DelayTrace, params: PathParameters) -> np.ndarray:
    """Variable component per sample: D - (d_min + W/capacity).

    Values may come out slightly negative when measurement noise puts a
    delay below the fitted fixed part; they are returned unclamped so that
    downstream averaging stays unbiased.
    """
    delays = trace.delays()
    offsets = params.d_min + trace.sizes() / params.capacity
    return delays - offsets


def fit_parameters(trace: DelayTrace, d_min: float, capacity: float,
                   min_samples: int = DEFAULT_MIN_SAMPLES) -> PathParameters:
    """Fit sigma (and the rate) given the fixed-part parameters.

    sigma = mean delay - (d_min + W/capacity) for the trace's uniform size
    W; with capacity=math.inf the offset reduces to d_min alone.
    """
    _check_length(trace, min_samples)
    w = trace.uniform_size()
    d_av = float(trace.delays().mean())
    offset = d_min + w / capacity
    sigma = d_av - offset
    if sigma <= 0:
        raise NonPositiveScale(
            f"mean delay {d_av} does not exceed fixed delay {offset}"
        )
    return PathParameters(d_min=d_min, capacity=capacity, sigma=sigma,
                          d_av=d_av, packet_size_ref=w)


def fit_single(trace: DelayTrace, min_samples: int = DEFAULT_MIN_SAMPLES,
               fixed_delay_percentile: float = 0.0) -> PathParameters:
    """Fit from one uniform-size trace; capacity is unidentifiable.

    The fixed part is estimated as the observed minimum delay (or a low
    percentile of it, to resist outliers); capacity is recorded as inf and
    the intercept carries the whole fixed delay for this size.
    """
    _check_length(trace, min_samples)
    delays = trace.delays()
    d_fixed = _fixed_estimate(delays, fixed_delay_percentile)
    return fit_parameters(trace, d_min=d_fixed, capacity=math.inf,
                          min_samples=min_samples)


def _fixed_estimate(delays: np.ndarray, percentile: float) -> float:
    if percentile < 0 or percentile >= 50:
        raise ValueError("fixed_delay_percentile must be in [0, 50)")
    if percentile == 0.0:
        return float(delays.min())
    return float(np.percentile(delays, percentile))


def fit_two_size(trace_a: DelayTrace, trace_b: DelayTrace,
                 capacity_statistic: str = "mean",
                 min_samples: int = DEFAULT_MIN_SAMPLES,
                 fixed_delay_percentile: float = 0.0) -> PathParameters:
    """Full two-size fit: capacity, intercept and variable-part scale.

    capacity comes from the per-trace delay statistic (mean by default),
    d_min from the two per-size fixed-delay estimates, and sigma from the
    sample-count-weighted mean of the per-trace (mean - fixed) gaps, so the
    rate estimate does not inherit capacity noise. The first trace supplies
    the reference packet size; d_av is the model-implied average at that
    size.
    """
    _check_length(trace_a, min_samples)
    _check_length(trace_b, min_samples)
    w_a, w_b = trace_a.uniform_size(), trace_b.uniform_size()
    if w_a == w_b:
        raise SizeConflict(f"both traces use {w_a}-byte packets")

    capacity = estimate_capacity(trace_a, trace_b, statistic=capacity_statistic,
                                 min_samples=min_samples)

    delays_a, delays_b = trace_a.delays(), trace_b.delays()
    fixed_a = _fixed_estimate(delays_a, fixed_delay_percentile)
    fixed_b = _fixed_estimate(delays_b, fixed_delay_percentile)
    d_min = estimate_d_min(w_a, fixed_a, w_b, fixed_b)

    gap_a = float(delays_a.mean()) - fixed_a
    gap_b = float(delays_b.mean()) - fixed_b
    if gap_a <= 0 or gap_b <= 0:
        raise NonPositiveScale("per-trace mean does not exceed its fixed delay")
    n_a, n_b = len(trace_a), len(trace_b)
    sigma = (n_a * gap_a + n_b * gap_b) / (n_a + n_b)

    return PathParameters.create(d_min=d_min, capacity=capacity, sigma=sigma,
                                 packet_size_ref=w_a)
