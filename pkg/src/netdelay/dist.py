"""Closed-form CDFs and quantiles for the two candidate delay laws.

Both laws share the size-dependent support minimum offset = d_min +
w/capacity; the variable part above it is either Exponential(lam) or the
positive half of a normal with scale sigma. The exponential quantile is
the generating function used for synthetic trace generation:

    quantile(p) = d_min + w/capacity - ln(1 - p)/lam
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from netdelay import _kernels
from netdelay.errors import InvalidProbability
from netdelay.model import PathParameters

_SQRT2 = math.sqrt(2.0)


class DistKind(enum.Enum):
    EXPONENTIAL = "exp"
    TRUNCATED_NORMAL = "normal"


@dataclass(frozen=True)
class DelayDistribution:
    kind: DistKind
    params: PathParameters


def _offset(params: PathParameters, w: int) -> float:
    if w < 1:
        raise ValueError(f"packet size must be >= 1, got {w}")
    return params.d_min + w / params.capacity


def exp_cdf(params: PathParameters, d: float, w: int) -> float:
    """P(delay <= d) for the exponential law at packet size w."""
    offset = _offset(params, w)
    if d < offset:
        return 0.0
    return -math.expm1(-params.lam * (d - offset))


def trunc_normal_cdf(params: PathParameters, d: float, w: int) -> float:
    """P(delay <= d) for the half-normal law at packet size w.

    Equals erf((d - offset) / (sigma * sqrt(2))) on the support; sigma is
    the mean-minus-minimum scale, kept exactly as fitted.
    """
    offset = _offset(params, w)
    if d < offset:
        return 0.0
    return _kernels.erf((d - offset) / (params.sigma * _SQRT2))


def cdf(dist: DelayDistribution, d: float, w: int) -> float:
    """Dispatch to the CDF for dist.kind."""
    if dist.kind is DistKind.EXPONENTIAL:
        return exp_cdf(dist.params, d, w)
    return trunc_normal_cdf(dist.params, d, w)


def quantile(params: PathParameters, p: float, w: int) -> float:
    """Inverse exponential CDF (the delay generating function)."""
    if not 0.0 <= p < 1.0:
        raise InvalidProbability(f"need 0 <= p < 1, got {p}")
    return _offset(params, w) - math.log1p(-p) / params.lam


def trunc_normal_quantile(params: PathParameters, p: float, w: int,
                          tol: float = 1e-10) -> float:
    """Inverse half-normal CDF by bisection (non-core, for symmetric tooling)."""
    if not 0.0 <= p < 1.0:
        raise InvalidProbability(f"need 0 <= p < 1, got {p}")
    offset = _offset(params, w)
    if p == 0.0:
        return offset
    lo = offset
    hi = offset + 10.0 * params.sigma  # F(offset + 10 sigma) rounds to 1
    while trunc_normal_cdf(params, hi, w) < p:
        hi += 10.0 * params.sigma
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if trunc_normal_cdf(params, mid, w) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def dist_quantile(dist: DelayDistribution, p: float, w: int) -> float:
    """Quantile for either law; used to build equal-probability cells."""
    if dist.kind is DistKind.EXPONENTIAL:
        return quantile(dist.params, p, w)
    return trunc_normal_quantile(dist.params, p, w)
