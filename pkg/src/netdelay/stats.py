"""Empirical CDF, correlation screening and chi-square goodness of fit.

The testing procedure: split observations into equal-probability cells
under the fitted model (cell edges at model quantiles, so each cell expects
N/n counts), compute t = sum (observed-expected)^2/expected, and accept the
hypothesis when t stays below the chi-square quantile at n_cells-1 degrees
of freedom. Cell counts follow the sample-size rule round(1 + 3.22 ln N)+1.
The windowed scan applies the same test to leading windows of growing
length to locate the span over which the fitted parameters stay stationary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from netdelay.dist import DelayDistribution, DistKind, cdf, dist_quantile
from netdelay.errors import (
    DegenerateVariance,
    EmptyTrace,
    InvalidProbability,
    NonPositiveScale,
    TooFewSamples,
    TraceTooShort,
    ZeroExpected,
)
from netdelay.model import DelayTrace, PathParameters

# Window lengths used for the stationarity scan.
DEFAULT_WINDOW_SIZES = (50, 100, 200, 250, 500, 1000, 2000)


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    """Step function F(x) = (#samples <= x) / n."""

    sorted_delays: np.ndarray
    n: int

    @classmethod
    def from_values(cls, values, clamp_negative_to_zero=False) -> "EmpiricalCdf":
        arr = np.sort(np.asarray(values, dtype=np.float64))
        if arr.size == 0:
            raise EmptyTrace("no values")
        if clamp_negative_to_zero:
            arr = np.maximum(arr, 0.0)
        return cls(sorted_delays=arr, n=int(arr.size))

    def __call__(self, x):
        return np.searchsorted(self.sorted_delays, x, side="right") / self.n

    def values_at_samples(self) -> np.ndarray:
        """F evaluated at the sorted sample points themselves (tie-aware)."""
        return np.searchsorted(self.sorted_delays, self.sorted_delays,
                               side="right") / self.n


def empirical_cdf(trace: DelayTrace) -> EmpiricalCdf:
    if len(trace) == 0:
        raise EmptyTrace("trace has no samples")
    return EmpiricalCdf.from_values(trace.delays())


@dataclass(frozen=True)
class GofResult:
    """One chi-square test outcome."""

    n_samples: int
    n_cells: int
    statistic: float
    threshold: float
    accepted: bool
    dist_kind: DistKind

    def __post_init__(self):
        if self.n_cells < 2:
            raise ValueError("need at least 2 cells")
        if self.accepted != (self.statistic < self.threshold):
            raise ValueError("accepted flag contradicts statistic vs threshold")


@dataclass(frozen=True)
class WindowScan:
    """Per-window-size test results; fractions only in disjoint mode."""

    window_sizes: tuple[int, ...]
    results: tuple[GofResult, ...]
    fractions: tuple[float, ...] | None = None

    def __post_init__(self):
        if len(self.window_sizes) != len(self.results):
            raise ValueError("one result per requested window size")


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    sx = math.sqrt(float(xc @ xc))
    sy = math.sqrt(float(yc @ yc))
    if sx == 0.0 or sy == 0.0:
        raise DegenerateVariance("correlation undefined for a constant vector")
    return float(xc @ yc) / (sx * sy)


def pearson_correlation(ecdf: EmpiricalCdf, dist: DelayDistribution, w: int) -> float:
    """Pearson r between empirical and model CDF values at the sample points."""
    if len(np.unique(ecdf.sorted_delays)) < 3:
        raise TooFewSamples("need at least 3 distinct delay values")
    f_emp = ecdf.values_at_samples()
    f_theory = np.array([cdf(dist, float(d), w) for d in ecdf.sorted_delays])
    return _pearson(f_emp, f_theory)


def sturges_cells(n: int) -> int:
    """Cell count for n observations: round(1 + 3.22 ln n) + 1, ties up."""
    if n < 10:
        raise TooFewSamples(f"need at least 10 observations, got {n}")
    return int(math.floor(1.0 + 3.22 * math.log(n) + 0.5)) + 1


def _cell_edges(dist: DelayDistribution, w: int, n_cells: int) -> np.ndarray:
    """Equal-probability cell edges: model quantiles at k/n_cells, k=0..n-1."""
    probs = [k / n_cells for k in range(n_cells)]
    return np.array([dist_quantile(dist, p, w) for p in probs])


def chi_square_statistic(window, dist: DelayDistribution, w: int,
                         n_cells: int) -> float:
    """t = sum over cells of (observed - expected)^2 / expected.

    Cells are left-closed intervals between model quantiles; the first cell
    absorbs anything below the support minimum (where the model CDF is 0)
    and the last is closed by the tail mass, so expected counts always sum
    to the window length.
    """
    values = np.sort(np.asarray(window, dtype=np.float64))
    n = values.size
    if n_cells < 2:
        raise ValueError("need at least 2 cells")
    if n < n_cells:
        raise TooFewSamples(f"{n} observations cannot fill {n_cells} cells")

    edges = _cell_edges(dist, w, n_cells)
    interior = edges[1:]
    idx = np.searchsorted(values, interior, side="left")
    observed = np.diff(np.concatenate(([0], idx, [n])))

    f_edges = np.concatenate(
        ([0.0], [cdf(dist, float(e), w) for e in interior], [1.0])
    )
    expected = n * np.diff(f_edges)
    if np.any(expected <= 0.0):
        raise ZeroExpected("a cell has zero expected count; binning is degenerate")
    return float(((observed - expected) ** 2 / expected).sum())


# --- chi-square quantile ----------------------------------------------------

def _regularized_gamma_p(a: float, x: float) -> float:
    """Lower regularized incomplete gamma P(a, x), series or continued fraction."""
    if x < 0.0 or a <= 0.0:
        raise ValueError("need x >= 0 and a > 0")
    if x == 0.0:
        return 0.0
    log_front = -x + a * math.log(x) - math.lgamma(a)
    if x < a + 1.0:
        ap = a
        term = 1.0 / a
        total = term
        for _ in range(500):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * 1e-16:
                break
        return total * math.exp(log_front)
    # modified Lentz continued fraction for the upper tail Q(a, x)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -i * (i - a)
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
    return 1.0 - math.exp(log_front) * h


def _chi2_cdf(x: float, df: int) -> float:
    if x <= 0.0:
        return 0.0
    return _regularized_gamma_p(df / 2.0, x / 2.0)


def _norm_quantile_approx(p: float) -> float:
    # Hastings rational approximation, |error| < 4.5e-4; start value only.
    if p == 0.5:
        return 0.0
    q = p if p < 0.5 else 1.0 - p
    t = math.sqrt(-2.0 * math.log(q))
    z = t - (2.515517 + 0.802853 * t + 0.010328 * t * t) / (
        1.0 + 1.432788 * t + 0.189269 * t * t + 0.001308 * t * t * t
    )
    return -z if p < 0.5 else z


def chi_square_quantile(df: int, p: float) -> float:
    """Inverse chi-square CDF: the acceptance threshold at probability p.

    Starts from the Wilson-Hilferty cube approximation and refines by
    bisection on the regularized-gamma CDF.
    """
    if df < 1:
        raise ValueError(f"need df >= 1, got {df}")
    if not 0.0 < p < 1.0:
        raise InvalidProbability(f"need 0 < p < 1, got {p}")
    z = _norm_quantile_approx(p)
    t = 1.0 - 2.0 / (9.0 * df) + z * math.sqrt(2.0 / (9.0 * df))
    x0 = df * t * t * t if t > 0.0 else 0.5
    lo = 0.0
    hi = max(1.0, 2.0 * x0)
    while _chi2_cdf(hi, df) < p:
        hi *= 2.0
    while hi - lo > 1e-9 * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if _chi2_cdf(mid, df) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --- goodness-of-fit test and stationarity scan -----------------------------

def _fit_window(window: np.ndarray, w: int, offset: float | None) -> PathParameters:
    if offset is None:
        offset = float(window.min())
    d_av = float(window.mean())
    sigma = d_av - offset
    if sigma <= 0:
        raise NonPositiveScale(
            f"window mean {d_av} does not exceed the fixed delay {offset}"
        )
    return PathParameters(d_min=offset, capacity=math.inf, sigma=sigma,
                          d_av=d_av, packet_size_ref=w)


def gof_test(window, dist_kind: DistKind, w: int, significance: float = 0.95,
             offset: float | None = None) -> GofResult:
    """Fit scale on the window, then chi-square test the hypothesis.

    `offset` carries the trace-level fixed delay for size w; when None the
    window minimum is used. The scale (sigma, and the rate as its
    reciprocal) is refitted from this window's mean, so the test probes
    whether the window is consistent with one stationary parameter set.
    """
    values = np.asarray(window, dtype=np.float64)
    params = _fit_window(values, w, offset)
    n_cells = sturges_cells(values.size)
    statistic = chi_square_statistic(values, DelayDistribution(dist_kind, params),
                                     w, n_cells)
    threshold = chi_square_quantile(n_cells - 1, significance)
    return GofResult(n_samples=int(values.size), n_cells=n_cells,
                     statistic=statistic, threshold=threshold,
                     accepted=statistic < threshold, dist_kind=dist_kind)


def window_scan(trace: DelayTrace, window_sizes=DEFAULT_WINDOW_SIZES,
                dist_kind: DistKind = DistKind.EXPONENTIAL,
                significance: float = 0.95, offset: float | None = None,
                disjoint: bool = False) -> WindowScan:
    """Run gof_test per window size over the leading window of the trace.

    With disjoint=True every non-overlapping window of each size is tested
    as well and the per-size acceptance fraction is reported alongside the
    leading-window result.
    """
    sizes = tuple(int(s) for s in window_sizes)
    if not sizes:
        return WindowScan(window_sizes=(), results=(),
                          fractions=() if disjoint else None)
    if len(trace) < max(sizes):
        raise TraceTooShort(
            f"trace has {len(trace)} samples, largest window is {max(sizes)}"
        )
    w = trace.uniform_size()
    delays = trace.delays()
    if offset is None:
        offset = float(delays.min())

    results = []
    fractions = [] if disjoint else None
    for size in sizes:
        results.append(gof_test(delays[:size], dist_kind, w,
                                significance=significance, offset=offset))
        if disjoint:
            accepted = [
                gof_test(delays[start:start + size], dist_kind, w,
                         significance=significance, offset=offset).accepted
                for start in range(0, len(delays) - size + 1, size)
            ]
            fractions.append(sum(accepted) / len(accepted))
    return WindowScan(window_sizes=sizes, results=tuple(results),
                      fractions=tuple(fractions) if disjoint else None)
