"""Empirical CDF, Pearson correlation, chi-square machinery, window scan."""

import math

import numpy as np
import pytest
from scipy.stats import chi2 as scipy_chi2

from netdelay.dist import DelayDistribution, DistKind
from netdelay.errors import (
    DegenerateVariance,
    EmptyTrace,
    InvalidProbability,
    NonPositiveScale,
    TooFewSamples,
    TraceTooShort,
    ZeroExpected,
)
from netdelay.model import PathParameters
from netdelay.stats import (
    DEFAULT_WINDOW_SIZES,
    EmpiricalCdf,
    GofResult,
    _pearson,
    chi_square_quantile,
    chi_square_statistic,
    empirical_cdf,
    gof_test,
    pearson_correlation,
    sturges_cells,
    window_scan,
)
from tests.conftest import make_trace


class TestEmpiricalCdf:
    def test_counting_examples(self):
        e = empirical_cdf(make_trace([0.001, 0.002, 0.003]))
        assert e(0.002) == pytest.approx(2 / 3)
        assert e(0.0005) == 0.0
        assert e(0.003) == 1.0
        assert e(99.0) == 1.0

    def test_empty_trace(self):
        with pytest.raises(EmptyTrace):
            empirical_cdf(make_trace([]))

    def test_step_properties(self, rng):
        values = rng.exponential(1.0, size=200)
        e = EmpiricalCdf.from_values(values)
        grid = np.linspace(0, values.max() * 1.1, 500)
        fs = e(grid)
        assert (np.diff(fs) >= 0).all()
        steps = np.round(fs * e.n)
        assert np.allclose(fs * e.n, steps)  # range is {0, 1/n, ..., 1}

    def test_tie_handling(self):
        e = EmpiricalCdf.from_values([1.0, 1.0, 2.0, 3.0])
        assert e(1.0) == 0.5
        assert list(e.values_at_samples()) == [0.5, 0.5, 0.75, 1.0]

    def test_clamp_option_for_variable_components(self):
        e = EmpiricalCdf.from_values([-0.001, 0.002], clamp_negative_to_zero=True)
        assert e.sorted_delays.min() == 0.0


class TestPearson:
    def test_perfect_linear_relation(self):
        x = np.array([0.1, 0.4, 0.7, 1.0])
        assert _pearson(x, x) == pytest.approx(1.0, abs=1e-15)
        assert _pearson(x, 3.0 * x + 0.2) == pytest.approx(1.0, abs=1e-12)

    def test_symmetry_and_affine_invariance(self, rng):
        x, y = rng.uniform(size=50), rng.uniform(size=50)
        r = _pearson(x, y)
        assert _pearson(y, x) == pytest.approx(r, abs=1e-12)
        assert _pearson(2.5 * x + 1.0, y) == pytest.approx(r, abs=1e-12)

    def test_monte_carlo_exponential(self, rng, params):
        offset = params.d_min + 100 / params.capacity
        delays = offset + rng.exponential(params.sigma, size=10000)
        e = EmpiricalCdf.from_values(delays)
        r = pearson_correlation(e, DelayDistribution(DistKind.EXPONENTIAL, params),
                                100)
        assert r >= 0.99

    def test_degenerate_variance(self, params):
        # a huge-sigma model is flat (~0) at every sample point
        flat = PathParameters.create(d_min=0.009, capacity=math.inf, sigma=1e200,
                                     packet_size_ref=100)
        e = EmpiricalCdf.from_values([0.010, 0.011, 0.012, 0.013])
        with pytest.raises(DegenerateVariance):
            pearson_correlation(e, DelayDistribution(DistKind.EXPONENTIAL, flat),
                                100)

    def test_needs_three_distinct(self, params):
        e = EmpiricalCdf.from_values([0.01, 0.01, 0.02])
        with pytest.raises(TooFewSamples):
            pearson_correlation(e, DelayDistribution(DistKind.EXPONENTIAL, params),
                                100)


class TestSturges:
    @pytest.mark.parametrize("n,cells", [(100, 17), (500, 22), (250, 20)])
    def test_published_values(self, n, cells):
        assert sturges_cells(n) == cells

    def test_too_few(self):
        with pytest.raises(TooFewSamples):
            sturges_cells(9)
        assert sturges_cells(10) >= 2


class TestChiSquareQuantile:
    @pytest.mark.parametrize("df,expected", [
        (13, 22.36), (16, 26.30), (18, 28.87), (19, 30.14),
        (21, 32.67), (23, 35.17), (26, 38.89),
    ])
    def test_published_thresholds(self, df, expected):
        assert abs(chi_square_quantile(df, 0.95) - expected) <= 0.01

    def test_against_scipy(self):
        for df in (1, 2, 5, 13, 30, 100):
            for p in (0.01, 0.25, 0.5, 0.9, 0.95, 0.999):
                assert chi_square_quantile(df, p) == pytest.approx(
                    scipy_chi2.ppf(p, df), abs=1e-5)

    def test_invalid_inputs(self):
        with pytest.raises(InvalidProbability):
            chi_square_quantile(10, 0.0)
        with pytest.raises(InvalidProbability):
            chi_square_quantile(10, 1.0)
        with pytest.raises(ValueError):
            chi_square_quantile(0, 0.95)


class TestChiSquareStatistic:
    def exp_dist(self, sigma=0.002, d_min=0.009):
        p = PathParameters.create(d_min=d_min, capacity=math.inf, sigma=sigma,
                                  packet_size_ref=100)
        return DelayDistribution(DistKind.EXPONENTIAL, p)

    def test_perfect_fit_is_zero(self):
        # place 5 observations inside each quartile cell: observed == expected
        dist = self.exp_dist()
        p = dist.params
        window = []
        for k in range(4):
            lo = p.d_min - p.sigma * math.log1p(-(k / 4))
            hi = p.d_min - p.sigma * math.log1p(-((k + 1) / 4)) if k < 3 else lo + 4 * p.sigma
            window += list(np.linspace(lo, hi, 7)[1:6])
        t = chi_square_statistic(window, dist, 100, 4)
        assert t == pytest.approx(0.0, abs=1e-18)

    def test_positive_when_cells_imbalanced(self):
        dist = self.exp_dist()
        window = dist.params.d_min + np.full(40, 1e-6)  # all mass in cell 0
        t = chi_square_statistic(window, dist, 100, 4)
        assert t == pytest.approx(40 * 3.0, rel=1e-9)  # (40-10)^2/10*1 + 3*10

    def test_expected_counts_sum_to_n(self, rng):
        dist = self.exp_dist()
        window = dist.params.d_min + rng.exponential(0.002, 123)
        # reconstruct expected cells the way the statistic does
        from netdelay.dist import cdf as dist_cdf
        from netdelay.stats import _cell_edges
        edges = _cell_edges(dist, 100, 17)
        fs = [0.0] + [dist_cdf(dist, float(e), 100) for e in edges[1:]] + [1.0]
        expected = 123 * np.diff(fs)
        assert expected.sum() == pytest.approx(123, rel=1e-9)

    def test_monte_carlo_true_model(self, params):
        # threshold 30.14 is the published 0.95 cut at 20 cells (df 19)
        offset = params.d_min + 100 / params.capacity
        below = 0
        for seed in range(100):
            r = np.random.default_rng(seed)
            window = offset + r.exponential(params.sigma, 250)
            fitted = PathParameters(
                d_min=float(window.min()), capacity=math.inf,
                sigma=float(window.mean() - window.min()),
                d_av=float(window.mean()), packet_size_ref=100)
            t = chi_square_statistic(
                window, DelayDistribution(DistKind.EXPONENTIAL, fitted), 100, 20)
            below += t < 30.14
        assert below >= 90

    def test_monte_carlo_wrong_model_rejected(self, params):
        # half-normal data tested against an exponential fit. Note: this
        # direction has limited power at N=250 (asymptotic noncentrality
        # ~19.8 against the 30.14 cut -> ~75% rejection); the reverse
        # direction (exponential data, half-normal hypothesis) is the strong
        # one and is asserted at >=90% elsewhere.
        offset = params.d_min + 100 / params.capacity
        above = 0
        ts = []
        for seed in range(100):
            r = np.random.default_rng(seed)
            window = offset + np.abs(r.normal(0.0, 0.002, 250))
            fitted = PathParameters(
                d_min=float(window.min()), capacity=math.inf,
                sigma=float(window.mean() - window.min()),
                d_av=float(window.mean()), packet_size_ref=100)
            t = chi_square_statistic(
                window, DelayDistribution(DistKind.EXPONENTIAL, fitted), 100, 20)
            ts.append(t)
            above += t > 30.14
        assert above >= 60
        assert np.median(ts) > 30.14

    def test_zero_expected_guard(self):
        # picosecond sigma collapses the bisected half-normal edges
        p = PathParameters.create(d_min=0.009, capacity=math.inf, sigma=1e-12,
                                  packet_size_ref=100)
        dist = DelayDistribution(DistKind.TRUNCATED_NORMAL, p)
        window = 0.009 + np.abs(np.random.default_rng(0).normal(0, 1e-12, 50))
        with pytest.raises(ZeroExpected):
            chi_square_statistic(window, dist, 100, 10)

    def test_window_shorter_than_cells(self):
        dist = self.exp_dist()
        with pytest.raises(TooFewSamples):
            chi_square_statistic([0.01, 0.011], dist, 100, 4)


class TestGofTest:
    def test_result_invariants(self, rng, params):
        offset = params.d_min + 100 / params.capacity
        window = offset + rng.exponential(params.sigma, 250)
        res = gof_test(window, DistKind.EXPONENTIAL, 100)
        assert res.n_samples == 250
        assert res.n_cells == 20
        assert res.accepted == (res.statistic < res.threshold)
        assert res.threshold == pytest.approx(30.14, abs=0.01)

    def test_monte_carlo_acceptance(self):
        accepted = 0
        for seed in range(100):
            r = np.random.default_rng(seed)
            window = 0.0108 + r.exponential(0.002, 250)
            accepted += gof_test(window, DistKind.EXPONENTIAL, 100).accepted
        assert accepted >= 90

    def test_drifting_rate_rejected(self):
        # rate drifts by 3x across the window: stable first half, tripled
        # second half
        rejected = 0
        for seed in range(100):
            r = np.random.default_rng(seed)
            scale = np.where(np.arange(2000) < 1000, 0.002, 0.002 / 3.0)
            window = 0.0108 + r.exponential(scale)
            rejected += not gof_test(window, DistKind.EXPONENTIAL, 100).accepted
        assert rejected >= 90

    def test_wrong_hypothesis_rejected(self):
        rejected = 0
        for seed in range(100):
            r = np.random.default_rng(seed)
            window = 0.0108 + r.exponential(0.002, 250)
            rejected += not gof_test(window, DistKind.TRUNCATED_NORMAL, 100).accepted
        assert rejected >= 90

    def test_unit_rescaling_leaves_t_invariant(self, rng):
        window = 0.0108 + rng.exponential(0.002, 250)
        t_s = gof_test(window, DistKind.EXPONENTIAL, 100).statistic
        t_ms = gof_test(window * 1e3, DistKind.EXPONENTIAL, 100).statistic
        assert t_ms == pytest.approx(t_s, rel=1e-9)

    def test_nonpositive_scale(self):
        with pytest.raises(NonPositiveScale):
            gof_test(np.full(50, 0.01), DistKind.EXPONENTIAL, 100)

    def test_short_window(self):
        with pytest.raises(TooFewSamples):
            gof_test([0.01, 0.02, 0.03], DistKind.EXPONENTIAL, 100)


class TestWindowScan:
    def stationary_trace(self, seed, n=2000):
        # drawn from the package's own pinned stream so per-seed outcomes are
        # frozen across platforms and library versions
        from netdelay.generate import GeneratorConfig, generate_uniform_stream
        params = PathParameters.create(d_min=0.0108, capacity=math.inf,
                                       lam=500.0, packet_size_ref=100)
        return generate_uniform_stream(GeneratorConfig(params, seed, 100),
                                       count=n, size=100)

    def test_default_sizes_shape(self):
        scan = window_scan(self.stationary_trace(1))
        assert scan.window_sizes == DEFAULT_WINDOW_SIZES
        assert len(scan.results) == 7
        assert [r.n_samples for r in scan.results] == list(DEFAULT_WINDOW_SIZES)

    def test_empty_scan(self):
        scan = window_scan(self.stationary_trace(1), window_sizes=())
        assert scan.window_sizes == () and scan.results == ()

    def test_stationary_trace_accepted_across_sizes(self):
        per_size = {s: 0 for s in DEFAULT_WINDOW_SIZES}
        seeds = 30
        for seed in range(seeds):
            scan = window_scan(self.stationary_trace(seed))
            for r in scan.results:
                per_size[r.n_samples] += r.accepted
        for size, count in per_size.items():
            assert count >= 0.9 * seeds, f"size {size}: {count}/{seeds}"

    def test_too_short(self):
        with pytest.raises(TraceTooShort):
            window_scan(self.stationary_trace(1, n=100), window_sizes=(50, 200))

    def test_disjoint_mode_fractions(self):
        scan = window_scan(self.stationary_trace(3, n=500),
                           window_sizes=(50, 100), disjoint=True)
        assert len(scan.fractions) == 2
        assert all(0.0 <= f <= 1.0 for f in scan.fractions)

    def test_deterministic(self):
        t = self.stationary_trace(5)
        a = window_scan(t)
        b = window_scan(t)
        assert [r.statistic for r in a.results] == [r.statistic for r in b.results]


def test_gofresult_validation():
    with pytest.raises(ValueError):
        GofResult(n_samples=50, n_cells=1, statistic=1.0, threshold=2.0,
                  accepted=True, dist_kind=DistKind.EXPONENTIAL)
    with pytest.raises(ValueError):
        GofResult(n_samples=50, n_cells=5, statistic=3.0, threshold=2.0,
                  accepted=True, dist_kind=DistKind.EXPONENTIAL)
