import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given
from hypothesis import strategies as st

from combwalk import (
    InsufficientGrid,
    InvalidScale,
    NotComparable,
    Position,
    ShapeMismatch,
    chi_square_endpoint,
    exact_distribution,
    ks_two_sample,
    position_invariance_test,
    sample_horizontal_limit,
    scaling_exponent,
    validate_config,
)
from combwalk._fit import fit_loglog
from combwalk.lattice import direct_endpoints
from combwalk.limit_stats import (
    CHUNG_LIMINF_REFERENCE,
    X_LIMSUP_REFERENCE,
    Y_LIMSUP_REFERENCE,
    _lil_stats,
    chi_square_threshold,
    endpoint_counts,
    ks_critical_two_sample,
    lil_checkpoints,
    lil_series,
    sample_vertical_limit,
    summarize_endpoints,
)
from combwalk.rng import SeedSpec

float_samples = st.lists(st.floats(-100, 100), min_size=1, max_size=60)


class TestHorizontalLimitOracle:
    def test_variance_matches_conditioning_identity(self):
        # Var = run_weight * E|Z| = sqrt(2/pi) at run_weight 1, verified by
        # an independent nested-Gaussian brute force below
        samples = sample_horizontal_limit(1.0, 100_000, SeedSpec(5))
        assert samples.var() == pytest.approx(math.sqrt(2.0 / math.pi), abs=0.015)

    def test_nested_gaussian_brute_force(self):
        # independent oracle: numpy's own generator, direct construction
        rng = np.random.default_rng(12345)
        z1 = rng.standard_normal(200_000)
        z2 = rng.standard_normal(200_000)
        brute = np.sqrt(np.abs(z2)) * z1
        ours = sample_horizontal_limit(1.0, 200_000, SeedSpec(6))
        assert ks_two_sample(brute, ours) < 0.01

    def test_mean_zero_and_sign_symmetry(self):
        samples = sample_horizontal_limit(1.0, 100_000, SeedSpec(7))
        assert abs(samples.mean()) < 0.02
        positive_fraction = float(np.mean(samples > 0))
        assert abs(positive_fraction - 0.5) <= 3.0 * math.sqrt(0.25 / 100_000)

    def test_scale_equivariance(self):
        base = sample_horizontal_limit(1.0, 1000, SeedSpec(8))
        scaled = sample_horizontal_limit(4.0, 1000, SeedSpec(8))
        assert np.array_equal(scaled, 2.0 * base)

    def test_invalid_scale(self):
        with pytest.raises(InvalidScale):
            sample_horizontal_limit(0.0, 10, SeedSpec(0))
        with pytest.raises(InvalidScale):
            sample_horizontal_limit(-1.0, 10, SeedSpec(0))


class TestKsTwoSample:
    def test_identical_samples_give_zero(self):
        a = np.array([1.0, 2.0, 3.0, 4.0])
        assert ks_two_sample(a, a) == 0.0

    def test_disjoint_supports_near_one(self):
        a = sample_vertical_limit(2000, SeedSpec(1))
        b = sample_vertical_limit(2000, SeedSpec(2)) + 10.0
        assert ks_two_sample(a, b) > 0.99

    def test_null_below_asymptotic_critical(self):
        # two independent standard normal samples of size 1e4; critical
        # value at the 99th percentile is ~1.63*sqrt(2/m) ~ 0.023
        a = sample_vertical_limit(10_000, SeedSpec(3, 0))
        b = sample_vertical_limit(10_000, SeedSpec(3, 99))
        assert ks_two_sample(a, b) < 0.0243

    @given(float_samples, float_samples)
    def test_matches_scipy(self, a, b):
        ours = ks_two_sample(a, b)
        reference = scipy.stats.ks_2samp(a, b, method="asymp").statistic
        assert ours == pytest.approx(reference, abs=1e-12)

    def test_critical_value_formula(self):
        # m = n = 1e4 at level 0.99
        crit = ks_critical_two_sample(10_000, 10_000, 0.99)
        assert crit == pytest.approx(1.6276 * math.sqrt(2 / 10_000), abs=1e-4)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            ks_two_sample([], [1.0])


class TestChiSquareEndpoint:
    def test_exactly_proportional_counts_give_zero(self, comb):
        table = exact_distribution(comb, 1)
        counts = {pos: 25 for pos in table.entries}  # 100 paths, perfect fit
        stat, dof = chi_square_endpoint(counts, table)
        assert stat == pytest.approx(0.0, abs=1e-9)
        assert dof >= 1

    def test_sampler_null_passes(self, comb):
        table = exact_distribution(comb, 12)
        xy = direct_endpoints(comb, 12, SeedSpec(17), 100_000)
        stat, dof = chi_square_endpoint(endpoint_counts(xy), table)
        assert stat < chi_square_threshold(dof, 0.999)

    def test_corrupted_sampler_detected(self):
        # swap p with 1/2 - p in the sampler but not the reference table:
        # the fit must fail decisively (power check)
        honest = validate_config([(0, 0.1)])
        corrupted = validate_config([(0, 0.4)])
        table = exact_distribution(honest, 12)
        xy = direct_endpoints(corrupted, 12, SeedSpec(18), 100_000)
        stat, dof = chi_square_endpoint(endpoint_counts(xy), table)
        assert stat > chi_square_threshold(dof, 0.999)

    def test_support_mismatch_raises(self, comb):
        table = exact_distribution(comb, 2)
        counts = {Position(1, 0): 5, Position(0, 0): 95}  # odd parity: impossible
        with pytest.raises(ShapeMismatch):
            chi_square_endpoint(counts, table)

    def test_merging_respects_minimum_expected(self, comb):
        table = exact_distribution(comb, 8)
        xy = direct_endpoints(comb, 8, SeedSpec(19), 2000)
        stat, dof = chi_square_endpoint(endpoint_counts(xy), table)
        assert dof >= 1
        assert np.isfinite(stat)


class TestScalingExponent:
    def test_grid_validation(self, comb):
        with pytest.raises(InsufficientGrid):
            scaling_exponent(comb, [10, 100, 1000], 10, "y", SeedSpec(0))
        with pytest.raises(InsufficientGrid):
            scaling_exponent(comb, [10, 100, 1000, 5000], 10, "y", SeedSpec(0))
        with pytest.raises(ValueError):
            scaling_exponent(comb, [10, 100, 1000, 10000], 10, "z", SeedSpec(0))

    def test_doubling_values_preserves_slope(self):
        ns = [1000, 10_000, 100_000, 1_000_000]
        values = [3.1, 9.8, 31.0, 99.0]
        base = fit_loglog(ns, values)
        doubled = fit_loglog(ns, [2 * v for v in values])
        assert doubled.slope == pytest.approx(base.slope, rel=1e-12)


class TestLilSeries:
    def test_checkpoint_skipping(self):
        kept, skipped = lil_checkpoints(1000, growth=1.5)
        assert all(v >= 16 for v in kept)
        assert all(v < 16 for v in skipped)
        assert kept[-1] == 1000
        assert skipped  # growth 1.5 starts below 16

    def test_reference_constants(self, comb):
        series = lil_series(comb, 500, SeedSpec(9))
        assert series.references["x_limsup"] == pytest.approx(1.0434, abs=1e-4)
        assert series.references["y_limsup"] == 1.0
        assert series.references["chung_liminf"] == 1.0
        assert X_LIMSUP_REFERENCE == pytest.approx(2.0**1.25 / 3.0**0.75, rel=1e-15)
        assert Y_LIMSUP_REFERENCE == 1.0
        assert CHUNG_LIMINF_REFERENCE == 1.0

    def test_reflection_symmetry(self):
        # reflecting the trajectory negates the signed statistics and
        # leaves the |.|-based statistic unchanged
        chk = np.array([100, 1000])
        xy = np.array([[5, -8], [11, 20]])
        max_abs = np.array([9, 25])
        y1, x1, c1 = _lil_stats(chk, xy, max_abs, 1.0)
        y2, x2, c2 = _lil_stats(chk, -xy, max_abs, 1.0)
        assert np.allclose(y2, -y1)
        assert np.allclose(x2, -x1)
        assert np.allclose(c2, c1)

    def test_small_n_max_rejected(self):
        with pytest.raises(ValueError):
            lil_checkpoints(10)

    def test_series_shape(self, comb):
        series = lil_series(comb, 100_000, SeedSpec(10))
        n = len(series.checkpoints)
        assert series.y_stat.shape == (n,)
        assert series.x_stat.shape == (n,)
        assert series.chung_stat.shape == (n,)
        assert np.all(np.isfinite(series.y_stat))
        assert np.all(series.chung_stat >= 0)


class TestLimitBehaviorAtScale:
    def test_lil_running_max_sanity_band(self, comb):
        # per-path running max over checkpoints of |y_stat| at N = 1e7; the
        # limsup reference is 1 but log log convergence is glacial, so this
        # is a soft band frozen from the oracle run at this seed
        # (observed [0.529, 1.681] over 50 paths)
        from combwalk.limit_stats import lil_ensemble

        _, y_stat, _, _ = lil_ensemble(comb, 10_000_000, SeedSpec(0), 50)
        running_max = np.abs(y_stat).max(axis=1)
        assert float(running_max.min()) >= 0.35
        assert float(running_max.max()) <= 1.9

    def test_horizontal_oracle_matches_discretized_construction(self):
        # independent route to the horizontal limit: a long discrete walk
        # supplies its local time at zero as the clock, a second discrete
        # walk evaluated at that clock supplies the value (threshold frozen
        # from the oracle run: ks ~ 0.06 at M = 500 paths, grid 1e6)
        from combwalk.localtime import srw_path

        n = 1_000_000
        vals = np.empty(500)
        for i in range(500):
            clock_walk = srw_path(n, SeedSpec(0, 2 * i))
            zero_visits = int(np.count_nonzero(clock_walk[1:] == 0))
            value_walk = srw_path(zero_visits, SeedSpec(0, 2 * i + 1))
            vals[i] = value_walk[-1] / n**0.25
        oracle = sample_horizontal_limit(1.0, 100_000, SeedSpec(0, 7777))
        assert ks_two_sample(vals, oracle) < 0.09


class TestPositionInvariance:
    def test_not_comparable(self):
        a = validate_config([(0, 0.25)])
        b = validate_config([(0, 0.1)])
        with pytest.raises(NotComparable):
            position_invariance_test(a, b, 100, 10, SeedSpec(0))

    def test_same_config_null(self, comb):
        report = position_invariance_test(comb, comb, 10_000, 2000, SeedSpec(1))
        assert report.passed

    def test_shifted_line_small_n(self, comb):
        shifted = validate_config([(5, 0.25)])
        report = position_invariance_test(comb, shifted, 100_000, 2000, SeedSpec(2))
        assert report.critical == pytest.approx(
            ks_critical_two_sample(2000, 2000, 0.99), rel=1e-12
        )
        assert report.passed


class TestEnsembleSummary:
    def test_scaled_vertical_second_moment_near_one(self, comb):
        summary = summarize_endpoints(comb, 100_000, SeedSpec(3), 2000)
        assert summary.moments["scaled_y"]["variance"] == pytest.approx(1.0, abs=0.08)
        assert summary.n_paths == 2000
        assert summary.x.shape == (2000,)
        assert list(summary.quantiles) == ["scaled_x", "scaled_y"]

    def test_quantiles_monotone(self, comb):
        summary = summarize_endpoints(comb, 10_000, SeedSpec(4), 500)
        for arr in summary.quantiles.values():
            assert np.all(np.diff(arr) >= 0)
