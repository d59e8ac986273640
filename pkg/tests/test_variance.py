"""Variance-engine formulas: identities, minimality, and oracle values."""

import math

import numpy as np
import pytest

from predpower.calibration import MomentSet
from predpower.errors import DegenerateMomentsError, DegenerateMomentsWarning, DomainError
from predpower.variance import (
    ContrastBlocks,
    SampleBudget,
    TwoByTwoSpec,
    TwoGroupMoments,
    contrast_lambda_star,
    contrast_optimal_variance,
    contrast_variance,
    lambda_star,
    log_or_variance,
    log_rr_variance,
    optimal_variance,
    paired_variance,
    ppi_pp_variance,
    two_sample_variance,
)


def random_moments(rng) -> MomentSet:
    var_y = rng.uniform(0.1, 4.0)
    var_f = rng.uniform(0.1, 4.0)
    rho = rng.uniform(-0.99, 0.99)
    return MomentSet(var_y, var_f, rho * math.sqrt(var_y * var_f))


class TestppiPpVariance:
    def test_lambda_zero_is_classical(self):
        m = MomentSet(1.3, 0.9, 0.5)
        b = SampleBudget(50, 400)
        assert ppi_pp_variance(m, b, 0.0) == m.var_y / 50

    def test_lambda_one_identity(self):
        # At unit weight the quadratic equals var_f/N + var_eps/n exactly.
        rng = np.random.default_rng(42)
        for _ in range(500):
            m = random_moments(rng)
            b = SampleBudget(int(rng.integers(2, 500)), int(rng.integers(2, 5000)))
            lhs = ppi_pp_variance(m, b, 1.0)
            rhs = m.var_f / b.n_unlabeled + m.var_eps / b.n
            assert lhs == pytest.approx(rhs, abs=1e-12, rel=1e-12)

    def test_direct_scalar_evaluation(self):
        m = MomentSet(1.0, 1.0, 0.7)
        b = SampleBudget(100, 500)
        expected = 1 / 100 + 0.58**2 * (1 / 500 + 1 / 100) - 2 * 0.58 * 0.7 / 100
        assert ppi_pp_variance(m, b, 0.58) == pytest.approx(expected, abs=1e-15)
        assert expected == pytest.approx(0.0059168, abs=1e-7)


class TestLambdaStar:
    def test_zero_correlation(self):
        m = MomentSet(1.0, 1.0, 0.0)
        assert lambda_star(m, SampleBudget(50, 500)) == 0.0

    def test_direct_evaluation(self):
        m = MomentSet(1.0, 1.0, 0.7)
        b = SampleBudget(50, 5000)
        assert lambda_star(m, b) == pytest.approx(0.7 / 1.01, abs=1e-12)

    def test_unbounded_pool_limit(self):
        m = MomentSet(1.0, 2.0, 0.7)
        assert lambda_star(m, SampleBudget(50, math.inf)) == pytest.approx(0.35)

    def test_zero_prediction_variance_warns(self):
        m = MomentSet(1.0, 0.0, 0.0)
        with pytest.warns(DegenerateMomentsWarning):
            assert lambda_star(m, SampleBudget(50, 500)) == 0.0

    def test_minimizes_quadratic(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            m = random_moments(rng)
            b = SampleBudget(int(rng.integers(2, 300)), int(rng.integers(2, 3000)))
            star = lambda_star(m, b)
            base = ppi_pp_variance(m, b, star)
            for eps in (-0.1, -0.01, 0.01, 0.1):
                assert ppi_pp_variance(m, b, star + eps) >= base


class TestOptimalVariance:
    def test_zero_correlation_is_classical(self):
        m = MomentSet(1.7, 1.0, 0.0)
        b = SampleBudget(40, 200)
        assert optimal_variance(m, b) == m.var_y / 40

    def test_equals_quadratic_at_star(self):
        rng = np.random.default_rng(8)
        for _ in range(500):
            m = random_moments(rng)
            b = SampleBudget(int(rng.integers(2, 300)), int(rng.integers(2, 3000)))
            lhs = optimal_variance(m, b)
            rhs = ppi_pp_variance(m, b, lambda_star(m, b))
            assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_never_exceeds_classical(self):
        rng = np.random.default_rng(9)
        for _ in range(500):
            m = random_moments(rng)
            b = SampleBudget(int(rng.integers(2, 300)), int(rng.integers(2, 3000)))
            assert optimal_variance(m, b) <= m.var_y / b.n + 1e-15
            if abs(m.cov_yf) > 1e-9:
                assert optimal_variance(m, b) < m.var_y / b.n

    def test_large_pool_limit(self):
        m = MomentSet(1.0, 1.0, 0.7)
        var_large = optimal_variance(m, SampleBudget(100, 10**9))
        assert var_large == pytest.approx(1.0 * (1 - 0.49) / 100, rel=1e-6)

    def test_consistency_with_planning_threshold(self):
        # At the planned one-sample size the optimal variance sits just
        # under the variance threshold for delta = 0.2.
        m = MomentSet(1.0, 1.0, 0.7)
        assert optimal_variance(m, SampleBudget(102, 5000)) == pytest.approx(
            0.005096, abs=1e-5
        )

    def test_monotone_in_n_and_pool(self):
        m = MomentSet(1.0, 1.0, 0.6)
        vals_n = [optimal_variance(m, SampleBudget(n, 500)) for n in (10, 20, 40, 80)]
        assert all(a > b for a, b in zip(vals_n, vals_n[1:]))
        vals_pool = [
            optimal_variance(m, SampleBudget(50, N)) for N in (50, 200, 1000, 10000)
        ]
        assert all(a > b for a, b in zip(vals_pool, vals_pool[1:]))

    def test_degenerate_predictions_fall_back(self):
        m = MomentSet(1.5, 0.0, 0.0)
        assert optimal_variance(m, SampleBudget(30, 300)) == 1.5 / 30


class TestTwoSampleVariance:
    def test_uninformative_groups(self):
        m = MomentSet(1.0, 1.0, 0.0)
        t = TwoGroupMoments(m, m, SampleBudget(50, 500), SampleBudget(50, 500))
        assert two_sample_variance(t) == pytest.approx(2.0 / 50)

    def test_symmetric_additivity(self):
        m = MomentSet(1.0, 1.0, 0.7)
        b = SampleBudget(91, 5000)
        t = TwoGroupMoments(m, m, b, b)
        assert two_sample_variance(t) == 2 * optimal_variance(m, b)

    def test_consistency_with_planning_threshold(self):
        m = MomentSet(1.0, 1.0, 0.7)
        b = SampleBudget(91, 5000)
        t = TwoGroupMoments(m, m, b, b)
        assert two_sample_variance(t) == pytest.approx(0.011467, abs=1e-4)


class TestPairedVariance:
    def test_uninformative(self):
        m = MomentSet(2.0, 1.0, 0.0)
        assert paired_variance(m, SampleBudget(30, 300)) == 2.0 / 30

    def test_identical_to_one_sample_path(self):
        rng = np.random.default_rng(10)
        for _ in range(200):
            m = random_moments(rng)
            b = SampleBudget(int(rng.integers(2, 200)), int(rng.integers(2, 2000)))
            assert paired_variance(m, b) == optimal_variance(m, b)

    def test_consistency_with_planning_threshold(self):
        m = MomentSet(1.0, 1.0, 0.7)
        assert paired_variance(m, SampleBudget(45, 5000)) == pytest.approx(
            0.011467, abs=1e-4
        )


class TestTwoByTwoVariances:
    def test_balanced_uninformative_or(self):
        s = TwoByTwoSpec(p0=0.5, p1=0.5, rho0=0.0, rho1=0.0, measure="OR")
        assert log_or_variance(s, 100) == pytest.approx(0.08, abs=1e-12)

    def test_perfect_predictions(self):
        s = TwoByTwoSpec(p0=0.2, p1=0.4, rho0=1.0, rho1=1.0)
        assert log_rr_variance(s, 50) == 0.0
        assert log_or_variance(s, 50) == 0.0

    def test_classical_epi_oracle(self):
        # rho = 0 recovers (1-p0)/(n0 p0) + (1-p1)/(n1 p1).
        s = TwoByTwoSpec(p0=0.2, p1=0.4, rho0=0.0, rho1=0.0)
        oracle = (1 - 0.2) / (90 * 0.2) + (1 - 0.4) / (90 * 0.4)
        assert log_rr_variance(s, 90) == pytest.approx(oracle, abs=1e-12)
        assert log_rr_variance(s, 90) == pytest.approx(0.0611, abs=1e-4)

    def test_allocation_ratio(self):
        s = TwoByTwoSpec(p0=0.2, p1=0.4, rho0=0.0, rho1=0.0, kappa=2.0)
        expected = ((1 - 0.2) / 0.2 + 0.5 * (1 - 0.4) / 0.4) / 60
        assert log_rr_variance(s, 60) == pytest.approx(expected, abs=1e-12)

    def test_degenerate_probability_rejected(self):
        with pytest.raises(DegenerateMomentsError):
            TwoByTwoSpec(p0=0.0, p1=0.4, rho0=0.0, rho1=0.0)


class TestContrastVariance:
    def test_lambda_zero(self):
        c = ContrastBlocks(2.0, 2.0, 1.0)
        assert contrast_variance(c, SampleBudget(50, 500), 0.0) == 2.0 / 50

    def test_scalar_mean_reduction(self):
        # Blocks set from a scalar mean problem reproduce the mean quadratic.
        rng = np.random.default_rng(12)
        for _ in range(300):
            m = random_moments(rng)
            b = SampleBudget(int(rng.integers(2, 200)), int(rng.integers(2, 2000)))
            c = ContrastBlocks(m.var_y, m.var_f, m.cov_yf)
            lam = float(rng.uniform(-1, 2))
            assert contrast_variance(c, b, lam) == pytest.approx(
                ppi_pp_variance(m, b, lam), rel=1e-12, abs=1e-15
            )
            assert contrast_lambda_star(c, b) == pytest.approx(
                lambda_star(m, b), rel=1e-12, abs=1e-15
            )

    def test_regression_cell_value(self):
        c = ContrastBlocks(2.0, 2.0, 1.4)
        b = SampleBudget(89, 10**12)
        assert contrast_optimal_variance(c, b) == pytest.approx(
            2 * 0.51 / 89, rel=1e-6
        )

    def test_correlated_blocks_shape(self):
        # The regression validation cells use v_yy = v_ff = 2, v_yf = 2 rho.
        for rho in (0.5, 0.7, 0.9):
            c = ContrastBlocks(2.0, 2.0, 2.0 * rho)
            b = SampleBudget(100, math.inf)
            assert contrast_optimal_variance(c, b) == pytest.approx(
                2 * (1 - rho**2) / 100, rel=1e-12
            )

    def test_zero_prediction_block(self):
        c = ContrastBlocks(2.0, 0.0, 0.0)
        b = SampleBudget(50, 500)
        with pytest.warns(DegenerateMomentsWarning):
            assert contrast_lambda_star(c, b) == 0.0
        assert contrast_optimal_variance(c, b) == 2.0 / 50

    def test_cauchy_schwarz_enforced(self):
        with pytest.raises(DomainError):
            ContrastBlocks(1.0, 1.0, 1.5)
