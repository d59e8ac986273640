"""Power curves and inversions: reported planning integers, round trips,
and monotonicity."""

import math

import numpy as np
import pytest

from predpower.calibration import BinaryMetrics, MomentSet, calibrate_binary
from predpower.errors import InfeasiblePlanError, UnattainablePowerError
from predpower.power import (
    classical_n,
    classical_power,
    paired_n,
    power_at_variance,
    ppi_pp_n,
    ppi_pp_power,
    regression_contrast_n,
    rule_of_thumb,
    two_by_two_n,
    two_sample_n,
    vanilla_ppi_n,
)
from predpower.statcore import DesignInputs, variance_threshold
from predpower.variance import (
    ContrastBlocks,
    SampleBudget,
    TwoByTwoSpec,
    optimal_variance,
)

D02 = DesignInputs(alpha=0.05, target_power=0.8, delta=0.2)
D03 = DesignInputs(alpha=0.05, target_power=0.8, delta=0.3)
M07 = MomentSet(1.0, 1.0, 0.7)


def random_moments(rng) -> MomentSet:
    var_y = rng.uniform(0.1, 4.0)
    var_f = rng.uniform(0.1, 4.0)
    rho = rng.uniform(-0.99, 0.99)
    return MomentSet(var_y, var_f, rho * math.sqrt(var_y * var_f))


class TestClassicalPower:
    def test_size_under_null(self):
        d = DesignInputs(alpha=0.05, target_power=0.8, delta=0.0)
        assert classical_power(50, 1.0, d) == pytest.approx(0.05, abs=1e-12)

    def test_direct_evaluation_at_planned_size(self):
        assert classical_power(197, 1.0, D02) == pytest.approx(0.8016, abs=5e-4)

    def test_saturates(self):
        assert classical_power(10**9, 1.0, D02) == pytest.approx(1.0, abs=1e-9)


class TestClassicalN:
    def test_one_sample_count(self):
        assert classical_n(1.0, D02) == 197

    def test_two_sample_summed_variance(self):
        assert classical_n(2.0, D03) == 175

    def test_paired_count(self):
        assert classical_n(1.0, D03) == 88

    def test_zero_effect(self):
        d = DesignInputs(alpha=0.05, target_power=0.8, delta=0.0)
        with pytest.raises(UnattainablePowerError):
            classical_n(1.0, d)


class TestPpiPpPower:
    def test_uninformative_equals_classical_exactly(self):
        m = MomentSet(1.0, 1.0, 0.0)
        for n in (10, 50, 200):
            b = SampleBudget(n, 500)
            assert ppi_pp_power(m, b, D02) == classical_power(n, 1.0, D02)

    def test_planned_cell_value(self):
        assert ppi_pp_power(M07, SampleBudget(102, 5000), D02) == pytest.approx(
            0.80, abs=5e-3
        )

    def test_size_under_null(self):
        d = DesignInputs(alpha=0.05, target_power=0.8, delta=0.0)
        assert ppi_pp_power(M07, SampleBudget(50, 500), d) == pytest.approx(
            0.05, abs=1e-12
        )


class TestPpiPpN:
    def test_reported_one_sample_plan(self):
        plan = ppi_pp_n(M07, 5000, D02)
        assert plan.n_star == 102
        assert plan.classical_n == 197
        assert plan.reduction_fraction == pytest.approx(0.482, abs=5e-4)
        assert not plan.pool_exhausted

    def test_uninformative_recovers_classical(self):
        plan = ppi_pp_n(MomentSet(1.0, 1.0, 0.0), 5000, D02)
        assert plan.n_star == 197

    def test_strong_predictor_small_pool(self):
        plan = ppi_pp_n(MomentSet(1.0, 1.0, 0.9), 500, D02)
        assert plan.n_star == 53

    def test_linear_scan_cross_check(self):
        # Independent inversion: scan n upward until the one-term
        # criterion holds.
        m = MomentSet(1.0, 1.0, 0.9)
        s2 = variance_threshold(D02)
        n = 1
        while optimal_variance(m, SampleBudget(n, 500)) > s2:
            n += 1
        assert ppi_pp_n(m, 500, D02).n_star == n

    def test_pool_exhaustion_flagged(self):
        plan = ppi_pp_n(MomentSet(1.0, 1.0, 0.2), 50, D02)
        assert plan.n_star > 50
        assert plan.pool_exhausted

    def test_zero_effect(self):
        d = DesignInputs(alpha=0.05, target_power=0.8, delta=0.0)
        with pytest.raises(UnattainablePowerError):
            ppi_pp_n(M07, 5000, d)

    def test_round_trip_integer_minimality(self):
        rng = np.random.default_rng(77)
        for _ in range(400):
            m = random_moments(rng)
            n_unl = int(rng.integers(10, 20000))
            delta = float(rng.uniform(0.05, 1.0)) * math.sqrt(m.var_y)
            d = DesignInputs(alpha=0.05, target_power=0.8, delta=delta)
            s2 = variance_threshold(d)
            plan = ppi_pp_n(m, n_unl, d)
            assert optimal_variance(m, SampleBudget(plan.n_star, n_unl)) <= s2
            if plan.n_star > 1:
                assert optimal_variance(m, SampleBudget(plan.n_star - 1, n_unl)) > s2
            assert plan.analytic_power_at_n >= d.target_power

    def test_monotonicity_in_inputs(self):
        base = ppi_pp_n(M07, 500, D02).n_star
        assert ppi_pp_n(MomentSet(1, 1, 0.9), 500, D02).n_star <= base
        assert ppi_pp_n(M07, 5000, D02).n_star <= base
        stronger = DesignInputs(alpha=0.05, target_power=0.8, delta=0.3)
        assert ppi_pp_n(M07, 500, stronger).n_star <= base


class TestVanillaPpiN:
    def test_reported_one_sample_plan(self):
        plan = vanilla_ppi_n(M07, 5000, D02)
        assert plan.n_star == 123
        assert plan.lambda_star == 1.0

    def test_reported_paired_plan(self):
        plan = vanilla_ppi_n(M07, 5000, D03)
        assert plan.n_star == 54

    def test_perfect_predictor_floors_at_one(self):
        m = MomentSet(1.0, 1.0, 1.0)  # var_eps = 0
        plan = vanilla_ppi_n(m, 5000, D02)
        assert plan.n_star == 1

    def test_infeasible_names_minimal_pool(self):
        m = MomentSet(1.0, 1.0, 0.7)
        small = DesignInputs(alpha=0.05, target_power=0.8, delta=0.02)
        with pytest.raises(InfeasiblePlanError) as err:
            vanilla_ppi_n(m, 100, small)
        n_min = err.value.min_n_unlabeled
        assert n_min is not None
        s2 = variance_threshold(small)
        assert m.var_f / n_min < s2 <= m.var_f / (n_min - 1)


class TestRuleOfThumb:
    def test_half(self):
        assert rule_of_thumb(0.5) == 0.5

    def test_uninformative(self):
        assert rule_of_thumb(0.0) == 1.0

    def test_strong(self):
        assert rule_of_thumb(0.9) == pytest.approx(0.1)


class TestTwoSampleN:
    def test_reported_plan(self):
        plan = two_sample_n(M07, M07, 5000, 5000, D03)
        assert plan.n_star == 91
        assert plan.n_star_b == 91
        assert plan.classical_n == 175

    def test_uninformative_recovers_classical(self):
        m0 = MomentSet(1.0, 1.0, 0.0)
        plan = two_sample_n(m0, m0, 5000, 5000, D03)
        assert plan.n_star == 175

    def test_vanilla_method(self):
        plan = two_sample_n(M07, M07, 5000, 5000, D03, method="vanilla")
        assert plan.n_star == 109
        assert plan.lambda_star == 1.0

    def test_one_perfect_group(self):
        perfect = MomentSet(1.0, 1.0, 1.0)
        blind = MomentSet(1.0, 1.0, 0.0)
        plan = two_sample_n(perfect, blind, 10**12, 10**12, D03)
        s2 = variance_threshold(D03)
        assert plan.n_star_b == math.ceil(1.0 / s2 - 1e-9)

    def test_unbalanced_allocation(self):
        plan = two_sample_n(M07, M07, 5000, 5000, D03, allocation=2.0)
        assert plan.n_star == pytest.approx(2 * plan.n_star_b, abs=1)
        balanced = two_sample_n(M07, M07, 5000, 5000, D03)
        # Unbalanced designs need more total labels than balanced ones.
        assert plan.n_star + plan.n_star_b >= balanced.n_star + balanced.n_star_b

    def test_integer_minimality_balanced(self):
        s2 = variance_threshold(D03)

        def total_var(n):
            b = SampleBudget(n, 5000)
            return 2 * optimal_variance(M07, b)

        plan = two_sample_n(M07, M07, 5000, 5000, D03)
        assert total_var(plan.n_star) <= s2
        assert total_var(plan.n_star - 1) > s2


class TestPairedN:
    def test_reported_plan(self):
        plan = paired_n(M07, 5000, D03)
        assert plan.n_star == 45

    def test_uninformative(self):
        assert paired_n(MomentSet(1, 1, 0.0), 5000, D03).n_star == 88

    def test_definitional_equality(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            m = random_moments(rng)
            n_unl = int(rng.integers(10, 5000))
            assert paired_n(m, n_unl, D03) == ppi_pp_n(m, n_unl, D03)


class TestTwoByTwoN:
    def test_classical_epi_oracle(self):
        # Independent reimplementation of the classical log-RR formula.
        za, zb = 1.959963984540054, 0.8416212335729143
        oracle = ((1 - 0.2) / 0.2 + (1 - 0.4) / 0.4) * (za + zb) ** 2 / math.log(
            0.4 / 0.2
        ) ** 2
        n0, n1 = two_by_two_n(TwoByTwoSpec(0.2, 0.4, 0.0, 0.0))
        assert n0 == math.ceil(oracle - 1e-9) == 90
        assert n1 == 90

    def test_classifier_calibration_composition(self):
        rho0 = calibrate_binary(BinaryMetrics(0.2, 0.9, 0.9)).rho
        rho1 = calibrate_binary(BinaryMetrics(0.4, 0.9, 0.9)).rho
        assert rho0**2 == pytest.approx(0.5325, abs=1e-3)
        assert rho1**2 == pytest.approx(0.6305, abs=1e-3)
        n0, n1 = two_by_two_n(TwoByTwoSpec(0.2, 0.4, rho0, rho1))
        assert (n0, n1) == (40, 40)

    def test_perfect_predictions_floor(self):
        n0, n1 = two_by_two_n(TwoByTwoSpec(0.2, 0.4, 1.0, 1.0))
        assert (n0, n1) == (1, 1)

    def test_allocation(self):
        n0, n1 = two_by_two_n(TwoByTwoSpec(0.2, 0.4, 0.0, 0.0, kappa=2.0))
        assert n1 == 2 * n0

    def test_zero_effect(self):
        with pytest.raises(UnattainablePowerError):
            two_by_two_n(TwoByTwoSpec(0.3, 0.3, 0.0, 0.0))

    def test_odds_ratio_measure(self):
        n0_rr, _ = two_by_two_n(TwoByTwoSpec(0.2, 0.4, 0.0, 0.0, measure="RR"))
        n0_or, _ = two_by_two_n(TwoByTwoSpec(0.2, 0.4, 0.0, 0.0, measure="OR"))
        assert n0_rr != n0_or  # different effect scales


class TestRegressionContrastN:
    def test_large_pool_cell(self):
        plan = regression_contrast_n(ContrastBlocks(2.0, 2.0, 1.4), math.inf, D03)
        assert plan.n_star == 89

    def test_linear_scan_cross_check(self):
        c = ContrastBlocks(2.0, 2.0, 1.4)
        s2 = variance_threshold(D03)
        n = 1
        while (2.0 - 1.4**2 / 2.0) / n > s2:
            n += 1
        assert regression_contrast_n(c, math.inf, D03).n_star == n

    def test_uninformative_blocks(self):
        plan = regression_contrast_n(ContrastBlocks(2.0, 2.0, 0.0), 500, D03)
        assert plan.n_star == plan.classical_n == math.ceil(2.0 / variance_threshold(D03) - 1e-9)

    def test_scalar_mean_reduction(self):
        rng = np.random.default_rng(19)
        for _ in range(100):
            m = random_moments(rng)
            n_unl = int(rng.integers(10, 5000))
            c = ContrastBlocks(m.var_y, m.var_f, m.cov_yf)
            delta = float(rng.uniform(0.1, 0.8)) * math.sqrt(m.var_y)
            d = DesignInputs(alpha=0.05, target_power=0.8, delta=delta)
            assert regression_contrast_n(c, n_unl, d).n_star == ppi_pp_n(m, n_unl, d).n_star


class TestRuleOfThumbConvergence:
    def test_planning_ratio_approaches_rule(self):
        # |n_ppi / n_cl - (1 - rho^2)| shrinks as the pool grows.
        for rho in (0.3, 0.5, 0.7, 0.9):
            m = MomentSet(1.0, 1.0, rho)
            n_cl = classical_n(1.0, D02)
            errs = []
            for n_unl in (200, 500, 1000, 5000):
                n_ppi = ppi_pp_n(m, n_unl, D02).n_star
                errs.append(abs(n_ppi / n_cl - rule_of_thumb(rho**2)))
            assert all(a > b for a, b in zip(errs, errs[1:]))


class TestPowerAtVariance:
    def test_zero_variance(self):
        assert power_at_variance(0.0, D02) == 1.0

    def test_curve_monotone_in_n(self):
        vals = [
            power_at_variance(optimal_variance(M07, SampleBudget(n, 500)), D02)
            for n in range(1, 400, 7)
        ]
        assert all(a <= b + 1e-15 for a, b in zip(vals, vals[1:]))
