"""Data-generating processes: moment fidelity and determinism."""

import math

import numpy as np
import pytest
from scipy.stats import multivariate_normal

from predpower.sim.generators import (
    bvn_cdf,
    generate,
    latent_corr_for_binary,
    paired_binary_diff_moments,
    paired_cont_cov4,
)


def rng_for(seed=0):
    return np.random.default_rng(seed)


class TestContinuousGeneration:
    def test_bivariate_moments(self):
        cell = {"n": 4000, "N": 10, "rho": 0.7, "delta": 0.2}
        data = generate("one_sample_cont", cell, rng_for(3))
        n = len(data.y)
        corr = np.corrcoef(data.y, data.f)[0, 1]
        assert abs(corr - 0.7) < 4 / math.sqrt(n)
        assert abs(data.y.mean() - 0.2) < 4 / math.sqrt(n)
        assert abs(data.y.var(ddof=1) - 1.0) < 6 / math.sqrt(n)

    def test_lognormal_standardization(self):
        cell = {"n": 60000, "N": 10, "rho": 0.5, "delta": 0.0, "dist": "lognormal"}
        data = generate("one_sample_cont", cell, rng_for(4))
        n = len(data.y)
        # Log-normal sampling noise is heavy; variance tolerance is wide.
        assert abs(data.y.mean()) < 4 / math.sqrt(n) * 1.0
        assert abs(data.y.var(ddof=1) - 1.0) < 0.1

    def test_t5_standardization(self):
        cell = {"n": 60000, "N": 10, "rho": 0.5, "delta": 0.0, "dist": "t5"}
        data = generate("one_sample_cont", cell, rng_for(5))
        assert abs(data.y.var(ddof=1) - 1.0) < 0.05
        corr = np.corrcoef(data.y, data.f)[0, 1]
        assert abs(corr - 0.5) < 0.02

    def test_determinism(self):
        cell = {"n": 50, "N": 100, "rho": 0.7, "delta": 0.2}
        d1 = generate("one_sample_cont", cell, rng_for(11))
        d2 = generate("one_sample_cont", cell, rng_for(11))
        assert np.array_equal(d1.y, d2.y)
        assert np.array_equal(d1.f_unlabeled, d2.f_unlabeled)


class TestBinaryGeneration:
    def test_perfect_classifier_matches_outcome(self):
        cell = {"n": 500, "N": 200, "p": 0.3, "delta": 0.0, "se": 1.0, "sp": 1.0}
        data = generate("one_sample_bin", cell, rng_for(6))
        assert np.array_equal(data.y, data.f)

    def test_prevalence_shift(self):
        cell = {"n": 40000, "N": 10, "p": 0.3, "delta": 0.05, "accuracy": 0.85}
        data = generate("one_sample_bin", cell, rng_for(7))
        assert abs(data.y.mean() - 0.35) < 4 * math.sqrt(0.35 * 0.65 / 40000)

    def test_sens_spec_conditional_law(self):
        cell = {"n": 50000, "N": 10, "p": 0.3, "delta": 0.0, "se": 0.9, "sp": 0.8}
        data = generate("one_sample_bin", cell, rng_for(8))
        ones = data.y == 1.0
        se_hat = data.f[ones].mean()
        sp_hat = 1.0 - data.f[~ones].mean()
        assert abs(se_hat - 0.9) < 0.02
        assert abs(sp_hat - 0.8) < 0.02


class TestBvnCdf:
    def test_against_scipy(self):
        for rho in (-0.8, -0.3, 0.0, 0.25, 0.6, 0.95):
            for h, k in [(-1.2, 0.4), (0.8, 0.8), (-0.5, -1.5), (2.0, -0.3)]:
                ref = multivariate_normal(
                    mean=[0, 0], cov=[[1, rho], [rho, 1]]
                ).cdf([h, k])
                assert bvn_cdf(h, k, rho) == pytest.approx(float(ref), abs=5e-7)

    def test_extreme_correlations(self):
        assert bvn_cdf(0.5, 1.5, 1.0) == pytest.approx(
            0.6914624612740131, abs=1e-12
        )
        assert bvn_cdf(0.5, -0.5, -1.0) == pytest.approx(0.0, abs=1e-12)


class TestLatentCorr:
    def test_solves_target_binary_correlation(self):
        zeta = latent_corr_for_binary(0.38, 0.3, 0.3)
        # Verify by computing the implied binary correlation exactly.
        from predpower.statcore import normal_quantile

        h_a, h_b = normal_quantile(0.38), normal_quantile(0.3)
        p11 = bvn_cdf(h_a, h_b, zeta)
        corr = (p11 - 0.38 * 0.3) / math.sqrt(0.38 * 0.62 * 0.3 * 0.7)
        assert corr == pytest.approx(0.3, abs=1e-9)


class TestPairedContinuous:
    def test_cov4_structure(self):
        cov = paired_cont_cov4(0.7, 0.3)
        evals = np.linalg.eigvalsh(cov)
        assert evals.min() > 0
        # Difference moments implied by the construction.
        contrast_d = np.array([1.0, -1.0, 0.0, 0.0])
        contrast_g = np.array([0.0, 0.0, 1.0, -1.0])
        var_d = contrast_d @ cov @ contrast_d
        var_g = contrast_g @ cov @ contrast_g
        cov_dg = contrast_d @ cov @ contrast_g
        assert var_d == pytest.approx(1.4)
        assert cov_dg / math.sqrt(var_d * var_g) == pytest.approx(0.7)

    def test_sample_moments_match(self):
        cell = {"n": 40000, "N": 10, "rho": 0.7, "delta": 0.3, "pair_corr": 0.3}
        data = generate("paired_cont", cell, rng_for(9))
        assert abs(data.y.mean() - 0.3) < 0.03
        assert abs(data.y.var(ddof=1) - 1.4) < 0.06
        corr = np.corrcoef(data.y, data.f)[0, 1]
        assert abs(corr - 0.7) < 0.02


class TestPairedBinary:
    def test_exact_moments_match_simulation(self):
        p_a, p_b, se, sp, target = 0.38, 0.3, 0.85, 0.85, 0.3
        zeta = latent_corr_for_binary(p_a, p_b, target)
        m = paired_binary_diff_moments(p_a, p_b, se, sp, zeta)
        cell = {
            "n": 60000,
            "N": 10,
            "p": 0.3,
            "delta": 0.08,
            "se": se,
            "sp": sp,
            "pair_corr": target,
        }
        data = generate("paired_bin", cell, rng_for(10))
        assert data.y.var(ddof=1) == pytest.approx(m.var_y, abs=0.02)
        assert data.f.var(ddof=1) == pytest.approx(m.var_f, abs=0.02)
        cov_hat = np.cov(data.y, data.f, ddof=1)[0, 1]
        assert cov_hat == pytest.approx(m.cov_yf, abs=0.02)

    def test_perfect_predictions_give_identical_differences(self):
        cell = {
            "n": 2000,
            "N": 100,
            "p": 0.3,
            "delta": 0.08,
            "se": 1.0,
            "sp": 1.0,
            "pair_corr": 0.3,
        }
        data = generate("paired_bin", cell, rng_for(12))
        assert np.array_equal(data.y, data.f)


class TestRegressionGeneration:
    def test_ols_score_moments(self):
        cell = {"n": 50000, "N": 10, "rho": 0.6, "delta": 0.3}
        data = generate("ols_contrast", cell, rng_for(13))
        resid_y = data.y - data.x @ np.array([0.3, 0.0])
        resid_f = data.f - data.x @ np.array([0.3, 0.0])
        assert resid_y.var(ddof=1) == pytest.approx(1.0, abs=0.03)
        assert np.corrcoef(resid_y, resid_f)[0, 1] == pytest.approx(0.6, abs=0.02)

    def test_logistic_law(self):
        cell = {"n": 80000, "N": 10, "accuracy": 0.9, "delta": 0.5}
        data = generate("logistic_contrast", cell, rng_for(14))
        from scipy.special import expit

        mu = expit(data.x @ np.array([0.5, 0.0]))
        # Average conditional mean matches the empirical event rate.
        assert data.y.mean() == pytest.approx(mu.mean(), abs=0.01)
        ones = data.y == 1.0
        assert data.f[ones].mean() == pytest.approx(0.9, abs=0.01)
        assert data.f[~ones].mean() == pytest.approx(0.1, abs=0.01)
