"""Rectified regression solvers against small-instance and closed-form
references."""

import math

import numpy as np
import pytest

from predpower.errors import SingularSystemError
from predpower.sim.generators import RegressionSample, generate
from predpower.sim.glm import (
    crossfit_glm_lambda,
    fit_logistic_mle,
    glm_reference_blocks,
    logistic_contrast_blocks,
    logistic_contrast_test,
    ols_contrast_blocks,
    ols_contrast_test,
    rectified_logistic_solve,
    rectified_ols_solve,
)


def make_ols_sample(rng, n=120, n_unl=500, rho=0.7, delta=0.3):
    return generate("ols_contrast", {"n": n, "N": n_unl, "rho": rho, "delta": delta}, rng)


class TestRectifiedOls:
    def test_lambda_zero_is_ols(self):
        rng = np.random.default_rng(0)
        data = make_ols_sample(rng)
        beta = rectified_ols_solve(data, 0.0)
        ref, *_ = np.linalg.lstsq(data.x, data.y, rcond=None)
        assert beta == pytest.approx(ref, abs=1e-10)

    def test_noiseless_interpolation(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((60, 2))
        beta_true = np.array([0.8, -0.4])
        y = x @ beta_true
        x_u = rng.standard_normal((200, 2))
        data = RegressionSample(x=x, y=y, f=y.copy(), x_unlabeled=x_u, f_unlabeled=x_u @ beta_true)
        for lam in (0.0, 0.5, 1.0):
            beta = rectified_ols_solve(data, lam)
            assert beta == pytest.approx(beta_true, abs=1e-10)

    def test_singular_design(self):
        x = np.ones((30, 2))  # rank one
        data = RegressionSample(
            x=x, y=np.ones(30), f=np.ones(30), x_unlabeled=np.ones((50, 2)), f_unlabeled=np.ones(50)
        )
        with pytest.raises(SingularSystemError):
            rectified_ols_solve(data, 0.5)

    def test_blocks_near_population_values(self):
        rng = np.random.default_rng(2)
        data = make_ols_sample(rng, n=20000, n_unl=20000, rho=0.6)
        beta = rectified_ols_solve(data, 0.0)
        blocks = ols_contrast_blocks(data, beta, np.array([1.0, -1.0]))
        assert blocks.v_yy == pytest.approx(2.0, abs=0.1)
        assert blocks.v_ff == pytest.approx(2.0, abs=0.1)
        assert blocks.v_yf == pytest.approx(1.2, abs=0.1)


class TestLogisticMle:
    def test_small_instance_newton_oracle(self):
        # Six-point dataset: compare to an independently coded IRLS loop.
        x = np.array(
            [[1.0, 0.2], [1.0, -0.5], [1.0, 1.3], [1.0, -1.1], [1.0, 0.7], [1.0, -0.2]]
        )
        y = np.array([1.0, 0.0, 0.0, 1.0, 1.0, 0.0])  # not separable
        beta = fit_logistic_mle(x, y, max_iter=100, tol=1e-12)

        ref = np.zeros(2)
        for _ in range(200):
            mu = 1 / (1 + np.exp(-(x @ ref)))
            w = mu * (1 - mu)
            grad = x.T @ (y - mu)
            hess = (x * w[:, None]).T @ x
            step = np.linalg.solve(hess, grad)
            ref = ref + step
            if np.max(np.abs(step)) < 1e-13:
                break
        assert beta == pytest.approx(ref, abs=1e-8)

    def test_rectified_lambda_zero_matches_mle(self):
        rng = np.random.default_rng(3)
        data = generate(
            "logistic_contrast", {"n": 150, "N": 300, "accuracy": 0.9, "delta": 0.5}, rng
        )
        mle = fit_logistic_mle(data.x, data.y, max_iter=100, tol=1e-12)
        rect = rectified_logistic_solve(data, 0.0, beta0=np.zeros(2))
        assert rect is not None
        assert rect == pytest.approx(mle, abs=1e-6)

    def test_rectified_solve_converges_with_weight(self):
        rng = np.random.default_rng(4)
        data = generate(
            "logistic_contrast", {"n": 200, "N": 500, "accuracy": 0.8, "delta": 0.5}, rng
        )
        beta = rectified_logistic_solve(data, 0.7, beta0=np.zeros(2))
        assert beta is not None
        # Root-check: the rectified score vanishes at the solution.
        from scipy.special import expit

        mu_l = expit(data.x @ beta)
        mu_u = expit(data.x_unlabeled @ beta)
        score = data.x.T @ (data.y - mu_l) / len(data.y) + 0.7 * (
            data.x_unlabeled.T @ (data.f_unlabeled - mu_u) / len(data.f_unlabeled)
            - data.x.T @ (data.f - mu_l) / len(data.y)
        )
        assert np.max(np.abs(score)) < 1e-8


class TestReferenceBlocks:
    def test_ols_blocks_converge(self):
        rng = np.random.default_rng(5)
        for rho in (0.5, 0.9):
            blocks = glm_reference_blocks(
                "ols_contrast", {"delta": 0.3, "rho": rho}, 200_000, rng
            )
            tol = 6.0 / math.sqrt(200_000)
            assert blocks.v_yy == pytest.approx(2.0, abs=20 * tol)
            assert blocks.v_ff == pytest.approx(2.0, abs=20 * tol)
            assert blocks.v_yf == pytest.approx(2.0 * rho, abs=20 * tol)

    def test_uncorrelated_cross_block_vanishes(self):
        rng = np.random.default_rng(6)
        blocks = glm_reference_blocks(
            "ols_contrast", {"delta": 0.3, "rho": 0.0}, 100_000, rng
        )
        assert abs(blocks.v_yf) < 4 / math.sqrt(100_000) * 2

    def test_logistic_blocks_two_seed_agreement(self):
        cell = {"delta": 0.5, "accuracy": 0.9}
        b1 = glm_reference_blocks("logistic_contrast", cell, 100_000, np.random.default_rng(7))
        b2 = glm_reference_blocks("logistic_contrast", cell, 100_000, np.random.default_rng(8))
        mc = 3.0 / math.sqrt(100_000)
        assert b1.v_yy == pytest.approx(b2.v_yy, abs=60 * mc)
        assert b1.v_ff == pytest.approx(b2.v_ff, abs=60 * mc)
        assert b1.v_yf == pytest.approx(b2.v_yf, abs=60 * mc)

    def test_minimum_size_enforced(self):
        from predpower.errors import ConfigError

        with pytest.raises(ConfigError):
            glm_reference_blocks(
                "ols_contrast", {"delta": 0.3, "rho": 0.5}, 100, np.random.default_rng(9)
            )


class TestContrastTests:
    def test_ols_oracle_rejects_strong_effect(self):
        rng = np.random.default_rng(10)
        data = make_ols_sample(rng, n=400, n_unl=800, rho=0.9, delta=0.6)
        res = ols_contrast_test(data, np.array([1.0, -1.0]), 0.0, 1.959964, lam=0.45)
        assert res.reject
        assert res.estimate == pytest.approx(0.6, abs=0.3)

    def test_logistic_crossfit_path_runs(self):
        rng = np.random.default_rng(11)
        data = generate(
            "logistic_contrast", {"n": 120, "N": 400, "accuracy": 0.9, "delta": 0.5}, rng
        )
        res = logistic_contrast_test(
            data, np.array([1.0, 0.0]), 0.0, 1.959964, lam=None, rng=np.random.default_rng(12)
        )
        assert not res.dropped
        assert math.isfinite(res.estimate)

    def test_crossfit_lambda_near_oracle_at_scale(self):
        rng = np.random.default_rng(13)
        data = generate(
            "logistic_contrast",
            {"n": 4000, "N": 8000, "accuracy": 0.9, "delta": 0.5},
            rng,
        )
        lam_hat = crossfit_glm_lambda(
            data, np.array([1.0, 0.0]), 2, np.random.default_rng(14)
        )
        blocks = glm_reference_blocks(
            "logistic_contrast",
            {"delta": 0.5, "accuracy": 0.9},
            200_000,
            np.random.default_rng(15),
        )
        r = 0.5
        oracle = blocks.v_yf / ((1 + r) * blocks.v_ff)
        assert lam_hat == pytest.approx(oracle, abs=0.1)

    def test_blocks_cauchy_schwarz(self):
        rng = np.random.default_rng(16)
        for _ in range(20):
            data = generate(
                "logistic_contrast",
                {"n": 40, "N": 200, "accuracy": 0.8, "delta": 0.5},
                rng,
            )
            beta = fit_logistic_mle(data.x, data.y)
            blocks = logistic_contrast_blocks(data, beta, np.array([1.0, 0.0]))
            assert blocks.v_yf**2 <= blocks.v_yy * blocks.v_ff * (1 + 1e-9) + 1e-12
