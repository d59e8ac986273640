"""Rectified mean tests against classical references and edge cases."""

import math

import numpy as np
import pytest

from predpower.errors import ConfigError, DegenerateMomentsWarning
from predpower.sim.estimators import (
    crossfit_lambda,
    ppi_pp_test,
    sample_moments,
    two_by_two_test,
    two_sample_test,
)
from predpower.sim.generators import MeanSample, TwoGroupSample
from predpower.statcore import DesignInputs

D = DesignInputs(alpha=0.05, target_power=0.8, delta=0.2)


def make_sample(rng, n=80, n_unl=400, rho=0.7, mean=0.3):
    base = rng.standard_normal(n)
    y = mean + base
    f = mean + rho * base + math.sqrt(1 - rho**2) * rng.standard_normal(n)
    f_unl = mean + rng.standard_normal(n_unl)
    return MeanSample(y=y, f=f, f_unlabeled=f_unl)


class TestSampleMoments:
    def test_against_numpy(self):
        rng = np.random.default_rng(0)
        y = rng.standard_normal(50)
        f = rng.standard_normal(50)
        var_y, var_f, cov = sample_moments(y, f)
        assert var_y == pytest.approx(np.var(y, ddof=1), rel=1e-12)
        assert var_f == pytest.approx(np.var(f, ddof=1), rel=1e-12)
        assert cov == pytest.approx(np.cov(y, f, ddof=1)[0, 1], rel=1e-12)


class TestPpiPpTest:
    def test_lambda_zero_is_classical_z_test(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            data = make_sample(rng)
            d = DesignInputs(alpha=0.05, target_power=0.8, delta=0.2, theta0=0.1)
            res = ppi_pp_test(data, d, lam=0.0)
            n = len(data.y)
            se = math.sqrt(np.var(data.y, ddof=1) / n)
            z = (data.y.mean() - 0.1) / se
            assert res.reject == (abs(z) > d.z_alpha)
            assert res.estimate == pytest.approx(data.y.mean(), rel=1e-12)

    def test_estimate_formula(self):
        rng = np.random.default_rng(2)
        data = make_sample(rng)
        res = ppi_pp_test(data, D, lam=0.6)
        expected = data.y.mean() + 0.6 * (data.f_unlabeled.mean() - data.f.mean())
        assert res.estimate == pytest.approx(expected, rel=1e-12)

    def test_plugin_weight_used_when_unspecified(self):
        rng = np.random.default_rng(3)
        data = make_sample(rng)
        res = ppi_pp_test(data, D, lam=None)
        var_y, var_f, cov = sample_moments(data.y, data.f)
        r = len(data.y) / len(data.f_unlabeled)
        assert res.lam == pytest.approx(cov / ((1 + r) * var_f), rel=1e-12)

    def test_degenerate_variance_no_rejection(self):
        data = MeanSample(
            y=np.zeros(10), f=np.zeros(10), f_unlabeled=np.zeros(50)
        )
        with pytest.warns(DegenerateMomentsWarning):
            res = ppi_pp_test(data, D, lam=0.0)
        assert not res.reject
        assert res.degenerate


class TestTwoSampleTest:
    def test_difference_estimate(self):
        rng = np.random.default_rng(4)
        a = make_sample(rng, mean=0.5)
        b = make_sample(rng, mean=0.0)
        d = DesignInputs(alpha=0.05, target_power=0.8, delta=0.5)
        res = two_sample_test(TwoGroupSample(a, b), d, lam_a=0.0, lam_b=0.0)
        assert res.estimate == pytest.approx(a.y.mean() - b.y.mean(), rel=1e-12)

    def test_null_rejection_rate_sane(self):
        rng = np.random.default_rng(5)
        d0 = DesignInputs(alpha=0.05, target_power=0.8, delta=0.0)
        rejects = 0
        for _ in range(400):
            a = make_sample(rng, n=100, mean=0.0)
            b = make_sample(rng, n=100, mean=0.0)
            rejects += two_sample_test(TwoGroupSample(a, b), d0).reject
        assert 0.02 <= rejects / 400 <= 0.09


class TestTwoByTwoTest:
    def test_log_rr_estimate(self):
        rng = np.random.default_rng(6)
        g1 = MeanSample(
            y=(rng.random(200) < 0.4).astype(float),
            f=(rng.random(200) < 0.4).astype(float),
            f_unlabeled=(rng.random(500) < 0.4).astype(float),
        )
        g0 = MeanSample(
            y=(rng.random(200) < 0.2).astype(float),
            f=(rng.random(200) < 0.2).astype(float),
            f_unlabeled=(rng.random(500) < 0.2).astype(float),
        )
        d = DesignInputs(alpha=0.05, target_power=0.8, delta=math.log(2.0))
        res = two_by_two_test(TwoGroupSample(g1, g0), d, "RR", lam_1=0.0, lam_0=0.0)
        assert res.estimate == pytest.approx(
            math.log(g1.y.mean() / g0.y.mean()), rel=1e-12
        )

    def test_invalid_measure(self):
        rng = np.random.default_rng(7)
        g = MeanSample(
            y=(rng.random(50) < 0.4).astype(float),
            f=(rng.random(50) < 0.4).astype(float),
            f_unlabeled=(rng.random(100) < 0.4).astype(float),
        )
        with pytest.raises(ConfigError):
            two_by_two_test(TwoGroupSample(g, g), D, "RD")


class TestCrossfitLambda:
    def test_constant_predictor_equals_plugin(self):
        rng = np.random.default_rng(8)
        data = make_sample(rng, n=60)
        r = 60 / 400
        var_y, var_f, cov = sample_moments(data.y, data.f)
        plugin = cov / ((1 + r) * var_f)
        lam_cf = crossfit_lambda(data.y, data.f, k=3, r=r, rng=np.random.default_rng(9))
        assert lam_cf == pytest.approx(plugin, rel=1e-12)

    def test_fold_matrix_assembly(self):
        # Two folds with different predictors: the assembled column must mix
        # out-of-fold values only.
        rng = np.random.default_rng(10)
        n = 40
        y = rng.standard_normal(n)
        preds = np.vstack([y + 0.1, y - 0.1])  # fold 0 and fold 1 predictors
        lam = crossfit_lambda(y, preds, k=2, r=0.0, rng=np.random.default_rng(11))
        # Both rows correlate perfectly with y, so the weight is close to
        # cov/var of the mixture, which stays near 1.
        assert 0.5 < lam < 1.5

    def test_too_few_points(self):
        with pytest.raises(ConfigError):
            crossfit_lambda(np.zeros(5), np.zeros(5), k=3, r=0.1, rng=np.random.default_rng(0))

    def test_shape_validation(self):
        with pytest.raises(ConfigError):
            crossfit_lambda(
                np.zeros(10), np.zeros((3, 5)), k=3, r=0.1, rng=np.random.default_rng(0)
            )
