"""Data-generating processes for the Monte Carlo validation harness.

Each design draws a labeled block of (outcome, prediction) pairs and an
independent unlabeled block of predictions from the same law.  Continuous
outcomes are built from a standardized base variable (Gaussian, t with 5
degrees of freedom, or log-normal, the latter two affinely standardized to
mean 0 and variance 1) so the Gaussian-based analytic curves are the
comparator on every grid.  Predictions are constructed as

    f = theta + rho * (y - theta) + sqrt(1 - rho^2) * eta

which has unit variance and correlation exactly ``rho`` with the outcome
for any standardized base law.  Binary predictions are drawn from the
outcome through sensitivity and specificity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import owens_t

from ..calibration import MomentSet
from ..errors import ConfigError
from ..statcore import normal_cdf, normal_quantile

__all__ = [
    "MeanSample",
    "TwoGroupSample",
    "RegressionSample",
    "generate",
    "bvn_cdf",
    "latent_corr_for_binary",
    "paired_binary_diff_moments",
    "paired_cont_cov4",
]


@dataclass(frozen=True)
class MeanSample:
    """Labeled (y, f) pairs plus unlabeled predictions for a mean design."""

    y: np.ndarray
    f: np.ndarray
    f_unlabeled: np.ndarray


@dataclass(frozen=True)
class TwoGroupSample:
    group_a: MeanSample
    group_b: MeanSample


@dataclass(frozen=True)
class RegressionSample:
    """Labeled covariates/outcomes/predictions plus an unlabeled block."""

    x: np.ndarray
    y: np.ndarray
    f: np.ndarray
    x_unlabeled: np.ndarray
    f_unlabeled: np.ndarray


def _standardized_base(rng: np.random.Generator, size: int, dist: str) -> np.ndarray:
    if dist == "gaussian":
        return rng.standard_normal(size)
    if dist == "t5":
        return rng.standard_t(5, size) / math.sqrt(5.0 / 3.0)
    if dist == "lognormal":
        z = np.exp(rng.standard_normal(size))
        mean = math.exp(0.5)
        sd = math.sqrt((math.e - 1.0) * math.e)
        return (z - mean) / sd
    raise ConfigError(f"unknown outcome distribution {dist!r}")


def _continuous_pair(
    rng: np.random.Generator,
    size: int,
    theta: float,
    rho: float,
    sigma2: float,
    dist: str,
) -> tuple[np.ndarray, np.ndarray]:
    base = _standardized_base(rng, size, dist)
    eta = rng.standard_normal(size)
    sd = math.sqrt(sigma2)
    y = theta + sd * base
    f = theta + rho * sd * base + sd * math.sqrt(1.0 - rho * rho) * eta
    return y, f


def _continuous_sample(
    rng: np.random.Generator,
    n: int,
    n_unl: int,
    theta: float,
    rho: float,
    sigma2: float,
    dist: str,
) -> MeanSample:
    y, f = _continuous_pair(rng, n, theta, rho, sigma2, dist)
    _, f_unl = _continuous_pair(rng, n_unl, theta, rho, sigma2, dist)
    return MeanSample(y=y, f=f, f_unlabeled=f_unl)


def _binary_pair(
    rng: np.random.Generator, size: int, p: float, se: float, sp: float
) -> tuple[np.ndarray, np.ndarray]:
    y = rng.random(size) < p
    u = rng.random(size)
    f = np.where(y, u < se, u < 1.0 - sp)
    return y.astype(float), f.astype(float)


def _binary_sample(
    rng: np.random.Generator, n: int, n_unl: int, p: float, se: float, sp: float
) -> MeanSample:
    y, f = _binary_pair(rng, n, p, se, sp)
    _, f_unl = _binary_pair(rng, n_unl, p, se, sp)
    return MeanSample(y=y, f=f, f_unlabeled=f_unl)


# ---------------------------------------------------------------------------
# Bivariate-normal machinery for paired designs
# ---------------------------------------------------------------------------


def bvn_cdf(h: float, k: float, rho: float) -> float:
    """P(Z1 <= h, Z2 <= k) for standard bivariate normal with correlation rho.

    Owen's T-function representation; exact edge cases for rho in {-1, 0, 1}.
    Arguments exactly at zero are nudged by 1e-15, which perturbs the result
    by far less than the quadrature accuracy of any alternative.
    """
    if abs(rho) > 1.0:
        raise ConfigError(f"correlation must be in [-1, 1], got {rho}")
    if rho == 0.0:
        return normal_cdf(h) * normal_cdf(k)
    if rho == 1.0:
        return normal_cdf(min(h, k))
    if rho == -1.0:
        return max(0.0, normal_cdf(h) + normal_cdf(k) - 1.0)
    if h == 0.0:
        h = 1e-15
    if k == 0.0:
        k = 1e-15
    denom = math.sqrt(1.0 - rho * rho)
    a_h = (k - rho * h) / (h * denom)
    a_k = (h - rho * k) / (k * denom)
    delta = 0.5 if h * k < 0.0 else 0.0
    return (
        0.5 * (normal_cdf(h) + normal_cdf(k))
        - float(owens_t(h, a_h))
        - float(owens_t(k, a_k))
        - delta
    )


def latent_corr_for_binary(p_a: float, p_b: float, target_corr: float) -> float:
    """Latent Gaussian correlation whose thresholded indicators have the
    requested binary correlation.

    The indicators are ``Y_g = 1{Z_g <= quantile(p_g)}``; their correlation
    is continuous and increasing in the latent correlation, so a bracketed
    root find is exact to solver tolerance.
    """
    h_a, h_b = normal_quantile(p_a), normal_quantile(p_b)
    sd = math.sqrt(p_a * (1 - p_a) * p_b * (1 - p_b))

    def binary_corr(zeta: float) -> float:
        return (bvn_cdf(h_a, h_b, zeta) - p_a * p_b) / sd

    def objective(zeta: float) -> float:
        return binary_corr(zeta) - target_corr

    lo, hi = -0.999999, 0.999999
    if objective(lo) > 0 or objective(hi) < 0:
        raise ConfigError(
            f"binary correlation {target_corr} is not attainable for "
            f"prevalences ({p_a}, {p_b})"
        )
    return float(brentq(objective, lo, hi, xtol=1e-12))


def paired_cont_cov4(rho: float, pair_corr: float) -> np.ndarray:
    """Covariance of (Y_A, Y_B, f_A, f_B) for the paired continuous design.

    Kronecker structure [[1, rho], [rho, 1]] (outcome vs prediction) with
    [[1, c], [c, 1]] (arm A vs arm B): unit marginal variances, within-pair
    correlation ``c`` for both outcomes and predictions, and
    Corr(Y_A - Y_B, f_A - f_B) exactly ``rho``.
    """
    c = pair_corr
    outer = np.array([[1.0, rho], [rho, 1.0]])
    inner = np.array([[1.0, c], [c, 1.0]])
    return np.kron(outer, inner)


def paired_binary_diff_moments(
    p_a: float, p_b: float, se: float, sp: float, latent_corr: float
) -> MomentSet:
    """Exact moments of (D, G) = (Y_A - Y_B, f_A - f_B) for paired binaries.

    The joint law of the four indicators factorizes as the thresholded
    latent pair times the two conditional prediction channels, so all
    second moments are available in closed form.
    """
    h_a, h_b = normal_quantile(p_a), normal_quantile(p_b)
    p11 = bvn_cdf(h_a, h_b, latent_corr)
    p10 = p_a - p11
    p01 = p_b - p11
    p00 = 1.0 - p_a - p_b + p11

    def q(y: int) -> float:
        return se if y == 1 else 1.0 - sp

    p_fa = se * p_a + (1.0 - sp) * (1.0 - p_a)
    p_fb = se * p_b + (1.0 - sp) * (1.0 - p_b)

    mean_d = p_a - p_b
    var_d = (p10 + p01) - mean_d**2

    e_fafb = (
        p11 * q(1) * q(1)
        + p10 * q(1) * q(0)
        + p01 * q(0) * q(1)
        + p00 * q(0) * q(0)
    )
    mean_g = p_fa - p_fb
    var_g = p_fa + p_fb - 2.0 * e_fafb - mean_g**2

    e_ya_fb = p11 * q(1) + p10 * q(0)
    e_yb_fa = p11 * q(1) + p01 * q(0)
    e_dg = p_a * se - e_ya_fb - e_yb_fa + p_b * se
    cov_dg = e_dg - mean_d * mean_g
    return MomentSet(var_y=var_d, var_f=var_g, cov_yf=cov_dg)


def _paired_cont_sample(
    rng: np.random.Generator,
    n: int,
    n_unl: int,
    delta: float,
    chol4: np.ndarray,
    chol2: np.ndarray,
) -> MeanSample:
    mean4 = np.array([delta, 0.0, delta, 0.0])
    vals = rng.standard_normal((n, 4)) @ chol4.T + mean4
    d = vals[:, 0] - vals[:, 1]
    g = vals[:, 2] - vals[:, 3]
    mean2 = np.array([delta, 0.0])
    f_unl = rng.standard_normal((n_unl, 2)) @ chol2.T + mean2
    g_unl = f_unl[:, 0] - f_unl[:, 1]
    return MeanSample(y=d, f=g, f_unlabeled=g_unl)


def _paired_binary_arms(
    rng: np.random.Generator,
    size: int,
    p_a: float,
    p_b: float,
    se: float,
    sp: float,
    latent_chol: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    z = rng.standard_normal((size, 2)) @ latent_chol.T
    y_a = (z[:, 0] <= normal_quantile(p_a)).astype(float)
    y_b = (z[:, 1] <= normal_quantile(p_b)).astype(float)
    u = rng.random((size, 2))
    f_a = np.where(y_a == 1.0, u[:, 0] < se, u[:, 0] < 1.0 - sp).astype(float)
    f_b = np.where(y_b == 1.0, u[:, 1] < se, u[:, 1] < 1.0 - sp).astype(float)
    return y_a, y_b, f_a, f_b


def _paired_binary_sample(
    rng: np.random.Generator,
    n: int,
    n_unl: int,
    p_a: float,
    p_b: float,
    se: float,
    sp: float,
    latent_chol: np.ndarray,
) -> MeanSample:
    y_a, y_b, f_a, f_b = _paired_binary_arms(rng, n, p_a, p_b, se, sp, latent_chol)
    _, _, fu_a, fu_b = _paired_binary_arms(rng, n_unl, p_a, p_b, se, sp, latent_chol)
    return MeanSample(y=y_a - y_b, f=f_a - f_b, f_unlabeled=fu_a - fu_b)


def _ols_sample(
    rng: np.random.Generator,
    n: int,
    n_unl: int,
    beta: np.ndarray,
    rho: float,
) -> RegressionSample:
    p = len(beta)
    x = rng.standard_normal((n, p))
    eps = rng.standard_normal(n)
    eta = rng.standard_normal(n)
    y = x @ beta + eps
    f = x @ beta + rho * eps + math.sqrt(1.0 - rho * rho) * eta
    x_u = rng.standard_normal((n_unl, p))
    eps_u = rng.standard_normal(n_unl)
    eta_u = rng.standard_normal(n_unl)
    f_u = x_u @ beta + rho * eps_u + math.sqrt(1.0 - rho * rho) * eta_u
    return RegressionSample(x=x, y=y, f=f, x_unlabeled=x_u, f_unlabeled=f_u)


def _logistic_sample(
    rng: np.random.Generator,
    n: int,
    n_unl: int,
    beta: np.ndarray,
    se: float,
    sp: float,
) -> RegressionSample:
    p = len(beta)

    def draw(size: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = rng.standard_normal((size, p))
        mu = 1.0 / (1.0 + np.exp(-(x @ beta)))
        y = (rng.random(size) < mu).astype(float)
        u = rng.random(size)
        f = np.where(y == 1.0, u < se, u < 1.0 - sp).astype(float)
        return x, y, f

    x, y, f = draw(n)
    x_u, _, f_u = draw(n_unl)
    return RegressionSample(x=x, y=y, f=f, x_unlabeled=x_u, f_unlabeled=f_u)


def generate(design: str, cell: dict, rng: np.random.Generator):
    """Draw one replicate dataset for a grid cell.

    ``cell`` uses resolved parameters as produced by
    :meth:`SimConfig.cells` plus any precomputed factors the caller wants to
    reuse (Cholesky factors, latent correlations); missing factors are
    computed on the fly.  The labeled block is always drawn before the
    unlabeled block, so a fixed generator seed pins the whole dataset.
    """
    n, n_unl = int(cell["n"]), int(cell["N"])
    dist = cell.get("dist", "gaussian")
    if design == "one_sample_cont":
        return _continuous_sample(
            rng, n, n_unl, cell["delta"], cell["rho"], cell.get("sigma2", 1.0), dist
        )
    if design == "one_sample_bin":
        se, sp = _resolve_se_sp(cell)
        return _binary_sample(rng, n, n_unl, cell["p"] + cell["delta"], se, sp)
    if design == "two_sample_cont":
        sigma2 = cell.get("sigma2", 1.0)
        a = _continuous_sample(rng, n, n_unl, cell["delta"], cell["rho"], sigma2, dist)
        b = _continuous_sample(rng, n, n_unl, 0.0, cell["rho"], sigma2, dist)
        return TwoGroupSample(group_a=a, group_b=b)
    if design == "two_sample_bin":
        se, sp = _resolve_se_sp(cell)
        a = _binary_sample(rng, n, n_unl, cell["p"] + cell["delta"], se, sp)
        b = _binary_sample(rng, n, n_unl, cell["p"], se, sp)
        return TwoGroupSample(group_a=a, group_b=b)
    if design == "paired_cont":
        chol4 = cell.get("_chol4")
        if chol4 is None:
            chol4 = np.linalg.cholesky(
                paired_cont_cov4(cell["rho"], cell.get("pair_corr", 0.3))
            )
        chol2 = cell.get("_chol2")
        if chol2 is None:
            c = cell.get("pair_corr", 0.3)
            chol2 = np.linalg.cholesky(np.array([[1.0, c], [c, 1.0]]))
        return _paired_cont_sample(rng, n, n_unl, cell["delta"], chol4, chol2)
    if design == "paired_bin":
        se, sp = _resolve_se_sp(cell)
        p_a, p_b = cell["p"] + cell["delta"], cell["p"]
        latent = cell.get("_latent_chol")
        if latent is None:
            zeta = latent_corr_for_binary(p_a, p_b, cell.get("pair_corr", 0.3))
            latent = np.linalg.cholesky(np.array([[1.0, zeta], [zeta, 1.0]]))
        return _paired_binary_sample(rng, n, n_unl, p_a, p_b, se, sp, latent)
    if design in ("two_by_two_rr", "two_by_two_or"):
        se, sp = _resolve_se_sp(cell)
        n1 = int(cell.get("_n1", round(cell.get("kappa", 1.0) * n)))
        g1 = _binary_sample(rng, n1, n_unl, cell["p1"], se, sp)
        g0 = _binary_sample(rng, n, n_unl, cell["p0"], se, sp)
        return TwoGroupSample(group_a=g1, group_b=g0)
    if design == "ols_contrast":
        return _ols_sample(rng, n, n_unl, np.array([cell["delta"], 0.0]), cell["rho"])
    if design == "logistic_contrast":
        se, sp = _resolve_se_sp(cell)
        return _logistic_sample(rng, n, n_unl, np.array([cell["delta"], 0.0]), se, sp)
    raise ConfigError(f"unknown design {design!r}")


def _resolve_se_sp(cell: dict) -> tuple[float, float]:
    if "accuracy" in cell:
        acc = cell["accuracy"]
        return acc, acc
    try:
        return cell["se"], cell["sp"]
    except KeyError as exc:
        raise ConfigError(
            "binary designs need either an 'accuracy' value or both 'se' and 'sp'"
        ) from exc
