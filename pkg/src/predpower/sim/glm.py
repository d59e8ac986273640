"""Rectified estimating equations for regression contrasts.

The rectified least-squares system is linear in the coefficients and solved
directly; the rectified logistic score is solved by damped Newton steps.
Standard errors come from plug-in contrast-level blocks: project the score
residuals onto ``J^{-1} a`` (one scalar per observation) and take their
sample variances/covariance, which keeps the blocks Cauchy-Schwarz
consistent by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import expit

from ..errors import ConfigError, SingularSystemError
from ..variance import ContrastBlocks
from .generators import RegressionSample


class EstimatedBlocks(NamedTuple):
    """Plug-in contrast blocks estimated from one dataset.

    All three blocks come from the same labeled score residuals, which
    keeps them Cauchy-Schwarz consistent and, crucially, keeps their
    sampling errors positively coupled: the Wald denominator quadratic
    stays well behaved where independent block estimates would whipsaw it.
    """

    v_yy: float
    v_ff: float
    v_yf: float

__all__ = [
    "rectified_ols_solve",
    "rectified_logistic_solve",
    "fit_logistic_mle",
    "ols_contrast_blocks",
    "logistic_contrast_blocks",
    "crossfit_glm_lambda",
    "glm_reference_blocks",
    "GlmTestResult",
    "ols_contrast_test",
    "logistic_contrast_test",
]


def rectified_ols_solve(data: RegressionSample, lam: float) -> np.ndarray:
    """Coefficients solving the prediction-rectified least-squares system.

    ``lam=0`` is ordinary least squares on the labeled block.  Raises
    :class:`SingularSystemError` when the blended Gram matrix is singular.
    """
    x, y, f = data.x, data.y, data.f
    x_u, f_u = data.x_unlabeled, data.f_unlabeled
    n, n_unl = len(y), len(f_u)
    gram_l = x.T @ x / n
    gram_u = x_u.T @ x_u / n_unl
    lhs = (1.0 - lam) * gram_l + lam * gram_u
    rhs = x.T @ y / n + lam * (x_u.T @ f_u / n_unl - x.T @ f / n)
    try:
        return np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(
            "rectified least-squares system is singular; "
            "check the design matrix rank"
        ) from exc


def fit_logistic_mle(
    x: np.ndarray, y: np.ndarray, max_iter: int = 25, tol: float = 1e-10
) -> np.ndarray:
    """Best-effort logistic MLE by damped Newton from zero.

    Under separation the iterates drift outward; iteration capping returns
    the last iterate, whose fitted probabilities are what downstream
    plug-in moments need.
    """
    n, p = x.shape
    beta = np.zeros(p)
    score_norm = np.inf
    for _ in range(max_iter):
        mu = expit(x @ beta)
        score = x.T @ (y - mu) / n
        score_norm = float(np.max(np.abs(score)))
        if score_norm < tol:
            break
        w = np.maximum(mu * (1.0 - mu), 1e-10)
        hess = (x * w[:, None]).T @ x / n
        try:
            step = np.linalg.solve(hess, score)
        except np.linalg.LinAlgError:
            break
        # Halve until the score norm does not increase.
        for _ in range(20):
            cand = beta + step
            mu_c = expit(x @ cand)
            cand_norm = float(np.max(np.abs(x.T @ (y - mu_c) / n)))
            if cand_norm <= score_norm:
                break
            step *= 0.5
        beta = beta + step
    return beta


def rectified_logistic_solve(
    data: RegressionSample,
    lam: float,
    beta0: np.ndarray | None = None,
    max_iter: int = 50,
    tol: float = 1e-8,
) -> np.ndarray | None:
    """Root of the prediction-rectified logistic score, or None.

    Damped Newton on the score with the blended weighted Gram matrix as
    Jacobian; converged when ``max |score| < tol``.  Returns ``None`` when
    the iteration budget is exhausted, so callers can drop and count the
    replicate.
    """
    x, y, f = data.x, data.y, data.f
    x_u, f_u = data.x_unlabeled, data.f_unlabeled
    n, n_unl = len(y), len(f_u)
    beta = np.zeros(x.shape[1]) if beta0 is None else beta0.astype(float).copy()

    def score_at(b: np.ndarray) -> np.ndarray:
        mu_l = expit(x @ b)
        mu_u = expit(x_u @ b)
        s = x.T @ (y - mu_l) / n
        s += lam * (x_u.T @ (f_u - mu_u) / n_unl - x.T @ (f - mu_l) / n)
        return s

    score = score_at(beta)
    for _ in range(max_iter):
        norm = float(np.max(np.abs(score)))
        if norm < tol:
            return beta
        mu_l = expit(x @ beta)
        mu_u = expit(x_u @ beta)
        w_l = np.maximum(mu_l * (1.0 - mu_l), 1e-10)
        w_u = np.maximum(mu_u * (1.0 - mu_u), 1e-10)
        jac = (1.0 - lam) * (x * w_l[:, None]).T @ x / n
        jac += lam * (x_u * w_u[:, None]).T @ x_u / n_unl
        try:
            step = np.linalg.solve(jac, score)
        except np.linalg.LinAlgError:
            return None
        for _ in range(20):
            cand = beta + step
            cand_score = score_at(cand)
            if float(np.max(np.abs(cand_score))) <= norm:
                break
            step *= 0.5
        beta = beta + step
        score = score_at(beta)
    return beta if float(np.max(np.abs(score))) < tol else None


def _projected_blocks(
    resid_y: np.ndarray, resid_f: np.ndarray, xu: np.ndarray
) -> ContrastBlocks:
    """Blocks from score residuals projected onto J^{-1} a (xu = X @ u)."""
    s_y = resid_y * xu
    s_f = resid_f * xu
    n = len(s_y)
    my, mf = s_y.mean(), s_f.mean()
    dy, df = s_y - my, s_f - mf
    v_yy = float(dy @ dy) / (n - 1)
    v_ff = float(df @ df) / (n - 1)
    v_yf = float(dy @ df) / (n - 1)
    return ContrastBlocks(v_yy=v_yy, v_ff=v_ff, v_yf=v_yf)


def _leverage_scale(x: np.ndarray, weights: np.ndarray | None = None) -> np.ndarray:
    """Per-point 1/sqrt(1 - h_i) factors from the labeled (weighted) Gram.

    Residuals at fitted coefficients are shrunk by their own leverage; the
    HC2-style rescaling undoes that shrinkage so the plug-in blocks stay
    honest at small labeled sizes.
    """
    xw = x if weights is None else x * np.sqrt(weights)[:, None]
    gram = xw.T @ xw
    try:
        gram_inv = np.linalg.inv(gram)
    except np.linalg.LinAlgError:
        return np.ones(len(x))
    h = np.einsum("ij,jk,ik->i", xw, gram_inv, xw)
    return 1.0 / np.sqrt(np.clip(1.0 - h, 1e-6, None))


def _estimated_blocks(s_y: np.ndarray, s_f: np.ndarray) -> EstimatedBlocks:
    n = len(s_y)
    dy = s_y - s_y.mean()
    df = s_f - s_f.mean()
    v_yy = float(dy @ dy) / (n - 1)
    v_ff = float(df @ df) / (n - 1)
    v_yf = float(dy @ df) / (n - 1)
    return EstimatedBlocks(v_yy=v_yy, v_ff=v_ff, v_yf=v_yf)


def ols_contrast_blocks(
    data: RegressionSample, beta: np.ndarray, a: np.ndarray
) -> EstimatedBlocks:
    """Plug-in contrast blocks for least squares at fitted coefficients.

    The bread uses the pooled labeled+unlabeled Gram; labeled score
    residuals are leverage-rescaled against fit shrinkage.
    """
    x, x_u = data.x, data.x_unlabeled
    n_tot = len(x) + len(x_u)
    j = (x.T @ x + x_u.T @ x_u) / n_tot
    try:
        u = np.linalg.solve(j, a)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError("pooled Gram matrix is singular") from exc
    xu_l = x @ u
    scale = _leverage_scale(x)
    return _estimated_blocks(
        (data.y - x @ beta) * scale * xu_l,
        (data.f - x @ beta) * scale * xu_l,
    )


def logistic_contrast_blocks(
    data: RegressionSample, beta: np.ndarray, a: np.ndarray
) -> EstimatedBlocks:
    """Plug-in contrast blocks for the logistic score at fitted coefficients.

    Leverage rescaling uses the weighted labeled Gram (the IRLS hat matrix).
    """
    x, x_u = data.x, data.x_unlabeled
    mu_l = expit(x @ beta)
    mu_u = expit(x_u @ beta)
    w_l = mu_l * (1.0 - mu_l)
    w_u = mu_u * (1.0 - mu_u)
    n_tot = len(x) + len(x_u)
    j = ((x * w_l[:, None]).T @ x + (x_u * w_u[:, None]).T @ x_u) / n_tot
    try:
        u = np.linalg.solve(j, a)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError("weighted Gram matrix is singular") from exc
    xu_l = x @ u
    scale = _leverage_scale(x, weights=w_l)
    return _estimated_blocks(
        (data.y - mu_l) * scale * xu_l,
        (data.f - mu_l) * scale * xu_l,
    )


def crossfit_glm_lambda(
    data: RegressionSample,
    a: np.ndarray,
    k: int,
    rng: np.random.Generator,
) -> float:
    """K-fold cross-fitted plug-in weight for a logistic contrast.

    Labeled indices are shuffled and dealt round-robin into folds.  Each
    fold's points are scored at the MLE fitted on the other folds and the
    projected score pairs are assembled across folds.  The prediction
    block additionally pools the unlabeled prediction scores (averaged
    over the fold coefficients, mirroring the average-predictor form of
    the cross-fitted theory), and the weight is clamped to [0, 1], where
    the oracle value lives; fold fits on very small labeled samples are
    heavy-tailed without it.
    """
    x, y, f = data.x, data.y, data.f
    x_u, f_u = data.x_unlabeled, data.f_unlabeled
    n = len(y)
    if n < 2 * k:
        raise ConfigError(f"n={n} is too small for {k} folds (need n >= 2k)")
    r = n / len(f_u)
    perm = rng.permutation(n)
    fold_of = np.empty(n, dtype=int)
    fold_of[perm] = np.arange(n) % k

    s_y = np.empty(n)
    s_f = np.empty(n)
    s_f_unl = np.zeros(len(f_u))
    all_x = np.vstack([x, x_u])
    for j in range(k):
        held = fold_of == j
        beta_j = fit_logistic_mle(x[~held], y[~held])
        mu_all = expit(all_x @ beta_j)
        w_all = mu_all * (1.0 - mu_all)
        jmat = (all_x * w_all[:, None]).T @ all_x / len(all_x)
        try:
            u = np.linalg.solve(jmat, a)
        except np.linalg.LinAlgError:
            continue
        mu_held = expit(x[held] @ beta_j)
        xu = x[held] @ u
        s_y[held] = (y[held] - mu_held) * xu
        s_f[held] = (f[held] - mu_held) * xu
        s_f_unl += (f_u - expit(x_u @ beta_j)) * (x_u @ u) / k

    dy = s_y - s_y.mean()
    df = s_f - s_f.mean()
    v_yf = float(dy @ df) / (n - 1)
    v_ff = float(np.concatenate([s_f, s_f_unl]).var(ddof=1))
    if v_ff == 0.0:
        return 0.0
    return float(np.clip(v_yf / ((1.0 + r) * v_ff), 0.0, 1.0))


def glm_reference_blocks(
    design: str, cell: dict, m: int, rng: np.random.Generator
) -> ContrastBlocks:
    """Population contrast blocks approximated from one large reference draw.

    The logistic blocks have no convenient closed form, so a single Monte
    Carlo reference sample of size ``m`` (deterministic under a fixed
    generator) stands in for the population expectations; the least-squares
    design is handled the same way for uniformity.
    """
    if m < 10_000:
        raise ConfigError(f"reference sample must have m >= 10000, got {m}")
    a = np.asarray(cell.get("contrast", _default_contrast(design)), dtype=float)
    beta = np.array([cell["delta"], 0.0])
    if design == "ols_contrast":
        rho = cell["rho"]
        x = rng.standard_normal((m, 2))
        eps = rng.standard_normal(m)
        eta = rng.standard_normal(m)
        resid_y = eps
        resid_f = rho * eps + math.sqrt(1.0 - rho * rho) * eta
        j = x.T @ x / m
        u = np.linalg.solve(j, a)
        return _projected_blocks(resid_y, resid_f, x @ u)
    if design == "logistic_contrast":
        if "accuracy" in cell:
            se = sp = cell["accuracy"]
        else:
            se, sp = cell["se"], cell["sp"]
        x = rng.standard_normal((m, 2))
        mu = expit(x @ beta)
        y = (rng.random(m) < mu).astype(float)
        u01 = rng.random(m)
        f = np.where(y == 1.0, u01 < se, u01 < 1.0 - sp).astype(float)
        w = mu * (1.0 - mu)
        j = (x * w[:, None]).T @ x / m
        u = np.linalg.solve(j, a)
        return _projected_blocks(y - mu, f - mu, x @ u)
    raise ConfigError(f"no reference blocks for design {design!r}")


def _default_contrast(design: str) -> tuple[float, ...]:
    return (1.0, -1.0) if design == "ols_contrast" else (1.0, 0.0)


@dataclass(frozen=True)
class GlmTestResult:
    reject: bool
    estimate: float
    se: float
    lam: float
    dropped: bool = False


def ols_contrast_test(
    data: RegressionSample,
    a: np.ndarray,
    theta0: float,
    z_crit: float,
    lam: float | None = None,
) -> GlmTestResult:
    """Wald test of H0: a'beta = theta0 with the rectified OLS estimator.

    A fixed ``lam`` is used as given; ``lam=None`` computes the plug-in
    weight from blocks at a preliminary labeled-only fit.
    """
    if lam is None:
        beta0 = rectified_ols_solve(data, 0.0)
        blocks0 = ols_contrast_blocks(data, beta0, a)
        r = len(data.y) / len(data.f_unlabeled)
        lam = (
            0.0
            if blocks0.v_ff == 0.0
            else blocks0.v_yf / ((1.0 + r) * blocks0.v_ff)
        )
    beta = rectified_ols_solve(data, lam)
    blocks = ols_contrast_blocks(data, beta, a)
    n = len(data.y)
    r = n / len(data.f_unlabeled)
    var_hat = (
        blocks.v_yy + lam * lam * (1.0 + r) * blocks.v_ff - 2.0 * lam * blocks.v_yf
    ) / n
    if var_hat <= 0.0:
        return GlmTestResult(False, float(a @ beta), 0.0, lam)
    se = math.sqrt(var_hat)
    est = float(a @ beta)
    return GlmTestResult(bool(abs(est - theta0) > z_crit * se), est, se, lam)


def logistic_contrast_test(
    data: RegressionSample,
    a: np.ndarray,
    theta0: float,
    z_crit: float,
    lam: float | None = None,
    crossfit_folds: int = 2,
    rng: np.random.Generator | None = None,
) -> GlmTestResult:
    """Wald test of H0: a'beta = theta0 with the rectified logistic estimator.

    ``lam=None`` estimates the cross-fitted plug-in weight first (``rng``
    drives the fold shuffle), then solves the rectified score with it.
    Non-convergence of the rectified solve marks the replicate dropped.
    """
    if lam is None:
        if rng is None:
            raise ConfigError("cross-fitted weight estimation needs an rng")
        lam = crossfit_glm_lambda(data, a, crossfit_folds, rng)
    start = fit_logistic_mle(data.x, data.y)
    beta = rectified_logistic_solve(data, lam, beta0=start)
    if beta is None:
        return GlmTestResult(False, math.nan, math.nan, lam, dropped=True)
    blocks = logistic_contrast_blocks(data, beta, a)
    n = len(data.y)
    r = n / len(data.f_unlabeled)
    var_hat = (
        blocks.v_yy + lam * lam * (1.0 + r) * blocks.v_ff - 2.0 * lam * blocks.v_yf
    ) / n
    if var_hat <= 0.0:
        return GlmTestResult(False, float(a @ beta), 0.0, lam)
    se = math.sqrt(var_hat)
    est = float(a @ beta)
    return GlmTestResult(bool(abs(est - theta0) > z_crit * se), est, se, lam)
