"""Asymptotic variance formulas for prediction-powered estimators.

All functions here are pure functions of population parameters (a
:class:`~predpower.calibration.MomentSet` plus a sample budget); estimating
these quantities from data is the simulation harness's job.  The rectified
mean estimator with prediction weight ``lam`` is

    theta_hat = mean(Y_labeled) + lam * (mean(f_unlabeled) - mean(f_labeled))

and its asymptotic variance is the quadratic in ``lam`` implemented by
:func:`ppi_pp_variance`.  Setting ``lam = 1`` recovers the unweighted
rectified (vanilla PPI) estimator; the minimizing weight and the resulting
optimal variance have the closed forms below.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

from .calibration import MomentSet
from .errors import DegenerateMomentsError, DegenerateMomentsWarning, DomainError

__all__ = [
    "SampleBudget",
    "TwoGroupMoments",
    "TwoByTwoSpec",
    "ContrastBlocks",
    "ppi_pp_variance",
    "lambda_star",
    "optimal_variance",
    "two_sample_variance",
    "paired_variance",
    "log_rr_variance",
    "log_or_variance",
    "contrast_variance",
    "contrast_lambda_star",
    "contrast_optimal_variance",
]


@dataclass(frozen=True)
class SampleBudget:
    """Labeled count n, unlabeled count N, and a two-group allocation ratio.

    ``n_unlabeled`` may be ``math.inf`` to evaluate large-pool limits.
    """

    n: int
    n_unlabeled: int | float
    kappa: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"labeled count n must be >= 1, got {self.n}")
        if not (self.n_unlabeled >= 1):
            raise DomainError(
                f"unlabeled count N must be >= 1, got {self.n_unlabeled}"
            )
        if not (self.kappa > 0):
            raise DomainError(f"allocation ratio kappa must be > 0, got {self.kappa}")

    @property
    def r(self) -> float:
        """Labeled-to-unlabeled ratio n/N."""
        return self.n / self.n_unlabeled


@dataclass(frozen=True)
class TwoGroupMoments:
    """Per-group moments and budgets for an independent two-group design."""

    moments_a: MomentSet
    moments_b: MomentSet
    budget_a: SampleBudget
    budget_b: SampleBudget


@dataclass(frozen=True)
class TwoByTwoSpec:
    """Event probabilities and prediction correlations for a 2x2 design.

    ``kappa`` is the treated-to-control allocation n1/n0; ``measure``
    selects the effect scale (relative risk or odds ratio, both on the log
    scale).
    """

    p0: float
    p1: float
    rho0: float
    rho1: float
    kappa: float = 1.0
    measure: Literal["RR", "OR"] = "RR"

    def __post_init__(self):
        for name in ("p0", "p1"):
            p = getattr(self, name)
            if not (0.0 < p < 1.0):
                raise DegenerateMomentsError(
                    f"{name} must lie strictly inside (0, 1), got {p}"
                )
        for name in ("rho0", "rho1"):
            rho = getattr(self, name)
            if abs(rho) > 1.0:
                raise DomainError(f"{name} must lie in [-1, 1], got {rho}")
        if not (self.kappa > 0):
            raise DomainError(f"kappa must be > 0, got {self.kappa}")
        if self.measure not in ("RR", "OR"):
            raise DomainError(f"measure must be 'RR' or 'OR', got {self.measure!r}")


@dataclass(frozen=True)
class ContrastBlocks:
    """Contrast-level score variances for regression designs.

    ``v_yy``, ``v_ff`` and ``v_yf`` are the variances of the labeled score
    term and the prediction score term projected onto the contrast, and
    their covariance.
    """

    v_yy: float
    v_ff: float
    v_yf: float

    def __post_init__(self):
        if self.v_yy < 0 or self.v_ff < 0:
            raise DomainError("contrast block variances must be nonnegative")
        bound = self.v_yy * self.v_ff
        if self.v_yf**2 > bound * (1.0 + 1e-12) + 1e-12:
            raise DomainError(
                f"v_yf^2={self.v_yf**2:.6g} violates Cauchy-Schwarz bound "
                f"v_yy*v_ff={bound:.6g}"
            )


def ppi_pp_variance(m: MomentSet, b: SampleBudget, lam: float) -> float:
    """Variance of the rectified mean estimator at prediction weight ``lam``.

    ``var_y/n + lam^2 * var_f * (1/N + 1/n) - 2*lam*cov_yf/n``.  At
    ``lam = 1`` this equals ``var_f/N + var_eps/n`` exactly.
    """
    n, N = b.n, b.n_unlabeled
    return (
        m.var_y / n
        + lam * lam * m.var_f * (1.0 / N + 1.0 / n)
        - 2.0 * lam * m.cov_yf / n
    )


def lambda_star(m: MomentSet, b: SampleBudget) -> float:
    """Variance-minimizing prediction weight ``cov_yf / ((1+r) var_f)``.

    Returns 0 with a :class:`DegenerateMomentsWarning` when the predictions
    carry no variance (the classical design remains valid).
    """
    if m.var_f == 0.0:
        warnings.warn(
            "predictions have zero variance; optimal weight set to 0",
            DegenerateMomentsWarning,
            stacklevel=2,
        )
        return 0.0
    return m.cov_yf / ((1.0 + b.r) * m.var_f)


def optimal_variance(m: MomentSet, b: SampleBudget) -> float:
    """Variance of the rectified mean estimator at the optimal weight.

    ``var_y/n - (cov_yf^2/var_f) * N / (n(n+N))``; never exceeds the
    classical ``var_y/n``, with equality iff the covariance vanishes.
    """
    n, N = b.n, b.n_unlabeled
    if m.var_f == 0.0:
        return m.var_y / n
    pool_frac = 1.0 if math.isinf(N) else N / (n + N)
    return m.var_y / n - (m.cov_yf**2 / m.var_f) * pool_frac / n


def two_sample_variance(t: TwoGroupMoments) -> float:
    """Variance of the difference estimator across two independent groups.

    Each group uses its own optimal prediction weight, so the total is the
    sum of the group-specific one-sample optimal variances.
    """
    return optimal_variance(t.moments_a, t.budget_a) + optimal_variance(
        t.moments_b, t.budget_b
    )


def paired_variance(m_diff: MomentSet, b: SampleBudget) -> float:
    """Variance for paired designs: the one-sample formula on differences.

    ``m_diff`` must hold the moments of (D, G) = (Y_A - Y_B, f_A - f_B);
    the code path is identical to :func:`optimal_variance` by construction.
    """
    return optimal_variance(m_diff, b)


def _two_by_two_group_terms(s: TwoByTwoSpec) -> tuple[float, float]:
    if s.measure == "RR":
        t0 = (1.0 - s.p0) * (1.0 - s.rho0**2) / s.p0
        t1 = (1.0 - s.p1) * (1.0 - s.rho1**2) / s.p1
    else:
        t0 = (1.0 - s.rho0**2) / (s.p0 * (1.0 - s.p0))
        t1 = (1.0 - s.rho1**2) / (s.p1 * (1.0 - s.p1))
    return t0, t1


def log_rr_variance(s: TwoByTwoSpec, n0: int) -> float:
    """Delta-method variance of the log relative-risk estimator.

    Large-unlabeled-pool approximation: each group's event-rate variance is
    ``p_g(1-p_g)(1-rho_g^2)/n_g``, and the gradient of log(p1/p0) propagates
    it to ``(1/n0) [ (1-p0)(1-rho0^2)/p0 + (1/kappa)(1-p1)(1-rho1^2)/p1 ]``.
    """
    if n0 < 1:
        raise DomainError(f"n0 must be >= 1, got {n0}")
    t0 = (1.0 - s.p0) * (1.0 - s.rho0**2) / s.p0
    t1 = (1.0 - s.p1) * (1.0 - s.rho1**2) / s.p1
    return (t0 + t1 / s.kappa) / n0


def log_or_variance(s: TwoByTwoSpec, n0: int) -> float:
    """Delta-method variance of the log odds-ratio estimator (large pool)."""
    if n0 < 1:
        raise DomainError(f"n0 must be >= 1, got {n0}")
    t0 = (1.0 - s.rho0**2) / (s.p0 * (1.0 - s.p0))
    t1 = (1.0 - s.rho1**2) / (s.p1 * (1.0 - s.p1))
    return (t0 + t1 / s.kappa) / n0


def contrast_variance(c: ContrastBlocks, b: SampleBudget, lam: float) -> float:
    """Variance of a regression-contrast estimator at weight ``lam``.

    ``(v_yy + lam^2 (1+r) v_ff - 2 lam v_yf) / n``.  Setting the blocks from
    a scalar mean problem (v_yy=var_y, v_ff=var_f, v_yf=cov_yf) reproduces
    :func:`ppi_pp_variance`.
    """
    n = b.n
    r = b.r
    return (c.v_yy + lam * lam * (1.0 + r) * c.v_ff - 2.0 * lam * c.v_yf) / n


def contrast_lambda_star(c: ContrastBlocks, b: SampleBudget) -> float:
    """Optimal contrast-level weight ``v_yf / ((1+r) v_ff)``; 0 if v_ff=0."""
    if c.v_ff == 0.0:
        warnings.warn(
            "prediction score variance is zero; optimal weight set to 0",
            DegenerateMomentsWarning,
            stacklevel=2,
        )
        return 0.0
    return c.v_yf / ((1.0 + b.r) * c.v_ff)


def contrast_optimal_variance(c: ContrastBlocks, b: SampleBudget) -> float:
    """Contrast variance at the optimal weight:
    ``(v_yy - v_yf^2 / ((1+r) v_ff)) / n``."""
    if c.v_ff == 0.0:
        return c.v_yy / b.n
    return (c.v_yy - c.v_yf**2 / ((1.0 + b.r) * c.v_ff)) / b.n
