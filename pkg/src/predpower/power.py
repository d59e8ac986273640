"""Power curves and labeled-sample-size inversions for every design.

Inversions follow the standard planning convention: the far-tail term of the
two-sided power is dropped, which turns "power >= target" into the monotone
variance criterion ``variance(n) <= s2`` with ``s2`` the design's variance
threshold.  All *reported* power values use the full two-term formula, so
the analytic power at a planned ``n_star`` always meets or exceeds the
target.  Planned sizes are integers, floored at 1, and integer-minimal
under the one-term criterion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

from .calibration import MomentSet
from .errors import DomainError, InfeasiblePlanError, UnattainablePowerError
from .statcore import DesignInputs, normal_cdf, variance_threshold
from .variance import (
    ContrastBlocks,
    SampleBudget,
    TwoByTwoSpec,
    contrast_lambda_star,
    contrast_optimal_variance,
    lambda_star,
    optimal_variance,
)

__all__ = [
    "PlanResult",
    "power_at_variance",
    "classical_power",
    "classical_n",
    "ppi_pp_power",
    "ppi_pp_n",
    "vanilla_ppi_n",
    "rule_of_thumb",
    "two_sample_n",
    "paired_n",
    "two_by_two_n",
    "regression_contrast_n",
]

PlanMethod = Literal["classical", "vanilla", "optimal"]


@dataclass(frozen=True)
class PlanResult:
    """Outcome of a labeled-sample-size inversion.

    ``n_star`` is the required labeled count (per reference group in
    two-group designs, with the second group in ``n_star_b``).
    ``pool_exhausted`` flags plans whose labeled requirement exceeds the
    unlabeled pool; the variance formula stays valid, but a fixed-pool
    design cannot supply that many predictions.
    """

    n_star: int
    analytic_power_at_n: float
    variance_at_n: float
    lambda_star: float
    classical_n: int
    reduction_fraction: float
    pool_exhausted: bool
    n_star_b: int | None = None
    lambda_star_b: float | None = None


def power_at_variance(var: float, d: DesignInputs) -> float:
    """Two-sided Wald power of an estimator with the given variance.

    Both normal terms are retained.  At ``delta = 0`` this is the test size
    ``alpha``; at zero variance with a nonzero effect it is 1.
    """
    if var < 0:
        raise DomainError(f"variance must be nonnegative, got {var}")
    z = d.z_alpha
    if var == 0.0:
        return d.alpha if d.delta == 0.0 else 1.0
    u = min(abs(d.delta) / math.sqrt(var), 40.0)
    return normal_cdf(-z + u) + normal_cdf(-z - u)


def classical_power(n: int, var_y: float, d: DesignInputs) -> float:
    """Power of the classical one-sample z-test at labeled size ``n``."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if not (var_y > 0):
        raise DomainError(f"var_y must be positive, got {var_y}")
    return power_at_variance(var_y / n, d)


def _min_int_where(pred: Callable[[int], bool], guess: float, lo: int = 1) -> int:
    """Smallest integer >= lo satisfying a monotone predicate.

    ``guess`` is the analytic root; float dust is repaired by stepping the
    predicate itself, so the result is exactly integer-minimal.
    """
    n = max(lo, math.ceil(guess - 1e-9))
    while not pred(n):
        n += 1
    while n > lo and pred(n - 1):
        n -= 1
    return n


def classical_n(var_y: float, d: DesignInputs) -> int:
    """Smallest labeled size with ``var_y / n <= s2`` (classical design)."""
    if not (var_y > 0):
        raise DomainError(f"var_y must be positive, got {var_y}")
    if d.delta == 0.0:
        raise UnattainablePowerError(
            "zero effect size: no finite sample size attains the target power"
        )
    s2 = variance_threshold(d)
    return _min_int_where(lambda n: var_y / n <= s2, var_y / s2)


def ppi_pp_power(m: MomentSet, b: SampleBudget, d: DesignInputs) -> float:
    """Power of the optimally weighted rectified test at budget ``b``."""
    return power_at_variance(optimal_variance(m, b), d)


def _plan_from_n(
    m: MomentSet,
    n_unlabeled: int | float,
    d: DesignInputs,
    n_star: int,
    lam: float,
    var_at_n: float,
) -> PlanResult:
    cl = classical_n(m.var_y, d)
    return PlanResult(
        n_star=n_star,
        analytic_power_at_n=power_at_variance(var_at_n, d),
        variance_at_n=var_at_n,
        lambda_star=lam,
        classical_n=cl,
        reduction_fraction=1.0 - n_star / cl,
        pool_exhausted=bool(n_star > n_unlabeled),
    )


def ppi_pp_n(m: MomentSet, n_unlabeled: int | float, d: DesignInputs) -> PlanResult:
    """Smallest labeled size at which the optimally weighted design meets
    the target power, for a fixed unlabeled pool.

    Solves ``s2*n^2 + (s2*N - var_y)*n - N*var_y*(1 - rho^2) >= 0`` for its
    positive root and ceils.  ``rho = 0`` collapses to the classical count.
    A result above ``N`` is returned with ``pool_exhausted`` set rather than
    raised: the variance formula remains valid.
    """
    if d.delta == 0.0:
        raise UnattainablePowerError(
            "zero effect size: no finite sample size attains the target power"
        )
    if not (n_unlabeled >= 1):
        raise DomainError(f"unlabeled pool size must be >= 1, got {n_unlabeled}")
    s2 = variance_threshold(d)
    rho2 = m.rho2

    def var_at(n: int) -> float:
        return optimal_variance(m, SampleBudget(n, n_unlabeled))

    if math.isinf(n_unlabeled):
        guess = m.var_y * (1.0 - rho2) / s2
    else:
        b_coef = s2 * n_unlabeled - m.var_y
        disc = b_coef**2 + 4.0 * s2 * n_unlabeled * m.var_y * (1.0 - rho2)
        guess = (-b_coef + math.sqrt(disc)) / (2.0 * s2)
    n_star = _min_int_where(lambda n: var_at(n) <= s2, guess)
    budget = SampleBudget(n_star, n_unlabeled)
    lam = lambda_star(m, budget) if m.var_f > 0 else 0.0
    return _plan_from_n(m, n_unlabeled, d, n_star, lam, var_at(n_star))


def vanilla_ppi_n(
    m: MomentSet, n_unlabeled: int | float, d: DesignInputs
) -> PlanResult:
    """Labeled size for the unweighted rectified design (weight fixed at 1).

    Inverts ``var_f/N + var_eps/n <= s2``.  When ``s2 <= var_f/N`` no finite
    labeled size suffices; the raised :class:`InfeasiblePlanError` names the
    smallest pool size that would make the plan feasible.
    """
    if d.delta == 0.0:
        raise UnattainablePowerError(
            "zero effect size: no finite sample size attains the target power"
        )
    if not (n_unlabeled >= 1):
        raise DomainError(f"unlabeled pool size must be >= 1, got {n_unlabeled}")
    s2 = variance_threshold(d)
    floor_term = m.var_f / n_unlabeled
    if s2 <= floor_term:
        n_min = math.floor(m.var_f / s2) + 1
        raise InfeasiblePlanError(
            f"unweighted rectified design is infeasible at N={n_unlabeled}: "
            f"the prediction-noise floor var_f/N={floor_term:.6g} already "
            f"meets the variance threshold {s2:.6g}; "
            f"need N >= {n_min}",
            min_n_unlabeled=n_min,
        )

    def var_at(n: int) -> float:
        return floor_term + m.var_eps / n

    guess = m.var_eps / (s2 - floor_term)
    n_star = _min_int_where(lambda n: var_at(n) <= s2, guess)
    return _plan_from_n(m, n_unlabeled, d, n_star, 1.0, var_at(n_star))


def rule_of_thumb(rho2: float) -> float:
    """Approximate ratio of prediction-powered to classical labeled size.

    A predictor explaining a fraction ``rho2`` of the outcome variance cuts
    the labeled requirement by about that fraction: the ratio is
    ``1 - rho2``, exact in the limit of an unbounded unlabeled pool.
    """
    if not (0.0 <= rho2 <= 1.0):
        raise DomainError(f"rho2 must be in [0, 1], got {rho2}")
    return 1.0 - rho2


def two_sample_n(
    m_a: MomentSet,
    m_b: MomentSet,
    n_unlabeled_a: int | float,
    n_unlabeled_b: int | float,
    d: DesignInputs,
    allocation: float = 1.0,
    method: PlanMethod = "optimal",
) -> PlanResult:
    """Per-group labeled sizes for an independent two-group comparison.

    ``allocation`` is the ratio n_a/n_b.  The summed two-group variance is
    monotone in the reference size n_b, so the inversion bisects the integer
    predicate directly (no closed-form root is used); the unbalanced case
    scales the second group by the allocation ratio before ceiling.
    ``method`` selects the estimator whose variance is inverted: the
    optimally weighted design (default), the unweighted rectified design,
    or the classical test.
    """
    if d.delta == 0.0:
        raise UnattainablePowerError(
            "zero effect size: no finite sample size attains the target power"
        )
    if not (allocation > 0):
        raise DomainError(f"allocation must be > 0, got {allocation}")
    s2 = variance_threshold(d)

    def group_var(m: MomentSet, n: int, n_unl: int | float) -> float:
        if method == "optimal":
            return optimal_variance(m, SampleBudget(n, n_unl))
        if method == "vanilla":
            return m.var_f / n_unl + m.var_eps / n
        return m.var_y / n

    if method == "vanilla":
        floor_term = m_a.var_f / n_unlabeled_a + m_b.var_f / n_unlabeled_b
        if s2 <= floor_term:
            n_min = math.floor((m_a.var_f + m_b.var_f) / s2) + 1
            raise InfeasiblePlanError(
                f"unweighted rectified design is infeasible at the given pools: "
                f"prediction-noise floor {floor_term:.6g} meets the variance "
                f"threshold {s2:.6g}; need per-group N >= {n_min}",
                min_n_unlabeled=n_min,
            )

    def n_a_for(n_b: int) -> int:
        return max(1, math.ceil(allocation * n_b - 1e-9))

    def total_var(n_b: int) -> float:
        return group_var(m_a, n_a_for(n_b), n_unlabeled_a) + group_var(
            m_b, n_b, n_unlabeled_b
        )

    # Classical count for the reference group bounds the search from above.
    cl_b = _min_int_where(
        lambda n: m_a.var_y / n_a_for(n) + m_b.var_y / n <= s2,
        (m_a.var_y / allocation + m_b.var_y) / s2,
    )
    lo, hi = 1, cl_b
    if not total_var(hi) <= s2:  # vanilla can need more than classical
        while not total_var(hi) <= s2:
            hi *= 2
    if total_var(lo) <= s2:
        n_b = lo
    else:
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if total_var(mid) <= s2:
                hi = mid
            else:
                lo = mid
        n_b = hi
    n_a = n_a_for(n_b)

    if method == "optimal":
        lam_a = lambda_star(m_a, SampleBudget(n_a, n_unlabeled_a)) if m_a.var_f > 0 else 0.0
        lam_b = lambda_star(m_b, SampleBudget(n_b, n_unlabeled_b)) if m_b.var_f > 0 else 0.0
    elif method == "vanilla":
        lam_a = lam_b = 1.0
    else:
        lam_a = lam_b = 0.0
    var_at = total_var(n_b)
    return PlanResult(
        n_star=n_a,
        analytic_power_at_n=power_at_variance(var_at, d),
        variance_at_n=var_at,
        lambda_star=lam_a,
        classical_n=n_a_for(cl_b),
        reduction_fraction=1.0 - n_a / n_a_for(cl_b),
        pool_exhausted=bool(n_a > n_unlabeled_a or n_b > n_unlabeled_b),
        n_star_b=n_b,
        lambda_star_b=lam_b,
    )


def paired_n(
    m_diff: MomentSet, n_unlabeled: int | float, d: DesignInputs
) -> PlanResult:
    """Labeled pairs for a paired design: the one-sample inversion applied
    to the moments of the within-pair differences (D, G)."""
    return ppi_pp_n(m_diff, n_unlabeled, d)


def two_by_two_n(
    s: TwoByTwoSpec, alpha: float = 0.05, target_power: float = 0.8
) -> tuple[int, int]:
    """Per-group labeled sizes for a log relative-risk or log odds-ratio
    Wald test in a 2x2 design, in the large-unlabeled-pool regime.

    Returns ``(n0, n1)`` with ``n1 = kappa * n0`` ceiled.  Setting both
    correlations to zero recovers the classical epidemiological formulas.
    Raises :class:`UnattainablePowerError` when the two event probabilities
    coincide (zero effect on either scale).
    """
    if s.p0 == s.p1:
        raise UnattainablePowerError(
            "p0 == p1: zero effect, no finite sample size attains the target"
        )
    if s.measure == "RR":
        delta = math.log(s.p1 / s.p0)
        t0 = (1.0 - s.p0) * (1.0 - s.rho0**2) / s.p0
        t1 = (1.0 - s.p1) * (1.0 - s.rho1**2) / s.p1
    else:
        delta = math.log(s.p1 / (1 - s.p1)) - math.log(s.p0 / (1 - s.p0))
        t0 = (1.0 - s.rho0**2) / (s.p0 * (1.0 - s.p0))
        t1 = (1.0 - s.rho1**2) / (s.p1 * (1.0 - s.p1))
    d = DesignInputs(alpha=alpha, target_power=target_power, delta=delta)
    s2 = variance_threshold(d)
    bracket = t0 + t1 / s.kappa
    if bracket == 0.0:
        n0 = 1
    else:
        n0 = _min_int_where(lambda n: bracket / n <= s2, bracket / s2)
    n1 = max(1, math.ceil(s.kappa * n0 - 1e-9))
    return n0, n1


def regression_contrast_n(
    c: ContrastBlocks, n_unlabeled: int | float, d: DesignInputs
) -> PlanResult:
    """Labeled size for a regression-contrast Wald test at a fixed pool.

    Solves ``s2*n^2 + (s2*N - v_yy)*n - N*(v_yy - v_yf^2/v_ff) >= 0``; with
    uninformative prediction scores this reduces to the classical GLM count
    ``ceil(v_yy / s2)``, and as the pool grows the requirement approaches
    ``(v_yy - v_yf^2/v_ff) / s2``.
    """
    if d.delta == 0.0:
        raise UnattainablePowerError(
            "zero effect size: no finite sample size attains the target power"
        )
    if not (n_unlabeled >= 1):
        raise DomainError(f"unlabeled pool size must be >= 1, got {n_unlabeled}")
    s2 = variance_threshold(d)
    explained = 0.0 if c.v_ff == 0.0 else c.v_yf**2 / c.v_ff

    def var_at(n: int) -> float:
        return contrast_optimal_variance(c, SampleBudget(n, n_unlabeled))

    if math.isinf(n_unlabeled):
        guess = (c.v_yy - explained) / s2
    else:
        b_coef = s2 * n_unlabeled - c.v_yy
        disc = b_coef**2 + 4.0 * s2 * n_unlabeled * (c.v_yy - explained)
        guess = (-b_coef + math.sqrt(disc)) / (2.0 * s2)
    n_star = _min_int_where(lambda n: var_at(n) <= s2, guess)
    budget = SampleBudget(n_star, n_unlabeled)
    lam = contrast_lambda_star(c, budget) if c.v_ff > 0 else 0.0
    cl = _min_int_where(lambda n: c.v_yy / n <= s2, c.v_yy / s2)
    return PlanResult(
        n_star=n_star,
        analytic_power_at_n=power_at_variance(var_at(n_star), d),
        variance_at_n=var_at(n_star),
        lambda_star=lam,
        classical_n=cl,
        reduction_fraction=1.0 - n_star / cl,
        pool_exhausted=bool(n_star > n_unlabeled),
    )
