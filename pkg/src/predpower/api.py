"""Shared request resolution for the CLI and the HTTP planning service.

Both front ends funnel into the builders here, so their JSON outputs agree
field for field.  Each builder returns a plain dict: the plan scalars, an
echo of the resolved inputs, and a power-vs-n curve for plotting.
"""

from __future__ import annotations

import math
from typing import Callable

from .calibration import (
    BinaryMetrics,
    MomentSet,
    calibrate_binary,
    calibrate_continuous,
)
from .errors import DomainError
from .power import (
    PlanMethod,
    PlanResult,
    classical_n,
    power_at_variance,
    ppi_pp_n,
    regression_contrast_n,
    rule_of_thumb,
    two_by_two_n,
    two_sample_n,
    vanilla_ppi_n,
)
from .statcore import DesignInputs, variance_threshold
from .variance import (
    ContrastBlocks,
    SampleBudget,
    TwoByTwoSpec,
    contrast_optimal_variance,
    log_or_variance,
    log_rr_variance,
    optimal_variance,
)

__all__ = [
    "resolve_mean_moments",
    "plan_mean",
    "plan_two_sample",
    "plan_paired",
    "plan_two_by_two",
    "plan_regression",
    "calibrate_payload",
    "power_payload",
]

CURVE_POINTS = 100


def resolve_mean_moments(
    sigma2: float | None = None,
    rho2: float | None = None,
    mse: float | None = None,
    p: float | None = None,
    se: float | None = None,
    sp: float | None = None,
) -> MomentSet:
    """Resolve exactly one calibration path into a MomentSet.

    Paths: a squared correlation (``sigma2`` + ``rho2``), an MSE bound
    (``sigma2`` + ``mse``), or binary classifier metrics (``p/se/sp``,
    which determine the outcome variance themselves).
    """
    trio = [v is not None for v in (p, se, sp)]
    if any(trio) and not all(trio):
        raise DomainError("binary metrics need all three of p, se, sp")
    paths = sum([rho2 is not None, mse is not None, all(trio)])
    if paths != 1:
        raise DomainError(
            "exactly one calibration path must be given: "
            "rho2, mse, or the binary metrics p/se/sp"
        )
    if all(trio):
        if sigma2 is not None:
            raise DomainError(
                "sigma2 is implied by the binary metrics; do not pass both"
            )
        return calibrate_binary(BinaryMetrics(p, se, sp))
    if sigma2 is None:
        raise DomainError("sigma2 is required with rho2 or mse")
    return calibrate_continuous(sigma2, r2=rho2, mse=mse)


def _power_curve(
    var_at: Callable[[int], float], d: DesignInputs, n_hi: int
) -> list[list[float]]:
    n_hi = max(n_hi, CURVE_POINTS)
    pts = []
    for i in range(CURVE_POINTS):
        n = round(1 + (n_hi - 1) * i / (CURVE_POINTS - 1))
        pts.append([n, power_at_variance(var_at(n), d)])
    return pts


def _mean_var_fn(
    m: MomentSet, n_unlabeled: float, method: PlanMethod
) -> Callable[[int], float]:
    if method == "classical":
        return lambda n: m.var_y / n
    if method == "vanilla":
        return lambda n: m.var_f / n_unlabeled + m.var_eps / n
    return lambda n: optimal_variance(m, SampleBudget(n, n_unlabeled))


def _plan_dict(plan: PlanResult, d: DesignInputs) -> dict:
    out = {
        "n_star": plan.n_star,
        "classical_n": plan.classical_n,
        "reduction": plan.reduction_fraction,
        "analytic_power_at_n": plan.analytic_power_at_n,
        "variance_at_n": plan.variance_at_n,
        "lambda_star": plan.lambda_star,
        "pool_exhausted": plan.pool_exhausted,
        "variance_threshold": variance_threshold(d),
    }
    if plan.n_star_b is not None:
        out["n_star_b"] = plan.n_star_b
        out["lambda_star_b"] = plan.lambda_star_b
    return out


def plan_mean(
    n_unlabeled: float,
    delta: float,
    alpha: float = 0.05,
    power: float = 0.8,
    theta0: float = 0.0,
    method: PlanMethod = "optimal",
    *,
    design_label: str = "mean",
    **moment_kwargs,
) -> dict:
    """Plan a one-sample mean (or paired-difference) study."""
    m = resolve_mean_moments(**moment_kwargs)
    d = DesignInputs(alpha=alpha, target_power=power, delta=delta, theta0=theta0)
    if method == "classical":
        n_star = classical_n(m.var_y, d)
        plan = PlanResult(
            n_star=n_star,
            analytic_power_at_n=power_at_variance(m.var_y / n_star, d),
            variance_at_n=m.var_y / n_star,
            lambda_star=0.0,
            classical_n=n_star,
            reduction_fraction=0.0,
            pool_exhausted=bool(n_star > n_unlabeled),
        )
    elif method == "vanilla":
        plan = vanilla_ppi_n(m, n_unlabeled, d)
    elif method == "optimal":
        plan = ppi_pp_n(m, n_unlabeled, d)
    else:
        raise DomainError(f"unknown method {method!r}")
    var_at = _mean_var_fn(m, n_unlabeled, method)
    out = {
        "design": design_label,
        "method": method,
        "inputs": {
            "sigma2": m.var_y,
            "rho2": m.rho2,
            "N": n_unlabeled,
            "delta": delta,
            "alpha": alpha,
            "power": power,
            "theta0": theta0,
            "conservative": m.conservative,
        },
        **_plan_dict(plan, d),
        "rule_of_thumb_ratio": rule_of_thumb(m.rho2),
        "curve": _power_curve(
            var_at, d, max(2 * plan.n_star, plan.classical_n)
        ),
    }
    return out


def plan_paired(
    n_unlabeled: float,
    delta: float,
    alpha: float = 0.05,
    power: float = 0.8,
    method: PlanMethod = "optimal",
    **moment_kwargs,
) -> dict:
    """Paired design: the mean plan applied to within-pair differences."""
    return plan_mean(
        n_unlabeled,
        delta,
        alpha=alpha,
        power=power,
        method=method,
        design_label="paired",
        **moment_kwargs,
    )


def plan_two_sample(
    n_unlabeled: float,
    delta: float,
    alpha: float = 0.05,
    power: float = 0.8,
    allocation: float = 1.0,
    method: PlanMethod = "optimal",
    n_unlabeled_b: float | None = None,
    sigma2_b: float | None = None,
    rho2_b: float | None = None,
    **moment_kwargs,
) -> dict:
    """Plan an independent two-group comparison (group sizes per group).

    Group B reuses group A's inputs unless ``sigma2_b``/``rho2_b``/
    ``n_unlabeled_b`` override them.
    """
    m_a = resolve_mean_moments(**moment_kwargs)
    if sigma2_b is not None or rho2_b is not None:
        m_b = resolve_mean_moments(
            sigma2=sigma2_b if sigma2_b is not None else moment_kwargs.get("sigma2"),
            rho2=rho2_b if rho2_b is not None else moment_kwargs.get("rho2"),
        )
    else:
        m_b = m_a
    n_b_pool = n_unlabeled_b if n_unlabeled_b is not None else n_unlabeled
    d = DesignInputs(alpha=alpha, target_power=power, delta=delta)
    plan = two_sample_n(
        m_a, m_b, n_unlabeled, n_b_pool, d, allocation=allocation, method=method
    )

    def var_at(n_b: int) -> float:
        n_a = max(1, math.ceil(allocation * n_b - 1e-9))
        return _mean_var_fn(m_a, n_unlabeled, method)(n_a) + _mean_var_fn(
            m_b, n_b_pool, method
        )(n_b)

    return {
        "design": "two-sample",
        "method": method,
        "inputs": {
            "sigma2": m_a.var_y,
            "rho2": m_a.rho2,
            "sigma2_b": m_b.var_y,
            "rho2_b": m_b.rho2,
            "N": n_unlabeled,
            "N_b": n_b_pool,
            "delta": delta,
            "alpha": alpha,
            "power": power,
            "allocation": allocation,
        },
        **_plan_dict(plan, d),
        "curve": _power_curve(
            var_at, d, max(2 * (plan.n_star_b or plan.n_star), plan.classical_n)
        ),
    }


def plan_two_by_two(
    p0: float,
    p1: float,
    rho0: float | None = None,
    rho1: float | None = None,
    se: float | None = None,
    sp: float | None = None,
    kappa: float = 1.0,
    measure: str = "RR",
    alpha: float = 0.05,
    power: float = 0.8,
) -> dict:
    """Plan a 2x2 relative-risk or odds-ratio study.

    Prediction quality enters either as per-group correlations or as one
    classifier's se/sp applied to both groups (exactly one path).
    """
    if (se is None) != (sp is None):
        raise DomainError("classifier metrics need both se and sp")
    if (rho0 is None) != (rho1 is None):
        raise DomainError("per-group correlations need both rho0 and rho1")
    if (se is not None) == (rho0 is not None):
        raise DomainError(
            "exactly one calibration path must be given: rho0/rho1 or se/sp"
        )
    if se is not None:
        rho0 = calibrate_binary(BinaryMetrics(p0, se, sp)).rho
        rho1 = calibrate_binary(BinaryMetrics(p1, se, sp)).rho
    spec = TwoByTwoSpec(p0=p0, p1=p1, rho0=rho0, rho1=rho1, kappa=kappa, measure=measure)
    n0, n1 = two_by_two_n(spec, alpha=alpha, target_power=power)
    classical_spec = TwoByTwoSpec(
        p0=p0, p1=p1, rho0=0.0, rho1=0.0, kappa=kappa, measure=measure
    )
    cl0, cl1 = two_by_two_n(classical_spec, alpha=alpha, target_power=power)
    if measure == "RR":
        delta = math.log(p1 / p0)
        var_fn = log_rr_variance_fn(spec)
    else:
        delta = math.log(p1 / (1 - p1)) - math.log(p0 / (1 - p0))
        var_fn = log_or_variance_fn(spec)
    d = DesignInputs(alpha=alpha, target_power=power, delta=delta)
    return {
        "design": "two-by-two",
        "measure": measure,
        "inputs": {
            "p0": p0,
            "p1": p1,
            "rho0": rho0,
            "rho1": rho1,
            "kappa": kappa,
            "alpha": alpha,
            "power": power,
        },
        "n0": n0,
        "n1": n1,
        "classical_n0": cl0,
        "classical_n1": cl1,
        "reduction": 1.0 - n0 / cl0,
        "delta": delta,
        "analytic_power_at_n": power_at_variance(var_fn(n0), d),
        "variance_at_n": var_fn(n0),
        "variance_threshold": variance_threshold(d),
        "curve": _power_curve(var_fn, d, max(2 * n0, cl0)),
    }


def log_rr_variance_fn(spec: TwoByTwoSpec) -> Callable[[int], float]:
    return lambda n0: log_rr_variance(spec, n0)


def log_or_variance_fn(spec: TwoByTwoSpec) -> Callable[[int], float]:
    return lambda n0: log_or_variance(spec, n0)


def plan_regression(
    v_yy: float,
    v_ff: float,
    v_yf: float,
    n_unlabeled: float,
    delta: float,
    alpha: float = 0.05,
    power: float = 0.8,
) -> dict:
    """Plan a regression-contrast study from contrast-level score blocks."""
    c = ContrastBlocks(v_yy=v_yy, v_ff=v_ff, v_yf=v_yf)
    d = DesignInputs(alpha=alpha, target_power=power, delta=delta)
    plan = regression_contrast_n(c, n_unlabeled, d)

    def var_at(n: int) -> float:
        return contrast_optimal_variance(c, SampleBudget(n, n_unlabeled))

    return {
        "design": "regression",
        "method": "optimal",
        "inputs": {
            "v_yy": v_yy,
            "v_ff": v_ff,
            "v_yf": v_yf,
            "N": n_unlabeled,
            "delta": delta,
            "alpha": alpha,
            "power": power,
        },
        **_plan_dict(plan, d),
        "curve": _power_curve(var_at, d, max(2 * plan.n_star, plan.classical_n)),
    }


def calibrate_payload(
    p: float | None = None,
    se: float | None = None,
    sp: float | None = None,
    var_y: float | None = None,
    r2: float | None = None,
    mse: float | None = None,
) -> dict:
    """Resolve a calibration request into the full moment description."""
    trio = [v is not None for v in (p, se, sp)]
    if any(trio):
        if not all(trio):
            raise DomainError("binary calibration needs all of p, se, sp")
        if var_y is not None or r2 is not None or mse is not None:
            raise DomainError("binary and continuous calibration are exclusive")
        m = calibrate_binary(BinaryMetrics(p, se, sp))
        kind = "binary"
    else:
        if var_y is None:
            raise DomainError("continuous calibration needs var_y and r2 or mse")
        m = calibrate_continuous(var_y, r2=r2, mse=mse)
        kind = "continuous"
    return {
        "kind": kind,
        "var_y": m.var_y,
        "var_f": m.var_f,
        "cov_yf": m.cov_yf,
        "rho": m.rho,
        "rho2": m.rho2,
        "var_eps": m.var_eps,
        "conservative": m.conservative,
        "rule_of_thumb_ratio": rule_of_thumb(m.rho2),
    }


def power_payload(
    design: str,
    n: int,
    n_unlabeled: float,
    delta: float,
    alpha: float = 0.05,
    power: float = 0.8,
    method: PlanMethod = "optimal",
    allocation: float = 1.0,
    **moment_kwargs,
) -> dict:
    """Analytic power at a given budget for the mean-family designs."""
    m = resolve_mean_moments(**moment_kwargs)
    d = DesignInputs(alpha=alpha, target_power=power, delta=delta)
    var_fn = _mean_var_fn(m, n_unlabeled, method)
    if design in ("one-sample", "paired"):
        var = var_fn(n)
    elif design == "two-sample":
        n_a = max(1, math.ceil(allocation * n - 1e-9))
        var = var_fn(n_a) + var_fn(n)
    else:
        raise DomainError(f"power evaluation not supported for design {design!r}")
    return {
        "design": design,
        "method": method,
        "inputs": {
            "sigma2": m.var_y,
            "rho2": m.rho2,
            "n": n,
            "N": n_unlabeled,
            "delta": delta,
            "alpha": alpha,
        },
        "power": power_at_variance(var, d),
        "variance": var,
    }
