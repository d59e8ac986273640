"""Rectified mean estimators and their Wald tests on simulated data.

These are the data-facing counterparts of the population variance formulas:
the point estimate weights the prediction-mean gap by ``lam``, and the Wald
denominator plugs labeled-sample moments into the same variance quadratic.
Sample moments use the unbiased (n-1) denominator throughout.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DegenerateMomentsWarning
from ..statcore import DesignInputs
from .generators import MeanSample, TwoGroupSample

__all__ = [
    "MeanTestResult",
    "sample_moments",
    "ppi_pp_test",
    "two_sample_test",
    "two_by_two_test",
    "crossfit_lambda",
]


@dataclass(frozen=True)
class MeanTestResult:
    reject: bool
    estimate: float
    se: float
    lam: float
    degenerate: bool = False


def sample_moments(y: np.ndarray, f: np.ndarray) -> tuple[float, float, float]:
    """Unbiased sample (var_y, var_f, cov_yf) of paired observations."""
    n = len(y)
    my, mf = y.mean(), f.mean()
    dy, df = y - my, f - mf
    var_y = float(dy @ dy) / (n - 1)
    var_f = float(df @ df) / (n - 1)
    cov = float(dy @ df) / (n - 1)
    return var_y, var_f, cov


def _plugin_lam(var_f: float, cov: float, r: float) -> float:
    if var_f == 0.0:
        return 0.0
    return cov / ((1.0 + r) * var_f)


def _estimate_and_variance(
    data: MeanSample, lam: float | None
) -> tuple[float, float, float]:
    """Point estimate, plug-in variance, and the weight actually used.

    ``lam=None`` requests the plug-in weight from the labeled moments.
    """
    n, n_unl = len(data.y), len(data.f_unlabeled)
    var_y, var_f, cov = sample_moments(data.y, data.f)
    if lam is None:
        lam = _plugin_lam(var_f, cov, n / n_unl)
    est = float(data.y.mean()) + lam * (
        float(data.f_unlabeled.mean()) - float(data.f.mean())
    )
    var_hat = (
        var_y / n
        + lam * lam * var_f * (1.0 / n_unl + 1.0 / n)
        - 2.0 * lam * cov / n
    )
    return est, max(var_hat, 0.0), lam


def ppi_pp_test(
    data: MeanSample, d: DesignInputs, lam: float | None = None
) -> MeanTestResult:
    """Two-sided Wald test of H0: mean = theta0 with a rectified estimator.

    A fixed ``lam`` runs the oracle-weight test; ``lam=None`` uses the
    plug-in weight.  ``lam=0`` reduces to the classical one-sample z-test.
    A zero estimated variance yields a degenerate, non-rejecting result
    with a warning.
    """
    est, var_hat, lam_used = _estimate_and_variance(data, lam)
    if var_hat <= 0.0:
        warnings.warn(
            "estimated variance is zero; test is degenerate and does not reject",
            DegenerateMomentsWarning,
            stacklevel=2,
        )
        return MeanTestResult(False, est, 0.0, lam_used, degenerate=True)
    se = math.sqrt(var_hat)
    reject = abs(est - d.theta0) > d.z_alpha * se
    return MeanTestResult(bool(reject), est, se, lam_used)


def two_sample_test(
    data: TwoGroupSample,
    d: DesignInputs,
    lam_a: float | None = None,
    lam_b: float | None = None,
) -> MeanTestResult:
    """Wald test of H0: mean_A - mean_B = theta0 across independent groups."""
    est_a, var_a, la = _estimate_and_variance(data.group_a, lam_a)
    est_b, var_b, lb = _estimate_and_variance(data.group_b, lam_b)
    est = est_a - est_b
    var_hat = var_a + var_b
    if var_hat <= 0.0:
        warnings.warn(
            "estimated variance is zero; test is degenerate and does not reject",
            DegenerateMomentsWarning,
            stacklevel=2,
        )
        return MeanTestResult(False, est, 0.0, la, degenerate=True)
    se = math.sqrt(var_hat)
    reject = abs(est - d.theta0) > d.z_alpha * se
    return MeanTestResult(bool(reject), est, se, la)


def two_by_two_test(
    data: TwoGroupSample,
    d: DesignInputs,
    measure: str,
    lam_1: float | None = None,
    lam_0: float | None = None,
) -> MeanTestResult:
    """Wald test of H0: log effect = theta0 in a 2x2 design.

    ``group_a`` is the treated/exposed group (index 1), ``group_b`` the
    control (index 0).  Event rates are estimated per group with the
    rectified estimator and propagated to the log relative risk or log odds
    ratio by the delta method with plug-in rate variances.  Estimated rates
    are clipped to (0, 1) before the log transform; a clipped rate inflates
    its own delta-method variance, so such replicates do not reject.
    """
    p1, var_1, l1 = _estimate_and_variance(data.group_a, lam_1)
    p0, var_0, l0 = _estimate_and_variance(data.group_b, lam_0)
    eps = 1e-12
    p1 = min(max(p1, eps), 1.0 - eps)
    p0 = min(max(p0, eps), 1.0 - eps)
    if measure == "RR":
        est = math.log(p1 / p0)
        var_hat = var_1 / p1**2 + var_0 / p0**2
    elif measure == "OR":
        est = math.log(p1 / (1 - p1)) - math.log(p0 / (1 - p0))
        var_hat = var_1 / (p1 * (1 - p1)) ** 2 + var_0 / (p0 * (1 - p0)) ** 2
    else:
        raise ConfigError(f"measure must be 'RR' or 'OR', got {measure!r}")
    if var_hat <= 0.0:
        warnings.warn(
            "estimated variance is zero; test is degenerate and does not reject",
            DegenerateMomentsWarning,
            stacklevel=2,
        )
        return MeanTestResult(False, est, 0.0, l1, degenerate=True)
    se = math.sqrt(var_hat)
    reject = abs(est - d.theta0) > d.z_alpha * se
    return MeanTestResult(bool(reject), est, se, l1)


def crossfit_lambda(
    y: np.ndarray,
    fold_predictions: np.ndarray,
    k: int,
    r: float,
    rng: np.random.Generator,
) -> float:
    """Cross-fitted plug-in prediction weight for the mean problem.

    ``fold_predictions`` is either a length-n vector (one shared predictor,
    in which case the result equals the plain plug-in weight) or a (k, n)
    matrix whose row j holds fold-j's predictor evaluated at every labeled
    point.  Labeled indices are shuffled and dealt round-robin into k
    folds; each point keeps its out-of-fold prediction, and the plug-in
    formula runs on the assembled column.
    """
    n = len(y)
    if k < 2:
        raise ConfigError(f"crossfit needs at least 2 folds, got {k}")
    if n < 2 * k:
        raise ConfigError(f"n={n} is too small for {k} folds (need n >= 2k)")
    preds = np.asarray(fold_predictions, dtype=float)
    if preds.ndim == 1:
        preds = np.broadcast_to(preds, (k, n))
    if preds.shape != (k, n):
        raise ConfigError(
            f"fold_predictions must have shape ({k}, {n}) or ({n},), "
            f"got {preds.shape}"
        )
    perm = rng.permutation(n)
    fold_of = np.empty(n, dtype=int)
    fold_of[perm] = np.arange(n) % k
    assembled = preds[fold_of, np.arange(n)]
    _, var_f, cov = sample_moments(np.asarray(y, dtype=float), assembled)
    if var_f == 0.0:
        warnings.warn(
            "assembled out-of-fold predictions have zero variance; "
            "cross-fitted weight set to 0",
            DegenerateMomentsWarning,
            stacklevel=2,
        )
        return 0.0
    return cov / ((1.0 + r) * var_f)
