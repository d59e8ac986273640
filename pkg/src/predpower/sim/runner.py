"""Grid execution: analytic curves, replicate streams, and result tables.

Each (cell, replicate) pair owns an independent random substream derived
from ``SeedSequence(seed, spawn_key=(cell_index, replicate_index))``, so any
cell or replicate can be reproduced in isolation and the assembled table is
identical regardless of execution order.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from ..calibration import BinaryMetrics, MomentSet, calibrate_binary
from ..errors import ConfigError, DegenerateMomentsWarning
from ..statcore import DesignInputs
from ..variance import (
    ContrastBlocks,
    SampleBudget,
    contrast_lambda_star,
    contrast_optimal_variance,
    lambda_star,
    optimal_variance,
)
from ..power import power_at_variance
from .config import SimConfig, SimResult
from .estimators import (
    crossfit_lambda,
    ppi_pp_test,
    two_by_two_test,
    two_sample_test,
)
from .generators import (
    generate,
    latent_corr_for_binary,
    paired_binary_diff_moments,
    paired_cont_cov4,
)
from .glm import (
    glm_reference_blocks,
    logistic_contrast_test,
    ols_contrast_test,
)

__all__ = ["run_experiment", "write_csv", "results_to_csv_text", "CSV_COLUMNS"]

CSV_COLUMNS = (
    "design",
    "n",
    "N",
    "rho_or_accuracy",
    "delta",
    "lambda_mode",
    "analytic_power",
    "empirical_power",
    "type1",
    "lambda_rmse",
    "mc_stderr",
    "n_dropped",
)

# Reference-block substreams live far above any realistic cell index.
_REF_SPAWN_BASE = 4_000_000_000


@dataclass
class _CellAnalytics:
    d: DesignInputs
    analytic_power: float
    oracle_lam: float
    oracle_lam_b: float | None = None
    cell: dict | None = None
    measure: str | None = None
    contrast: np.ndarray | None = None


def _se_sp(cell: dict) -> tuple[float, float]:
    if "accuracy" in cell:
        return cell["accuracy"], cell["accuracy"]
    if "se" in cell and "sp" in cell:
        return cell["se"], cell["sp"]
    raise ConfigError("binary cell needs 'accuracy' or both 'se' and 'sp'")


def _check_prob(p: float, what: str) -> float:
    if not (0.0 < p < 1.0):
        raise ConfigError(f"{what} must be inside (0, 1), got {p}")
    return p


def _design_inputs(cell: dict, delta: float, theta0: float) -> DesignInputs:
    return DesignInputs(
        alpha=cell.get("alpha", 0.05),
        target_power=cell.get("target_power", 0.8),
        delta=delta,
        theta0=theta0,
    )


def _cell_analytics(
    cfg: SimConfig, cell: dict, ref_cache: dict, ref_counter: list
) -> _CellAnalytics:
    design = cfg.design
    n, n_unl = int(cell["n"]), int(cell["N"])
    budget = SampleBudget(n, n_unl)

    if design in ("one_sample_cont", "paired_cont"):
        if design == "one_sample_cont":
            sigma2 = cell.get("sigma2", 1.0)
            m = MomentSet(sigma2, sigma2, cell["rho"] * sigma2)
            d = _design_inputs(cell, cell["delta"], 0.0)
        else:
            c = cell.get("pair_corr", 0.3)
            var_d = 2.0 * (1.0 - c)
            m = MomentSet(var_d, var_d, cell["rho"] * var_d)
            d = _design_inputs(cell, cell["delta"], 0.0)
            cell["_chol4"] = np.linalg.cholesky(paired_cont_cov4(cell["rho"], c))
            cell["_chol2"] = np.linalg.cholesky(np.array([[1.0, c], [c, 1.0]]))
        lam = lambda_star(m, budget)
        return _CellAnalytics(
            d, power_at_variance(optimal_variance(m, budget), d), lam, cell=cell
        )

    if design == "one_sample_bin":
        se, sp = _se_sp(cell)
        p_true = _check_prob(cell["p"] + cell["delta"], "p + delta")
        m = calibrate_binary_moments(p_true, se, sp)
        d = _design_inputs(cell, cell["delta"], cell["p"])
        lam = lambda_star(m, budget)
        return _CellAnalytics(
            d, power_at_variance(optimal_variance(m, budget), d), lam, cell=cell
        )

    if design == "two_sample_cont":
        sigma2 = cell.get("sigma2", 1.0)
        m = MomentSet(sigma2, sigma2, cell["rho"] * sigma2)
        d = _design_inputs(cell, cell["delta"], 0.0)
        var = 2.0 * optimal_variance(m, budget)
        lam = lambda_star(m, budget)
        return _CellAnalytics(d, power_at_variance(var, d), lam, lam, cell=cell)

    if design == "two_sample_bin":
        se, sp = _se_sp(cell)
        p_a = _check_prob(cell["p"] + cell["delta"], "p + delta")
        p_b = _check_prob(cell["p"], "p")
        m_a = calibrate_binary_moments(p_a, se, sp)
        m_b = calibrate_binary_moments(p_b, se, sp)
        d = _design_inputs(cell, cell["delta"], 0.0)
        var = optimal_variance(m_a, budget) + optimal_variance(m_b, budget)
        return _CellAnalytics(
            d,
            power_at_variance(var, d),
            lambda_star(m_a, budget),
            lambda_star(m_b, budget),
            cell=cell,
        )

    if design == "paired_bin":
        se, sp = _se_sp(cell)
        p_a = _check_prob(cell["p"] + cell["delta"], "p + delta")
        p_b = _check_prob(cell["p"], "p")
        zeta = latent_corr_for_binary(p_a, p_b, cell.get("pair_corr", 0.3))
        cell["_latent_chol"] = np.linalg.cholesky(
            np.array([[1.0, zeta], [zeta, 1.0]])
        )
        m = paired_binary_diff_moments(p_a, p_b, se, sp, zeta)
        d = _design_inputs(cell, cell["delta"], 0.0)
        lam = lambda_star(m, budget)
        return _CellAnalytics(
            d, power_at_variance(optimal_variance(m, budget), d), lam, cell=cell
        )

    if design in ("two_by_two_rr", "two_by_two_or"):
        se, sp = _se_sp(cell)
        p0 = _check_prob(cell["p0"], "p0")
        p1 = _check_prob(cell["p1"], "p1")
        kappa = cell.get("kappa", 1.0)
        n1 = max(1, round(kappa * n))
        cell["_n1"] = n1
        budget1 = SampleBudget(n1, n_unl)
        m1 = calibrate_binary_moments(p1, se, sp)
        m0 = calibrate_binary_moments(p0, se, sp)
        var1 = optimal_variance(m1, budget1)
        var0 = optimal_variance(m0, budget)
        measure = "RR" if design == "two_by_two_rr" else "OR"
        if measure == "RR":
            delta = math.log(p1 / p0)
            var = var1 / p1**2 + var0 / p0**2
        else:
            delta = math.log(p1 / (1 - p1)) - math.log(p0 / (1 - p0))
            var = var1 / (p1 * (1 - p1)) ** 2 + var0 / (p0 * (1 - p0)) ** 2
        d = _design_inputs(cell, delta, 0.0)
        return _CellAnalytics(
            d,
            power_at_variance(var, d),
            lambda_star(m1, budget1),
            lambda_star(m0, budget),
            cell=cell,
            measure=measure,
        )

    if design == "ols_contrast":
        a = np.array(cell.get("contrast", (1.0, -1.0)), dtype=float)
        rho = cell["rho"]
        blocks = ContrastBlocks(v_yy=2.0, v_ff=2.0, v_yf=2.0 * rho)
        d = _design_inputs(cell, cell["delta"], 0.0)
        return _CellAnalytics(
            d,
            power_at_variance(contrast_optimal_variance(blocks, budget), d),
            contrast_lambda_star(blocks, budget),
            cell=cell,
            contrast=a,
        )

    if design == "logistic_contrast":
        a = np.array(cell.get("contrast", (1.0, 0.0)), dtype=float)
        se, sp = _se_sp(cell)
        key = (cfg.design, cell["delta"], se, sp, tuple(a))
        if key not in ref_cache:
            ref_rng = np.random.default_rng(
                np.random.SeedSequence(
                    cfg.seed, spawn_key=(_REF_SPAWN_BASE, ref_counter[0])
                )
            )
            ref_counter[0] += 1
            ref_cache[key] = glm_reference_blocks(
                design, cell, int(cell.get("reference_m", 100_000)), ref_rng
            )
        blocks = ref_cache[key]
        d = _design_inputs(cell, cell["delta"], 0.0)
        return _CellAnalytics(
            d,
            power_at_variance(contrast_optimal_variance(blocks, budget), d),
            contrast_lambda_star(blocks, budget),
            cell=cell,
            contrast=a,
        )

    raise ConfigError(f"unknown design {design!r}")


def calibrate_binary_moments(p: float, se: float, sp: float) -> MomentSet:
    """Binary-classifier moments at prevalence p (thin wrapper for reuse)."""
    return calibrate_binary(BinaryMetrics(prevalence=p, sensitivity=se, specificity=sp))


def _run_rep(
    cfg: SimConfig,
    analytics: _CellAnalytics,
    rng: np.random.Generator,
) -> tuple[bool, float | None, bool]:
    """One replicate: returns (reject, lambda_used_or_None, dropped)."""
    design, cell, d = cfg.design, analytics.cell, analytics.d
    mode = cfg.lambda_mode
    data = generate(design, cell, rng)

    if design in ("one_sample_cont", "one_sample_bin", "paired_cont", "paired_bin"):
        if mode == "oracle":
            res = ppi_pp_test(data, d, lam=analytics.oracle_lam)
        elif mode == "plugin":
            res = ppi_pp_test(data, d, lam=None)
        else:
            lam = crossfit_lambda(
                data.y,
                data.f,
                cfg.crossfit_folds,
                len(data.y) / len(data.f_unlabeled),
                rng,
            )
            res = ppi_pp_test(data, d, lam=lam)
        return res.reject, res.lam, False

    if design in ("two_sample_cont", "two_sample_bin"):
        if mode == "oracle":
            res = two_sample_test(
                data, d, lam_a=analytics.oracle_lam, lam_b=analytics.oracle_lam_b
            )
        elif mode == "plugin":
            res = two_sample_test(data, d)
        else:
            r = len(data.group_a.y) / len(data.group_a.f_unlabeled)
            lam_a = crossfit_lambda(
                data.group_a.y, data.group_a.f, cfg.crossfit_folds, r, rng
            )
            r_b = len(data.group_b.y) / len(data.group_b.f_unlabeled)
            lam_b = crossfit_lambda(
                data.group_b.y, data.group_b.f, cfg.crossfit_folds, r_b, rng
            )
            res = two_sample_test(data, d, lam_a=lam_a, lam_b=lam_b)
        return res.reject, res.lam, False

    if design in ("two_by_two_rr", "two_by_two_or"):
        if mode == "oracle":
            res = two_by_two_test(
                data,
                d,
                analytics.measure,
                lam_1=analytics.oracle_lam,
                lam_0=analytics.oracle_lam_b,
            )
        else:
            res = two_by_two_test(data, d, analytics.measure)
        return res.reject, res.lam, False

    if design == "ols_contrast":
        lam = analytics.oracle_lam if mode == "oracle" else None
        res = ols_contrast_test(
            data, analytics.contrast, d.theta0, d.z_alpha, lam=lam
        )
        return res.reject, res.lam, res.dropped

    if design == "logistic_contrast":
        lam = analytics.oracle_lam if mode == "oracle" else None
        res = logistic_contrast_test(
            data,
            analytics.contrast,
            d.theta0,
            d.z_alpha,
            lam=lam,
            crossfit_folds=cfg.crossfit_folds,
            rng=rng,
        )
        return res.reject, res.lam, res.dropped

    raise ConfigError(f"unknown design {design!r}")


def run_experiment(cfg: SimConfig) -> list[SimResult]:
    """Run every grid cell of a config and return one result row per cell.

    Deterministic: the same config (seed included) produces an identical
    table.  Degenerate-variance warnings raised inside replicates are
    expected at tiny labeled sizes and are suppressed here; degenerate
    replicates count as non-rejections.
    """
    cells = cfg.cells()
    ref_cache: dict = {}
    ref_counter = [0]
    results: list[SimResult] = []
    for cell_idx, cell in enumerate(cells):
        analytics = _cell_analytics(cfg, dict(cell), ref_cache, ref_counter)
        rejects = 0
        dropped = 0
        lam_sq = 0.0
        lam_n = 0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateMomentsWarning)
            for rep in range(cfg.replicates):
                rng = np.random.default_rng(
                    np.random.SeedSequence(cfg.seed, spawn_key=(cell_idx, rep))
                )
                reject, lam_used, was_dropped = _run_rep(cfg, analytics, rng)
                if was_dropped:
                    dropped += 1
                    continue
                rejects += int(reject)
                if cfg.lambda_mode != "oracle" and lam_used is not None:
                    lam_sq += (lam_used - analytics.oracle_lam) ** 2
                    lam_n += 1
        n_eff = cfg.replicates - dropped
        rate = rejects / n_eff if n_eff > 0 else math.nan
        mc_se = math.sqrt(rate * (1.0 - rate) / n_eff) if n_eff > 0 else math.nan
        is_null = analytics.d.delta == 0.0
        results.append(
            SimResult(
                design=cfg.design,
                n=int(cell["n"]),
                n_unlabeled=int(cell["N"]),
                rho_or_accuracy=float(
                    cell.get("rho", cell.get("accuracy", cell.get("se", math.nan)))
                ),
                delta=analytics.d.delta,
                lambda_mode=cfg.lambda_mode,
                analytic_power=analytics.analytic_power,
                empirical_power=None if is_null else rate,
                type1=rate if is_null else None,
                lambda_rmse=math.sqrt(lam_sq / lam_n) if lam_n > 0 else None,
                mc_stderr=mc_se,
                n_dropped=dropped,
            )
        )
    return results


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def results_to_csv_text(results: list[SimResult]) -> str:
    """Render result rows as tidy CSV with full-precision floats."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in results:
        writer.writerow(
            [
                row.design,
                row.n,
                row.n_unlabeled,
                _fmt(row.rho_or_accuracy),
                _fmt(row.delta),
                row.lambda_mode,
                _fmt(row.analytic_power),
                _fmt(row.empirical_power),
                _fmt(row.type1),
                _fmt(row.lambda_rmse),
                _fmt(row.mc_stderr),
                row.n_dropped,
            ]
        )
    return buf.getvalue()


def write_csv(results: list[SimResult], path: str | Path) -> None:
    Path(path).write_text(results_to_csv_text(results))
