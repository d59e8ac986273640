"""Declarative configuration for Monte Carlo validation experiments."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..errors import ConfigError

__all__ = ["SimConfig", "SimResult", "DESIGNS", "LAMBDA_MODES", "OUTCOME_DISTS"]

DESIGNS = (
    "one_sample_cont",
    "one_sample_bin",
    "two_sample_cont",
    "two_sample_bin",
    "paired_cont",
    "paired_bin",
    "two_by_two_rr",
    "two_by_two_or",
    "ols_contrast",
    "logistic_contrast",
)

LAMBDA_MODES = ("oracle", "plugin", "crossfit")
OUTCOME_DISTS = ("gaussian", "t5", "lognormal", "bernoulli")

# Grid axes accepted per design (beyond the common n / N / delta).
_GRID_AXES: dict[str, tuple[str, ...]] = {
    "one_sample_cont": ("n", "N", "rho", "delta"),
    "one_sample_bin": ("n", "N", "accuracy", "se", "sp", "delta", "p"),
    "two_sample_cont": ("n", "N", "rho", "delta"),
    "two_sample_bin": ("n", "N", "accuracy", "se", "sp", "delta", "p"),
    "paired_cont": ("n", "N", "rho", "delta"),
    "paired_bin": ("n", "N", "accuracy", "se", "sp", "delta", "p"),
    "two_by_two_rr": ("n", "N", "accuracy", "p1"),
    "two_by_two_or": ("n", "N", "accuracy", "p1"),
    "ols_contrast": ("n", "N", "rho", "delta"),
    "logistic_contrast": ("n", "N", "accuracy", "delta"),
}

_PARAM_DEFAULTS: dict[str, dict[str, float]] = {
    "one_sample_cont": {"sigma2": 1.0},
    "one_sample_bin": {"p": 0.3},
    "two_sample_cont": {"sigma2": 1.0},
    "two_sample_bin": {"p": 0.3},
    "paired_cont": {"pair_corr": 0.3},
    "paired_bin": {"p": 0.3, "pair_corr": 0.3},
    "two_by_two_rr": {"p0": 0.2, "kappa": 1.0},
    "two_by_two_or": {"p0": 0.2, "kappa": 1.0},
    "ols_contrast": {},
    "logistic_contrast": {},
}


@dataclass(frozen=True)
class SimConfig:
    """One experiment: a design, a parameter grid, and a replication plan.

    ``grid`` maps axis names to lists of values and is expanded as a
    cartesian product in a fixed axis order, so a config is a complete,
    deterministic description of the run.  ``params`` holds fixed scalars
    (design defaults apply where omitted).
    """

    design: str
    grid: dict[str, list]
    replicates: int
    seed: int
    lambda_mode: str = "oracle"
    crossfit_folds: int = 2
    outcome_dist: str = "gaussian"
    params: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.design not in DESIGNS:
            raise ConfigError(
                f"unknown design {self.design!r}; expected one of {DESIGNS}"
            )
        if self.lambda_mode not in LAMBDA_MODES:
            raise ConfigError(
                f"unknown lambda_mode {self.lambda_mode!r}; expected one of {LAMBDA_MODES}"
            )
        if self.outcome_dist not in OUTCOME_DISTS:
            raise ConfigError(
                f"unknown outcome_dist {self.outcome_dist!r}; "
                f"expected one of {OUTCOME_DISTS}"
            )
        if self.replicates < 1:
            raise ConfigError(f"replicates must be >= 1, got {self.replicates}")
        if self.lambda_mode == "crossfit" and self.crossfit_folds < 2:
            raise ConfigError(
                f"crossfit needs at least 2 folds, got {self.crossfit_folds}"
            )
        if not self.grid:
            raise ConfigError("grid must not be empty")
        allowed = set(_GRID_AXES[self.design])
        for axis, values in self.grid.items():
            if axis not in allowed:
                raise ConfigError(
                    f"grid axis {axis!r} is not valid for design {self.design!r} "
                    f"(allowed: {sorted(allowed)})"
                )
            if not isinstance(values, (list, tuple)) or len(values) == 0:
                raise ConfigError(f"grid axis {axis!r} must be a nonempty list")
        for required in ("n", "N"):
            if required not in self.grid:
                raise ConfigError(f"grid must include axis {required!r}")

    def cells(self) -> list[dict[str, Any]]:
        """Expand the grid into an ordered list of cell parameter dicts."""
        axes = [  # fixed order makes cell indices reproducible
            axis for axis in _GRID_AXES[self.design] if axis in self.grid
        ]
        out = []
        for combo in itertools.product(*(self.grid[a] for a in axes)):
            cell = dict(_PARAM_DEFAULTS[self.design])
            cell.update(self.params)
            cell.update(dict(zip(axes, combo)))
            out.append(cell)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SimConfig":
        known = {
            "design",
            "grid",
            "replicates",
            "seed",
            "lambda_mode",
            "crossfit_folds",
            "outcome_dist",
            "params",
        }
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"design", "grid", "replicates", "seed"} - set(data)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | Path) -> "SimConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.from_dict(data)


@dataclass(frozen=True)
class SimResult:
    """One grid cell's outcome: empirical vs analytic rejection behavior."""

    design: str
    n: int
    n_unlabeled: int
    rho_or_accuracy: float
    delta: float
    lambda_mode: str
    analytic_power: float
    empirical_power: float | None
    type1: float | None
    lambda_rmse: float | None
    mc_stderr: float
    n_dropped: int

    @property
    def abs_discrepancy(self) -> float | None:
        if self.empirical_power is None:
            return None
        return abs(self.empirical_power - self.analytic_power)
