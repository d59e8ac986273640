"""Semantic exceptions and warnings shared across the package."""

from __future__ import annotations


class PredPowerError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(PredPowerError, ValueError):
    """An input falls outside the mathematical domain of an operation."""


class DegenerateMomentsError(PredPowerError, ValueError):
    """Second-order inputs are degenerate (e.g. zero outcome variance)."""


class UnattainablePowerError(PredPowerError, ValueError):
    """No finite labeled sample size can reach the target (zero effect)."""


class InfeasiblePlanError(PredPowerError, ValueError):
    """The plan is infeasible at the given unlabeled pool size.

    ``min_n_unlabeled`` names the smallest pool size at which a finite
    labeled sample size exists.
    """

    def __init__(self, message: str, min_n_unlabeled: int | None = None):
        super().__init__(message)
        self.min_n_unlabeled = min_n_unlabeled


class ConfigError(PredPowerError, ValueError):
    """A simulation or CLI configuration is invalid."""


class SingularSystemError(PredPowerError, RuntimeError):
    """A design matrix is rank deficient; the estimating equation has no
    unique solution."""


class DegenerateMomentsWarning(UserWarning):
    """Predictions carry no variance; falling back to the classical value."""
