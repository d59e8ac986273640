"""Turn accuracy summaries or pilot data into second-order planning inputs.

Every planning formula in this package consumes a :class:`MomentSet`: the
outcome variance, the prediction variance, and their covariance.  Model
documentation rarely reports those directly, so this module converts the
summaries practitioners actually have — R² or MSE for continuous predictors,
prevalence/sensitivity/specificity for binary classifiers, or raw pilot
(outcome, prediction) pairs.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DegenerateMomentsError, DegenerateMomentsWarning, DomainError

__all__ = [
    "MomentSet",
    "BinaryMetrics",
    "PilotSample",
    "calibrate_binary",
    "calibrate_continuous",
    "estimate_moments",
    "plugin_lambda",
]

_CS_TOL = 1e-12


@dataclass(frozen=True)
class MomentSet:
    """Second-order moments of (outcome Y, prediction f).

    ``conservative`` is set when the moments were built from an MSE lower
    bound, in which case the implied correlation understates the truth and
    plans based on it err toward more labels.
    """

    var_y: float
    var_f: float
    cov_yf: float
    conservative: bool = False

    def __post_init__(self):
        for name in ("var_y", "var_f", "cov_yf"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v}")
        if self.var_y < 0 or self.var_f < 0:
            raise DomainError("variances must be nonnegative")
        bound = self.var_y * self.var_f
        if self.cov_yf**2 > bound * (1.0 + _CS_TOL) + _CS_TOL:
            raise DomainError(
                f"cov_yf^2={self.cov_yf**2:.6g} violates Cauchy-Schwarz "
                f"bound var_y*var_f={bound:.6g}"
            )

    @property
    def rho(self) -> float:
        """Outcome-prediction correlation, clamped to [-1, 1]."""
        denom = math.sqrt(self.var_y * self.var_f)
        if denom == 0.0:
            return 0.0
        return max(-1.0, min(1.0, self.cov_yf / denom))

    @property
    def rho2(self) -> float:
        return self.rho**2

    @property
    def var_eps(self) -> float:
        """Residual variance Var(Y - f), floored at zero against rounding."""
        return max(0.0, self.var_y + self.var_f - 2.0 * self.cov_yf)


@dataclass(frozen=True)
class BinaryMetrics:
    """Prevalence, sensitivity, and specificity of a binary classifier."""

    prevalence: float
    sensitivity: float
    specificity: float

    def __post_init__(self):
        for name in ("prevalence", "sensitivity", "specificity"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise DomainError(f"{name} must be in [0, 1], got {v}")


def calibrate_binary(m: BinaryMetrics) -> MomentSet:
    """Moments of a binary outcome paired with a binary classifier.

    With prevalence ``p``, sensitivity ``se`` and specificity ``sp``, the
    prediction prevalence is ``p_f = se*p + (1-sp)*(1-p)`` and the moments
    follow from the joint law of (Y, f):

        var_y = p(1-p),  var_f = p_f(1-p_f),  cov_yf = se*p - p*p_f

    Raises :class:`DegenerateMomentsError` when the outcome never varies
    (``p`` equal to 0 or 1).
    """
    p, se, sp = m.prevalence, m.sensitivity, m.specificity
    if p in (0.0, 1.0):
        raise DegenerateMomentsError(
            f"outcome prevalence {p} gives zero outcome variance; "
            "planning is undefined for a constant outcome"
        )
    p_f = se * p + (1.0 - sp) * (1.0 - p)
    return MomentSet(
        var_y=p * (1.0 - p),
        var_f=p_f * (1.0 - p_f),
        cov_yf=se * p - p * p_f,
    )


def calibrate_continuous(
    var_y: float,
    r2: float | None = None,
    mse: float | None = None,
) -> MomentSet:
    """Moments for a continuous outcome from a reported R² or MSE.

    Exactly one of ``r2`` or ``mse`` must be given.  A reported R² maps
    directly to the squared outcome-prediction correlation.  A reported MSE
    only bounds it: by Cauchy-Schwarz the residual variance is at least
    ``var_y*(1-rho²)``, so ``rho² = max(0, 1 - mse/var_y)`` is a conservative
    planning input, and the result is flagged as such.  An MSE above
    ``var_y`` simply means the predictions are treated as useless (rho = 0).

    The returned moments use the canonical representation ``var_f = var_y``
    with ``cov_yf = var_y * rho``; the one-sample formulas depend on the
    moments only through ``var_y`` and ``rho²``, so this choice is
    observationally equivalent for planning.
    """
    if not (math.isfinite(var_y) and var_y > 0):
        raise DomainError(f"var_y must be positive and finite, got {var_y}")
    if (r2 is None) == (mse is None):
        raise DomainError("supply exactly one of r2 or mse")
    if r2 is not None:
        if not (0.0 <= r2 <= 1.0):
            raise DomainError(f"r2 must be in [0, 1], got {r2}")
        rho2 = r2
        conservative = False
    else:
        if not (math.isfinite(mse) and mse >= 0.0):
            raise DomainError(f"mse must be nonnegative and finite, got {mse}")
        rho2 = max(0.0, 1.0 - mse / var_y)
        conservative = True
    return MomentSet(
        var_y=var_y,
        var_f=var_y,
        cov_yf=var_y * math.sqrt(rho2),
        conservative=conservative,
    )


@dataclass(frozen=True)
class PilotSample:
    """Paired (outcome, prediction) observations from a pilot study."""

    y: tuple[float, ...]
    f: tuple[float, ...]
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.y) != len(self.f):
            raise DomainError(
                f"y and f must have equal length, got {len(self.y)} and {len(self.f)}"
            )
        if len(self.y) < 2:
            raise DomainError("a pilot sample needs at least 2 pairs")
        for name, col in (("y", self.y), ("f", self.f)):
            if not all(math.isfinite(v) for v in col):
                raise DomainError(f"pilot column {name!r} contains non-finite values")

    @classmethod
    def from_pairs(
        cls, pairs: Iterable[tuple[float, float]], label: str | None = None
    ) -> "PilotSample":
        ys, fs = [], []
        for y, f in pairs:
            ys.append(float(y))
            fs.append(float(f))
        return cls(y=tuple(ys), f=tuple(fs), label=label)

    @classmethod
    def from_csv(cls, path: str | Path, label: str | None = None) -> "PilotSample":
        """Read a two-column ``y,f`` CSV; parse errors name the row."""
        path = Path(path)
        ys, fs = [], []
        with path.open(newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header is None:
                raise DomainError(f"{path}: empty pilot file")
            cols = [c.strip().lower() for c in header]
            if cols[:2] != ["y", "f"]:
                raise DomainError(
                    f"{path}: expected header 'y,f', got {','.join(header)}"
                )
            for row_number, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) < 2:
                    raise DomainError(f"{path}: row {row_number}: expected 2 columns")
                try:
                    ys.append(float(row[0]))
                    fs.append(float(row[1]))
                except ValueError as exc:
                    raise DomainError(
                        f"{path}: row {row_number}: could not parse {row[:2]!r}"
                    ) from exc
        return cls(y=tuple(ys), f=tuple(fs), label=label)

    def __len__(self) -> int:
        return len(self.y)


def _sample_moments(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, var


def estimate_moments(pilot: PilotSample) -> MomentSet:
    """Unbiased sample moments from pilot pairs (denominator n-1).

    Raises :class:`DegenerateMomentsError` naming the constant column when
    either the outcomes or the predictions carry no variance.  The implied
    correlation is protected against rounding past ±1 by the
    :class:`MomentSet` accessor.
    """
    n = len(pilot)
    mean_y, var_y = _sample_moments(pilot.y)
    mean_f, var_f = _sample_moments(pilot.f)
    if var_y == 0.0:
        raise DegenerateMomentsError(
            "pilot column 'y' is constant: zero outcome variance"
        )
    if var_f == 0.0:
        raise DegenerateMomentsError(
            "pilot column 'f' is constant: zero prediction variance"
        )
    cov = sum(
        (y - mean_y) * (f - mean_f) for y, f in zip(pilot.y, pilot.f)
    ) / (n - 1)
    # Same-sample covariance satisfies Cauchy-Schwarz; snap rounding excess.
    bound = math.sqrt(var_y * var_f)
    cov = max(-bound, min(bound, cov))
    return MomentSet(var_y=var_y, var_f=var_f, cov_yf=cov)


def plugin_lambda(
    pilot: PilotSample,
    r: float,
    clamp: tuple[float, float] | None = None,
) -> float:
    """Plug-in estimate of the variance-minimizing prediction weight.

    Evaluates ``cov_yf / ((1+r) * var_f)`` on the pilot sample moments,
    where ``r`` is the planned labeled-to-unlabeled ratio n/N.  The value is
    not clamped unless a ``clamp`` range is given.  A zero prediction
    variance yields 0 with a :class:`DegenerateMomentsWarning` (the design
    falls back to the classical test).
    """
    if r < 0:
        raise DomainError(f"ratio r must be nonnegative, got {r}")
    try:
        m = estimate_moments(pilot)
    except DegenerateMomentsError as exc:
        if "'f'" in str(exc):
            warnings.warn(
                "pilot predictions have zero variance; plug-in lambda set to 0",
                DegenerateMomentsWarning,
                stacklevel=2,
            )
            return 0.0
        raise
    lam = m.cov_yf / ((1.0 + r) * m.var_f)
    if clamp is not None:
        lo, hi = clamp
        lam = max(lo, min(hi, lam))
    return lam
