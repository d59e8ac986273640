"""Foundational numeric primitives for Wald-test planning.

Standard normal CDF and quantile, the test/design parameter bundle, and the
variance threshold that every labeled-sample-size inversion compares an
estimator variance against.  All tests in this package are two-sided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "DesignInputs",
    "normal_cdf",
    "normal_quantile",
    "variance_threshold",
]

_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class DesignInputs:
    """Test level, target power, effect size, and null value.

    ``delta`` is the effect size on the scale of the estimand (log scale for
    relative-risk and odds-ratio designs).  ``theta0`` is the null value of
    the estimand and defaults to zero.
    """

    alpha: float
    target_power: float
    delta: float
    theta0: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"alpha must be in (0, 1), got {self.alpha}")
        if not (0.0 < self.target_power < 1.0):
            raise DomainError(
                f"target_power must be in (0, 1), got {self.target_power}"
            )
        if self.target_power <= self.alpha:
            raise DomainError(
                "target_power must exceed alpha "
                f"(got power={self.target_power}, alpha={self.alpha})"
            )
        if not math.isfinite(self.delta):
            raise DomainError("delta must be finite")
        if not math.isfinite(self.theta0):
            raise DomainError("theta0 must be finite")

    @property
    def z_alpha(self) -> float:
        """Two-sided critical value z_{1-alpha/2}."""
        return normal_quantile(1.0 - self.alpha / 2.0)

    @property
    def z_power(self) -> float:
        """Target-power quantile z_{1-beta}."""
        return normal_quantile(self.target_power)


def normal_cdf(z: float) -> float:
    """Standard normal CDF via the complementary error function.

    Accurate to well under 1e-12 absolute error over the full real line.
    """
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"normal_cdf requires a finite argument, got {z}")
    return 0.5 * math.erfc(-z / _SQRT2)


def _normal_pdf(z: float) -> float:
    return math.exp(-0.5 * z * z) / _SQRT_2PI


# Rational approximation coefficients (Acklam), |relative error| < 1.15e-9
# before refinement.
_ACKLAM_A = (
    -3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
    1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00,
)
_ACKLAM_B = (
    -5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
    6.680131188771972e01, -1.328068155288572e01,
)
_ACKLAM_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
    -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00,
)
_ACKLAM_D = (
    7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
    3.754408661907416e00,
)
_ACKLAM_P_LOW = 0.02425


def normal_quantile(q: float) -> float:
    """Inverse of :func:`normal_cdf` on (0, 1).

    Acklam's rational approximation followed by one Halley refinement step
    against the erfc-based CDF, giving near machine precision.
    """
    q = float(q)
    if not (0.0 < q < 1.0) or not math.isfinite(q):
        raise DomainError(f"normal_quantile requires q in (0, 1), got {q}")

    a, b, c, d = _ACKLAM_A, _ACKLAM_B, _ACKLAM_C, _ACKLAM_D
    if q < _ACKLAM_P_LOW:
        u = math.sqrt(-2.0 * math.log(q))
        x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) / (
            (((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0
        )
    elif q <= 1.0 - _ACKLAM_P_LOW:
        u = q - 0.5
        r = u * u
        x = (
            (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5])
            * u
            / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
        )
    else:
        u = math.sqrt(-2.0 * math.log(1.0 - q))
        x = -(
            (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5])
            / ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0)
        )

    # One Halley step; the pdf cannot underflow for |x| produced above.
    err = normal_cdf(x) - q
    t = err * _SQRT_2PI * math.exp(0.5 * x * x)
    x -= t / (1.0 + 0.5 * x * t)
    return x


def variance_threshold(d: DesignInputs) -> float:
    """Largest estimator variance compatible with the design targets.

    Returns ``(delta / (z_{1-alpha/2} + z_{1-beta}))**2``.  An estimator of
    the target with asymptotic variance at or below this value attains the
    target power in the two-sided Wald test, up to the usual planning
    approximation of dropping the far-tail term.
    """
    if d.delta == 0.0:
        return 0.0
    scale = d.z_alpha + d.z_power
    return (d.delta / scale) ** 2
