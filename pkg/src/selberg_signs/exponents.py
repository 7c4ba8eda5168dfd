"""Admissibility thresholds and exponent formulas for sign-change counts.

Everything here is closed-form arithmetic in (theta, kappa, epsilon) with
delta = sqrt(2 - 2*kappa + epsilon).  Two regimes meet at theta = 1/2: the
high-theta branch, where the detection window length is tuned against the
subconvexity exponent, and the low-theta branch with window X^(6*delta).
At the boundary both formulas apply; the threshold is taken from the
high-theta branch (the admissibility constant 0.9971...) and the count
exponent as the larger branch value, with both recorded in the report.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

logger = logging.getLogger(__name__)

__all__ = [
    "ExponentInputs",
    "ExponentReport",
    "kappa_threshold",
    "delta_of",
    "delta_max",
    "h_exponent",
    "h_exponent_window",
    "signchange_exponent",
    "convexity_theta",
    "gsp4_corollary",
    "exponent_report",
]

# kappa threshold for theta <= 1/2: the root of 36*(2-2k) = (2k-1)^2.
_LOW_THETA_THRESHOLD = -17.0 / 2.0 + 3.0 * math.sqrt(10.0)


def kappa_threshold(theta: float) -> float:
    """Least kappa admissible at the given theta.

    theta >= 1/2 uses 1 - 1/(2*(7t+3+sqrt((7t+3)^2+2))^2); below 1/2 the
    threshold is the constant -17/2 + 3*sqrt(10) ~ 0.986833.
    """
    if theta < 0:
        raise ValueError(f"theta must be >= 0, got {theta}")
    if theta < 0.5:
        return _LOW_THETA_THRESHOLD
    b = 7.0 * theta + 3.0
    return 1.0 - 1.0 / (2.0 * (b + math.sqrt(b * b + 2.0)) ** 2)


def delta_of(kappa: float, epsilon: float) -> float:
    """delta = sqrt(2 - 2*kappa + epsilon)."""
    radicand = 2.0 - 2.0 * kappa + epsilon
    if radicand < 0:
        raise ValueError(f"negative radicand 2 - 2*kappa + epsilon = {radicand}")
    return math.sqrt(radicand)


def delta_max(theta: float) -> Optional[float]:
    """Largest delta compatible with the window constraint, for theta >= 1/2.

    Returns None below theta = 1/2, where the constraint does not apply.
    """
    if theta < 0.5:
        return None
    b = 7.0 * theta + 3.0
    return 1.0 / (b + math.sqrt(b * b + 2.0))


def h_exponent_window(delta: float) -> tuple:
    """The admissible window-exponent range [6*delta, 1 - 6*delta]."""
    return 6.0 * delta, 1.0 - 6.0 * delta


def h_exponent(theta: float, delta: float) -> float:
    """Window-length exponent: the tuned value for theta >= 1/2, else 6*delta.

    The exponent is checked against [6*delta, 1 - 6*delta]; violations are
    logged, not raised, since the formula itself stays well defined.
    """
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    if theta >= 0.5:
        value = 1.0 + delta - 1.0 / (2.0 * theta) + (6.0 * delta + 2.0 * delta * delta) / (2.0 * theta)
    else:
        value = 6.0 * delta
    lo, hi = h_exponent_window(delta)
    if not (lo - 1e-12 <= value <= hi + 1e-12):
        logger.warning(
            "window exponent %.6f outside [%.6f, %.6f] at theta=%g delta=%g",
            value, lo, hi, theta, delta,
        )
    return value


def signchange_exponent(theta: float, kappa: float, epsilon: float) -> float:
    """Exponent e with at least X^e sign changes among the first X coefficients.

    High branch: 2k - 2 + 1/(2t) - d - (6d + 2d^2)/(2t); low branch:
    2k - 1 - 6d, with d = delta_of(kappa, epsilon).  At theta = 1/2 the
    stronger (larger) branch value is returned.
    """
    if theta < 0:
        raise ValueError(f"theta must be >= 0, got {theta}")
    delta = delta_of(kappa, epsilon)
    if theta > 0.5:
        return _high_branch(theta, kappa, delta)
    if theta < 0.5:
        return _low_branch(kappa, delta)
    return max(_high_branch(theta, kappa, delta), _low_branch(kappa, delta))


def _high_branch(theta: float, kappa: float, delta: float) -> float:
    return (
        2.0 * kappa - 2.0 + 1.0 / (2.0 * theta)
        - delta - (6.0 * delta + 2.0 * delta * delta) / (2.0 * theta)
    )


def _low_branch(kappa: float, delta: float) -> float:
    return 2.0 * kappa - 1.0 - 6.0 * delta


def convexity_theta(d: int) -> float:
    """Unconditional subconvexity exponent d/4 for a degree-d family."""
    if d < 1:
        raise ValueError(f"degree must be >= 1, got {d}")
    return d / 4.0


def gsp4_corollary(theta: float) -> float:
    """Count exponent for the spinor family at kappa = 1: 1/(2*theta) as delta -> 0."""
    if theta < 0.5:
        raise ValueError(f"the spinor parameterization assumes theta >= 1/2, got {theta}")
    return signchange_exponent(theta, 1.0, 0.0)


@dataclass(frozen=True)
class ExponentInputs:
    """Validated (theta, kappa, epsilon) triple; theta falls back to degree/4."""

    kappa: float
    epsilon: float = 0.0
    theta: Optional[float] = None
    degree_d: Optional[int] = None

    def __post_init__(self):
        if self.theta is None:
            if self.degree_d is None:
                raise ValueError("either theta or degree_d must be given")
            object.__setattr__(self, "theta", convexity_theta(self.degree_d))
        if self.theta < 0:
            raise ValueError(f"theta must be >= 0, got {self.theta}")
        if not 0 < self.kappa <= 1:
            raise ValueError(f"kappa must lie in (0, 1], got {self.kappa}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if 2.0 - 2.0 * self.kappa + self.epsilon < 0:
            raise ValueError("2 - 2*kappa + epsilon must be nonnegative")


@dataclass(frozen=True)
class ExponentReport:
    """Admissibility verdict with the derived delta, window, and count exponents."""

    theta: float
    kappa: float
    epsilon: float
    admissible: bool
    kappa_threshold: float
    delta: float
    delta_max: Optional[float]
    h_exponent: float
    h_in_window: bool
    signchange_exponent: float
    branch: str
    boundary_detail: Optional[dict] = None


def exponent_report(inputs: ExponentInputs) -> ExponentReport:
    """Assemble the full report for one (theta, kappa, epsilon) triple."""
    theta, kappa, eps = inputs.theta, inputs.kappa, inputs.epsilon
    threshold = kappa_threshold(theta)
    delta = delta_of(kappa, eps)
    dmax = delta_max(theta)
    h_val = h_exponent(theta, delta)
    lo, hi = h_exponent_window(delta)
    exponent = signchange_exponent(theta, kappa, eps)

    detail = None
    if theta == 0.5:
        # Both regimes apply exactly at the boundary; record the disagreement.
        detail = {
            "kappa_threshold_high": kappa_threshold(0.5),
            "kappa_threshold_low": _LOW_THETA_THRESHOLD,
            "exponent_high": _high_branch(0.5, kappa, delta),
            "exponent_low": _low_branch(kappa, delta),
        }
        logger.info(
            "theta = 1/2 boundary: thresholds %(kappa_threshold_high).6f / "
            "%(kappa_threshold_low).6f, exponents %(exponent_high).6f / %(exponent_low).6f",
            detail,
        )

    return ExponentReport(
        theta=theta,
        kappa=kappa,
        epsilon=eps,
        admissible=kappa >= threshold,
        kappa_threshold=threshold,
        delta=delta,
        delta_max=dmax,
        h_exponent=h_val,
        h_in_window=lo - 1e-12 <= h_val <= hi + 1e-12,
        signchange_exponent=exponent,
        branch="high_theta" if theta >= 0.5 else "low_theta",
        boundary_detail=detail,
    )
