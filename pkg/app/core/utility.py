"""
Utility function: normalized rate, requirement penalty and congestion penalty
"""
import math
from typing import NamedTuple

from app.schemas.network import CoefficientSet, IntervalStats, Requirement

# Dimensionless position of a rate inside its requirement band
NormalizedRate = float


class UtilityValue(NamedTuple):
    """Evaluated utility together with the inputs that produced it"""
    value: float
    rate: float
    penalty: float


def normalized_rate(x: float, req: Requirement) -> NormalizedRate:
    """
    Position of a rate relative to its requirement band

    Args:
        x: Rate in bits/second
        req: Validated requirement

    Returns:
        (x - a) / (b - a); 0 at the minimum, 1 at the maximum
    """
    return (x - req.min_rate) / (req.max_rate - req.min_rate)


def requirement_penalty(xbar: NormalizedRate, d_scale: float) -> float:
    """
    Arctan-shaped requirement penalty H in the open interval (0, 1)

    Args:
        xbar: Normalized rate (may be infinite)
        d_scale: Steepness D >= 1

    Returns:
        arctan(D * (xbar - 1/2)) / pi + 1/2
    """
    return math.atan(d_scale * (xbar - 0.5)) / math.pi + 0.5


def congestion_penalty(stats: IntervalStats, coeffs: CoefficientSet) -> float:
    """
    Bracketed congestion term of the utility, clamped at zero

    Args:
        stats: Interval feedback
        coeffs: Coefficient set

    Returns:
        beta * loss + gamma * max(0, dRTT/dt) + phi * sigma(RTT), never negative
    """
    loss_sign, gradient_sign, stddev_sign = coeffs.penalty_signs
    bracket = (
        loss_sign * coeffs.beta * stats.loss_ratio
        + gradient_sign * coeffs.gamma * max(0.0, stats.rtt_gradient)
        + stddev_sign * coeffs.phi * stats.rtt_stddev
    )
    return max(0.0, bracket)


def vivace_penalty(stats: IntervalStats, coeffs: CoefficientSet) -> float:
    """Fair-share congestion term beta * loss + gamma * max(0, dRTT/dt), clamped at zero"""
    loss_sign, gradient_sign, _ = coeffs.penalty_signs
    return max(
        0.0,
        loss_sign * coeffs.beta * stats.loss_ratio
        + gradient_sign * coeffs.gamma * max(0.0, stats.rtt_gradient),
    )


def priced_utility(
    x: float,
    req: Requirement,
    penalty: float,
    coeffs: CoefficientSet,
    rate_unit: float = 1.0,
) -> float:
    """
    Hercules utility of rate x under a given congestion penalty

    Args:
        x: Rate in bits/second (> 0)
        req: Validated requirement
        penalty: Congestion penalty, already clamped at zero
        coeffs: Coefficient set
        rate_unit: Divisor applied to x before the power and linear terms

    Returns:
        (x/u)^t - (x/u) * H(xbar) * penalty
    """
    scaled = x / rate_unit
    value = scaled ** coeffs.t
    if penalty > 0.0:
        value -= scaled * requirement_penalty(normalized_rate(x, req), coeffs.d_scale) * penalty
    return value


def priced_vivace_utility(x: float, penalty: float, coeffs: CoefficientSet, rate_unit: float = 1.0) -> float:
    """Fair-share utility of rate x under a given congestion penalty"""
    scaled = x / rate_unit
    return scaled ** coeffs.t - scaled * penalty


def utility(
    x: float,
    req: Requirement,
    stats: IntervalStats,
    coeffs: CoefficientSet,
    rate_unit: float = 1.0,
) -> UtilityValue:
    """
    Hercules utility of sending at rate x

    Args:
        x: Sending rate in bits/second (> 0)
        req: Validated requirement
        stats: Feedback measured while sending at x
        coeffs: Coefficient set
        rate_unit: Divisor applied to x before the power and linear terms

    Returns:
        UtilityValue with value x^t - x * H(xbar) * penalty
    """
    penalty = congestion_penalty(stats, coeffs)
    return UtilityValue(value=priced_utility(x, req, penalty, coeffs, rate_unit), rate=x, penalty=penalty)


def vivace_utility(
    x: float,
    stats: IntervalStats,
    coeffs: CoefficientSet,
    rate_unit: float = 1.0,
) -> UtilityValue:
    """Fair-share utility x^t - x * (beta * loss + gamma * max(0, dRTT/dt))"""
    penalty = vivace_penalty(stats, coeffs)
    return UtilityValue(value=priced_vivace_utility(x, penalty, coeffs, rate_unit), rate=x, penalty=penalty)


def utility_gradient(
    x: float,
    req: Requirement,
    stats: IntervalStats,
    coeffs: CoefficientSet,
    rate_unit: float = 1.0,
    rel_step: float = 1e-4,
) -> float:
    """Central finite-difference dU/dx with the feedback held fixed"""
    h = x * rel_step
    upper = utility(x + h, req, stats, coeffs, rate_unit).value
    lower = utility(x - h, req, stats, coeffs, rate_unit).value
    return (upper - lower) / (2 * h)
