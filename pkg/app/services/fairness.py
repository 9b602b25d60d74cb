"""
Allocation oracles for a single bottleneck: HRF, classic max-min and a brute-force verifier
"""
import enum
import logging
import math
from typing import Sequence

import numpy as np

from app.config import settings
from app.core.exceptions import GridTooLarge, LengthMismatch
from app.schemas.network import RateVector, Requirement
from app.schemas.results import Allocation, AllocationProblem
from app.utils.validators import validate_requirement

logger = logging.getLogger(__name__)


class Ordering(str, enum.Enum):
    """Result of a lexicographic comparison"""
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"


class ObjectiveSpace(str, enum.Enum):
    """Vector the brute-force oracle maximizes"""
    RAW = "raw"
    NORMALIZED = "normalized"


def _caps(p: AllocationProblem) -> np.ndarray:
    return np.array([
        r.max_rate if (r.bounded and p.respect_bounds) else math.inf
        for r in p.requirements
    ])


def _fill_level(
    base: np.ndarray,
    slope: np.ndarray,
    upper: np.ndarray,
    capacity: float,
) -> float:
    """
    Level theta such that sum(clamp(base + theta * slope, 0, upper)) == capacity

    Returns math.inf when every rate is capped below capacity.
    """
    def total(theta: float) -> float:
        return float(np.clip(base + theta * slope, 0.0, upper).sum())

    floors = -base / slope
    ceilings = (upper - base) / slope
    breakpoints = np.unique(np.concatenate([floors, ceilings[np.isfinite(ceilings)]]))

    previous_theta = breakpoints[0]
    previous_total = total(previous_theta)
    for theta in breakpoints[1:]:
        current = total(theta)
        if current >= capacity:
            return previous_theta + (capacity - previous_total) * (theta - previous_theta) / (current - previous_total)
        previous_theta, previous_total = theta, current

    free = ~np.isfinite(upper)
    if not free.any():
        return math.inf
    return previous_theta + (capacity - previous_total) / float(slope[free].sum())


def hrf_allocate(p: AllocationProblem) -> Allocation:
    """
    Lexicographic max-min allocation of normalized rates

    Raises a common level theta with x_i = clamp(a_i + theta * (b_i - a_i), 0, cap_i)
    until the capacity is used or every connection is capped.

    Args:
        p: Allocation problem

    Returns:
        Allocation whose theta is the normalized fill level
    """
    for req in p.requirements:
        validate_requirement(req)

    a = np.array([r.min_rate for r in p.requirements])
    w = np.array([r.width for r in p.requirements])
    caps = _caps(p)

    theta = _fill_level(a, w, caps, p.capacity)
    if math.isinf(theta):
        rates = caps
        theta = 1.0
    else:
        rates = np.clip(a + theta * w, 0.0, caps)

    normalized = (rates - a) / w
    return Allocation(
        rates=RateVector(rates=tuple(float(x) for x in rates)),
        normalized=[float(x) for x in normalized],
        theta=float(theta),
    )


def mmf_allocate(p: AllocationProblem) -> Allocation:
    """
    Classic max-min fair allocation of raw rates by water-filling

    Args:
        p: Allocation problem; bounded connections are capped at max_rate when respect_bounds

    Returns:
        Allocation whose theta is the water level in bits/s
    """
    for req in p.requirements:
        validate_requirement(req)

    n = len(p.requirements)
    caps = _caps(p)
    level = _fill_level(np.zeros(n), np.ones(n), caps, p.capacity)
    if math.isinf(level):
        rates = caps
        level = float(caps.max())
    else:
        rates = np.minimum(level, caps)

    return Allocation(
        rates=RateVector(rates=tuple(float(x) for x in rates)),
        normalized=_normalize(rates, p.requirements),
        theta=float(level),
    )


def _normalize(rates: np.ndarray, requirements: Sequence[Requirement]) -> list:
    return [float((x - r.min_rate) / r.width) for x, r in zip(rates, requirements)]


def brute_force_lex_max_min(
    p: AllocationProblem,
    grid_step: float,
    space: ObjectiveSpace = ObjectiveSpace.NORMALIZED,
) -> Allocation:
    """
    Exhaustive lexicographic max-min over a rate grid

    Args:
        p: Allocation problem (small n only)
        grid_step: Spacing of the rate grid in bits/s
        space: Maximize sorted raw rates or sorted normalized rates

    Returns:
        Allocation at the lexicographically largest sorted objective; theta is
        the smallest objective entry

    Raises:
        GridTooLarge: If the number of enumerated vectors exceeds BRUTE_FORCE_BUDGET
    """
    for req in p.requirements:
        validate_requirement(req)

    caps = np.minimum(_caps(p), p.capacity)
    axes = [np.arange(0.0, cap + grid_step * 1e-9, grid_step) for cap in caps]
    size = math.prod(len(axis) for axis in axes)
    if size > settings.BRUTE_FORCE_BUDGET:
        raise GridTooLarge(f"grid of {size} vectors exceeds budget {settings.BRUTE_FORCE_BUDGET}")

    grid = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    grid = grid[grid.sum(axis=1) <= p.capacity * (1 + 1e-12)]

    a = np.array([r.min_rate for r in p.requirements])
    w = np.array([r.width for r in p.requirements])
    objective = grid if ObjectiveSpace(space) is ObjectiveSpace.RAW else (grid - a) / w
    ranked = np.sort(np.round(objective, 9), axis=1)
    # lexsort treats its last key as primary
    best = np.lexsort(ranked.T[::-1])[-1]

    rates = grid[best]
    logger.debug("brute force searched %d vectors", len(grid))
    return Allocation(
        rates=RateVector(rates=tuple(float(x) for x in rates)),
        normalized=_normalize(rates, p.requirements),
        theta=float(ranked[best][0]),
    )


def satisfaction_ratio(avg_rate: float, req: Requirement) -> float:
    """Average achieved rate over the minimum requirement"""
    return avg_rate / req.min_rate


def lex_compare(u: Sequence[float], v: Sequence[float]) -> Ordering:
    """
    Lexicographic order of two ascending-sorted vectors

    Raises:
        LengthMismatch: If the vectors differ in length
    """
    if len(u) != len(v):
        raise LengthMismatch(f"cannot compare vectors of length {len(u)} and {len(v)}")
    for x, y in zip(u, v):
        if x < y:
            return Ordering.LESS
        if x > y:
            return Ordering.GREATER
    return Ordering.EQUAL
