"""
Custom validation utilities
"""
from typing import List

from app.core.exceptions import DegenerateRequirement, NonPositiveMin
from app.schemas.network import Requirement


def validate_requirement(req: Requirement) -> Requirement:
    """
    Validate a bandwidth requirement

    Args:
        req: Requirement to validate

    Returns:
        The same requirement, unchanged

    Raises:
        NonPositiveMin: If min_rate <= 0
        DegenerateRequirement: If max_rate <= min_rate
    """
    if not req.min_rate > 0:
        raise NonPositiveMin(f"min_rate must be positive, got {req.min_rate}")

    if not req.max_rate > req.min_rate:
        raise DegenerateRequirement(
            f"max_rate ({req.max_rate}) must be strictly greater than min_rate ({req.min_rate})"
        )

    return req


def requirement_errors(req: Requirement, label: str) -> List[str]:
    """
    Collect requirement violations as messages instead of raising

    Args:
        req: Requirement to check
        label: Prefix naming the owner (e.g. the connection id)

    Returns:
        List of error messages, empty when valid
    """
    try:
        validate_requirement(req)
    except (NonPositiveMin, DegenerateRequirement) as e:
        return [f"{label}: {e.message}"]
    return []


def scenario_errors(config) -> List[str]:
    """
    Semantic checks a scenario must pass on top of its schema

    Args:
        config: ScenarioConfig

    Returns:
        Every violated invariant as a message, empty when valid
    """
    errors: List[str] = []

    seen = set()
    for index, conn in enumerate(config.connections):
        label = f"connections[{index}] ({conn.id})"
        errors.extend(requirement_errors(conn.requirement, label))
        if conn.id in seen:
            errors.append(f"{label}: duplicate connection id")
        seen.add(conn.id)
        if conn.start_time >= config.duration:
            errors.append(f"{label}: start_time must be before the scenario duration")

    if config.tick > config.link.base_rtt / 4:
        errors.append(
            f"tick ({config.tick}) must be at most base_rtt/4 ({config.link.base_rtt / 4})"
        )
    if config.record_interval < config.tick:
        errors.append("record_interval must be at least one tick")
    if config.warmup >= config.duration:
        errors.append("warmup must be shorter than the duration")

    return errors
