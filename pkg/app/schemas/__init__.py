"""
Pydantic schemas for the network domain, scenarios and results
"""
from app.schemas.network import (
    CoefficientSet,
    IntervalStats,
    RateVector,
    Requirement,
)

from app.schemas.scenario import (
    AimdConfig,
    CapacitySegment,
    ConnectionSpec,
    ControllerConfig,
    LinkModel,
    Protocol,
    ScenarioConfig,
    VivaceLikeConfig,
)

from app.schemas.results import (
    Allocation,
    AllocationProblem,
    RunSummary,
    SimResult,
    SummaryReport,
    TimeSeries,
)

__all__ = [
    # Network
    "CoefficientSet",
    "IntervalStats",
    "RateVector",
    "Requirement",
    # Scenario
    "AimdConfig",
    "CapacitySegment",
    "ConnectionSpec",
    "ControllerConfig",
    "LinkModel",
    "Protocol",
    "ScenarioConfig",
    "VivaceLikeConfig",
    # Results
    "Allocation",
    "AllocationProblem",
    "RunSummary",
    "SimResult",
    "SummaryReport",
    "TimeSeries",
]
