"""
Pydantic schemas for the shared network domain types
"""
from typing import Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.utils.stats import least_squares_slope, population_stddev


class Requirement(BaseModel):
    """
    Minimum/maximum bandwidth band of one connection (bits/second)

    Invariants are enforced by validate_requirement rather than on construction,
    so that configuration errors surface with their domain error type.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    min_rate: float
    max_rate: float
    bounded: bool = False

    @property
    def width(self) -> float:
        return self.max_rate - self.min_rate


class CoefficientSet(BaseModel):
    """Utility-function constants"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    t: float = Field(0.9, gt=0, le=1)
    beta: float = Field(11.35, ge=0)
    gamma: float = Field(25.0, gt=0)
    phi: float = Field(750.0, ge=0)
    d_scale: float = Field(2.0, ge=1)
    # Multipliers for the loss, latency-gradient and rtt-stddev terms
    penalty_signs: Tuple[int, int, int] = (1, 1, 1)

    @field_validator("penalty_signs")
    @classmethod
    def validate_signs(cls, v):
        if any(sign not in (-1, 1) for sign in v):
            raise ValueError("penalty_signs entries must be +1 or -1")
        return v


class IntervalStats(BaseModel):
    """Feedback gathered over one measurement interval"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    avg_rate: float = Field(..., ge=0)
    loss_ratio: float = Field(..., ge=0, le=1)
    rtt_samples: Tuple[Tuple[float, float], ...] = ()
    rtt_gradient: float = 0.0
    rtt_stddev: float = Field(0.0, ge=0)
    duration: float = Field(..., gt=0)

    @classmethod
    def from_samples(
        cls,
        rtt_samples: Sequence[Tuple[float, float]],
        avg_rate: float,
        loss_ratio: float,
        duration: float,
    ) -> "IntervalStats":
        """Build stats whose gradient and stddev are derived from the RTT samples"""
        samples = tuple((float(t), float(rtt)) for t, rtt in rtt_samples)
        return cls(
            avg_rate=avg_rate,
            loss_ratio=min(1.0, max(0.0, loss_ratio)),
            rtt_samples=samples,
            rtt_gradient=least_squares_slope(samples),
            rtt_stddev=population_stddev(samples),
            duration=duration,
        )

    @property
    def mean_rtt(self) -> float:
        if not self.rtt_samples:
            return 0.0
        return sum(rtt for _, rtt in self.rtt_samples) / len(self.rtt_samples)


class RateVector(BaseModel):
    """Per-connection rates indexed by connection position"""
    model_config = ConfigDict(frozen=True)

    rates: Tuple[float, ...]

    @field_validator("rates")
    @classmethod
    def validate_non_negative(cls, v):
        if any(rate < 0 for rate in v):
            raise ValueError("rates must be non-negative")
        return v

    def __len__(self) -> int:
        return len(self.rates)

    def __getitem__(self, index: int) -> float:
        return self.rates[index]
