"""
Pydantic schemas for scenario files and controller configuration
"""
import enum
from bisect import bisect_right
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.config import settings
from app.schemas.network import CoefficientSet, Requirement
from app.utils.units import bdp_bits


class Protocol(str, enum.Enum):
    """Rate controller driving a connection"""
    HERCULES = "hercules"
    VIVACE_LIKE = "vivace_like"
    AIMD = "aimd"


class ControllerConfig(BaseModel):
    """Hercules rate-control parameters"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    initial_rate_cap: float = Field(5_000.0, gt=0, description="Slow-start starting rate cap, bits/s")
    delta: float = Field(0.05, gt=0, lt=1, description="Probe perturbation fraction")
    step_fraction: float = Field(0.05, gt=0, lt=1, description="Fixed multiplicative step used when step_gain is 0")
    step_gain: float = Field(0.3, ge=0, description="Step per unit of normalized utility gradient; 0 selects fixed steps")
    max_step: float = Field(0.2, gt=0, lt=1, description="Largest gradient-scaled step")
    penalty_gain: float = Field(0.06, gt=0, le=1, description="EWMA gain of the congestion penalty")
    rate_floor: float = Field(1_000.0, gt=0, description="Lowest rate ever emitted, bits/s")
    min_interval: float = Field(0.010, gt=0, description="Floor of the update interval, seconds")
    interval_rtt_multiple: float = Field(1.0, gt=0, description="Update interval in smoothed RTTs")
    utility_unit: float = Field(1e6, gt=0, description="Rate divisor applied inside the fair-share utility")
    requirement_unit: bool = Field(True, description="Hercules measures rates in multiples of min_rate")
    tie_tolerance: float = Field(1e-12, ge=0, description="Relative probe gap treated as a tie")

    def interval_policy(self, smoothed_rtt: Optional[float]) -> float:
        """Update-interval length for a smoothed RTT (None before the first sample)"""
        if smoothed_rtt is None:
            return self.min_interval
        return max(smoothed_rtt * self.interval_rtt_multiple, self.min_interval)

    def step_for(self, gradient: float) -> float:
        """Multiplicative step for a utility gradient normalized by (x/u)^t"""
        if self.step_gain == 0:
            return self.step_fraction
        return min(abs(gradient) * self.step_gain, self.max_step)

    def hercules_unit(self, req: Requirement) -> float:
        return req.min_rate if self.requirement_unit else self.utility_unit


class VivaceLikeConfig(BaseModel):
    """Fair-share online-learning baseline: Hercules machinery with H = 1 and phi = 0"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    t: float = Field(0.9, gt=0, le=1)
    beta: float = Field(11.35, ge=0)
    gamma: float = Field(25.0, gt=0)

    def as_coefficients(self) -> CoefficientSet:
        return CoefficientSet(t=self.t, beta=self.beta, gamma=self.gamma, phi=0.0)


class AimdConfig(BaseModel):
    """Rate-based Reno-style baseline"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    additive_increase: float = Field(500_000.0, gt=0, description="Bits/s added per RTT")
    multiplicative_decrease: float = Field(0.5, gt=0, lt=1)
    loss_threshold: float = Field(0.0, ge=0, le=1, description="Loss ratio above which the rate is cut")
    initial_rate: float = Field(5_000.0, gt=0)


class CapacitySegment(BaseModel):
    """Bottleneck capacity from start_time until the next segment"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    start_time: float = Field(..., ge=0)
    capacity: float = Field(..., gt=0)


class LinkModel(BaseModel):
    """Single shared bottleneck"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    capacity_schedule: List[CapacitySegment] = Field(..., min_length=1)
    base_rtt: float = Field(..., gt=0)
    buffer_bdp: Optional[float] = Field(None, ge=0, description="Buffer as a multiple of the initial BDP")
    buffer_bytes: Optional[float] = Field(None, ge=0)
    random_loss: float = Field(0.0, ge=0, le=1)

    @model_validator(mode="after")
    def validate_link(self):
        if (self.buffer_bdp is None) == (self.buffer_bytes is None):
            raise ValueError("exactly one of buffer_bdp or buffer_bytes must be given")
        times = [segment.start_time for segment in self.capacity_schedule]
        if times[0] != 0:
            raise ValueError("capacity_schedule must start at time 0")
        if any(later <= earlier for earlier, later in zip(times, times[1:])):
            raise ValueError("capacity_schedule times must be strictly increasing")
        return self

    @property
    def initial_capacity(self) -> float:
        return self.capacity_schedule[0].capacity

    def capacity_at(self, time: float) -> float:
        """Capacity in force at a given time"""
        times = [segment.start_time for segment in self.capacity_schedule]
        index = max(0, bisect_right(times, time) - 1)
        return self.capacity_schedule[index].capacity

    def buffer_bits(self) -> float:
        """Buffer size in bits; BDP multiples resolve against the first segment"""
        if self.buffer_bytes is not None:
            return self.buffer_bytes * 8.0
        return self.buffer_bdp * bdp_bits(self.initial_capacity, self.base_rtt)


class ConnectionSpec(BaseModel):
    """One connection of a scenario"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str = Field(..., min_length=1)
    requirement: Requirement
    protocol: Protocol = Protocol.HERCULES
    start_time: float = Field(0.0, ge=0)
    stop_time: Optional[float] = None

    @model_validator(mode="after")
    def validate_window(self):
        if self.stop_time is not None and self.stop_time <= self.start_time:
            raise ValueError("stop_time must be greater than start_time")
        return self

    def is_active(self, time: float) -> bool:
        if time < self.start_time:
            return False
        return self.stop_time is None or time < self.stop_time


class ScenarioConfig(BaseModel):
    """Declarative description of one experiment"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(..., min_length=1)
    description: str = ""
    link: LinkModel
    connections: List[ConnectionSpec] = Field(..., min_length=1)
    coefficients: CoefficientSet = CoefficientSet()
    controller: ControllerConfig = ControllerConfig()
    vivace: VivaceLikeConfig = VivaceLikeConfig()
    aimd: AimdConfig = AimdConfig()
    duration: float = Field(..., gt=0)
    tick: float = Field(settings.DEFAULT_TICK, gt=0)
    record_interval: float = Field(settings.RECORD_INTERVAL, gt=0)
    warmup: float = Field(0.0, ge=0, description="Seconds excluded from summary metrics")
    seed: int = Field(0, ge=0, lt=2 ** 64)
    trials: int = Field(1, ge=1)
    output_dir: Optional[str] = None
