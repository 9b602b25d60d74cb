"""
Schemas for oracle allocations, simulation results and summary reports
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.schemas.network import RateVector, Requirement

CSV_COLUMNS = (
    "time_s",
    "conn_id",
    "protocol",
    "state",
    "send_rate_bps",
    "throughput_bps",
    "utility",
    "rtt_ms",
    "loss_ratio",
)


class AllocationProblem(BaseModel):
    """Single-bottleneck allocation instance"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    requirements: List[Requirement] = Field(..., min_length=1)
    capacity: float = Field(..., gt=0)
    respect_bounds: bool = True


class Allocation(BaseModel):
    """Oracle output; theta is the water level reached (normalized for HRF, bits/s for MMF)"""
    model_config = ConfigDict(frozen=True)

    rates: RateVector
    normalized: List[float]
    theta: float


@dataclass
class TimeSeries:
    """Column-oriented per-row records, one row per connection per record instant"""
    time: List[float] = field(default_factory=list)
    conn_id: List[str] = field(default_factory=list)
    protocol: List[str] = field(default_factory=list)
    state: List[str] = field(default_factory=list)
    send_rate: List[float] = field(default_factory=list)
    throughput: List[float] = field(default_factory=list)
    utility: List[float] = field(default_factory=list)
    rtt: List[float] = field(default_factory=list)
    loss_ratio: List[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.time)

    def append(
        self,
        time: float,
        conn_id: str,
        protocol: str,
        state: str,
        send_rate: float,
        throughput: float,
        utility: float,
        rtt: float,
        loss_ratio: float,
    ) -> None:
        self.time.append(time)
        self.conn_id.append(conn_id)
        self.protocol.append(protocol)
        self.state.append(state)
        self.send_rate.append(send_rate)
        self.throughput.append(throughput)
        self.utility.append(utility)
        self.rtt.append(rtt)
        self.loss_ratio.append(loss_ratio)

    def rows(self):
        """CSV rows in CSV_COLUMNS order (RTT in milliseconds)"""
        for i in range(len(self.time)):
            yield (
                self.time[i],
                self.conn_id[i],
                self.protocol[i],
                self.state[i],
                self.send_rate[i],
                self.throughput[i],
                self.utility[i],
                self.rtt[i] * 1e3,
                self.loss_ratio[i],
            )

    def rates_by_connection(self) -> Dict[str, tuple]:
        """Map conn_id -> (times, send rates)"""
        grouped: Dict[str, tuple] = {}
        for t, conn, rate in zip(self.time, self.conn_id, self.send_rate):
            times, rates = grouped.setdefault(conn, ([], []))
            times.append(t)
            rates.append(rate)
        return grouped


@dataclass
class MassBalance:
    """Fluid accounting over a whole run, in bits"""
    offered: float = 0.0
    delivered: float = 0.0
    queued: float = 0.0
    random_loss: float = 0.0
    overflow_loss: float = 0.0

    @property
    def residual(self) -> float:
        return self.offered - self.delivered - self.queued - self.random_loss - self.overflow_loss


class ConnectionSummary(BaseModel):
    """Per-connection metrics of one run"""
    conn_id: str
    protocol: str
    min_rate: float
    max_rate: float
    avg_rate: float
    satisfaction: float
    oscillation: Optional[float] = None


class RunSummary(BaseModel):
    """Metrics of one simulation run"""
    seed: int
    utilization: float
    convergence_time: Optional[float] = None
    connections: List[ConnectionSummary]


@dataclass
class SimResult:
    """Time series and summary of one simulation run"""
    scenario: str
    seed: int
    series: TimeSeries
    summary: RunSummary
    mass: MassBalance = field(default_factory=MassBalance)


class ConnectionReport(BaseModel):
    """Per-connection metrics aggregated across trials"""
    conn_id: str
    protocol: str
    min_rate: float
    mean_rate: float
    mean_satisfaction: float
    worst_satisfaction: float
    mean_oscillation: Optional[float] = None


class SummaryReport(BaseModel):
    """Aggregate report of a scenario across trials"""
    scenario: str
    trials: int
    d_scale: float
    utilization_median: float
    convergence_time_median: Optional[float] = None
    convergence_times: List[Optional[float]]
    connections: List[ConnectionReport]
    hrf_reference: Allocation
    mmf_reference: Allocation
