"""
Discrete-time fluid simulator of a single shared bottleneck
"""
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Deque, Dict, List, Optional, Tuple

import numpy as np

from app.config import settings
from app.core.exceptions import EmptyWindow
from app.schemas.network import IntervalStats, Requirement
from app.schemas.results import MassBalance, SimResult, TimeSeries
from app.schemas.scenario import ConnectionSpec, LinkModel, Protocol, ScenarioConfig
from app.services.baselines import AimdController, VivaceLikeController
from app.services.metrics import summarize_run
from app.services.rate_control import HerculesController, RateController

logger = logging.getLogger(__name__)

# Slack for comparing tick times against interval boundaries
TIME_EPS = 1e-9


def _hercules(req: Requirement, scenario: ScenarioConfig, rng: np.random.Generator) -> RateController:
    return HerculesController(req, scenario.coefficients, scenario.controller, rng)


def _vivace(req: Requirement, scenario: ScenarioConfig, rng: np.random.Generator) -> RateController:
    return VivaceLikeController(req, scenario.controller, scenario.vivace, rng)


def _aimd(req: Requirement, scenario: ScenarioConfig, rng: np.random.Generator) -> RateController:
    return AimdController(req, scenario.controller, scenario.aimd)


CONTROLLER_FACTORIES: Dict[Protocol, Callable[..., RateController]] = {
    Protocol.HERCULES: _hercules,
    Protocol.VIVACE_LIKE: _vivace,
    Protocol.AIMD: _aimd,
}


def create_controller(
    protocol: Protocol,
    req: Requirement,
    scenario: ScenarioConfig,
    rng: Optional[np.random.Generator] = None,
) -> RateController:
    """
    Build the controller for one connection

    Args:
        protocol: Controller family
        req: Validated requirement of the connection
        scenario: Scenario supplying coefficients and controller parameters
        rng: Generator for probe ordering (AIMD ignores it)

    Returns:
        A fresh RateController
    """
    return CONTROLLER_FACTORIES[Protocol(protocol)](req, scenario, rng if rng is not None else np.random.default_rng())


class FeedbackSample:
    """What one tick of sending reports back to its sender"""
    __slots__ = ("send_time", "arrival_time", "rtt", "offered", "lost")

    def __init__(self, send_time: float, arrival_time: float, rtt: float, offered: float, lost: float):
        self.send_time = send_time
        self.arrival_time = arrival_time
        self.rtt = rtt
        self.offered = offered
        self.lost = lost


@dataclass
class SenderState:
    """
    One connection inside the simulator

    A measured window [window_start, window_end) is followed by a wait until
    the feedback of its last tick has returned; the rate is held meanwhile.
    """
    spec: ConnectionSpec
    controller: RateController
    rng: np.random.Generator
    rate: float = 0.0
    started: bool = False
    stopped: bool = False
    waiting: bool = False
    window_start: float = 0.0
    window_end: float = 0.0
    in_flight: Deque[FeedbackSample] = field(default_factory=deque)
    arrived: List[FeedbackSample] = field(default_factory=list)
    last_stats: Optional[IntervalStats] = None
    last_rtt: float = math.nan
    row_offered: float = 0.0
    row_lost: float = 0.0
    row_delivered: float = 0.0
    row_time: float = 0.0

    @property
    def active(self) -> bool:
        return self.started and not self.stopped


@dataclass
class SimState:
    """Clock, queue and senders of one run"""
    clock: float
    queue: float
    buffer: float
    senders: List[SenderState]
    mass: MassBalance = field(default_factory=MassBalance)
    packet_bits: float = float(settings.PACKET_SIZE_BITS)


def collect_interval_stats(
    sender: SenderState,
    window: Tuple[float, float],
    fallback: Optional[IntervalStats] = None,
) -> IntervalStats:
    """
    Assemble interval statistics from the feedback of ticks sent inside a window

    Args:
        sender: Sender whose returned feedback is inspected
        window: (start, end) of the measured interval in send time
        fallback: Stats reused (with the window's duration) when no sample returned

    Returns:
        IntervalStats with loss = lost/offered, least-squares RTT slope and
        population RTT standard deviation

    Raises:
        EmptyWindow: If no feedback falls inside the window and no fallback is given
    """
    start, end = window
    duration = end - start
    samples = [s for s in sender.arrived if start - TIME_EPS <= s.send_time < end - TIME_EPS]
    if not samples:
        if fallback is not None:
            return fallback.model_copy(update={"duration": duration})
        raise EmptyWindow(f"no feedback for {sender.spec.id} in [{start:.6f}, {end:.6f})")

    offered = sum(s.offered for s in samples)
    lost = sum(s.lost for s in samples)
    return IntervalStats.from_samples(
        [(s.send_time, s.rtt) for s in samples],
        avg_rate=offered / duration,
        loss_ratio=lost / offered if offered > 0 else 0.0,
        duration=duration,
    )


def _random_loss(offered: float, p: float, packet_bits: float, rng: np.random.Generator) -> float:
    if p <= 0.0 or offered <= 0.0:
        return 0.0
    packets = int(offered // packet_bits)
    remainder = offered - packets * packet_bits
    return float(rng.binomial(packets, p)) * packet_bits + remainder * p


def step(state: SimState, link: LinkModel, dt: float) -> SimState:
    """
    Advance the bottleneck by one tick

    Args:
        state: Simulator state; senders' current rates are what gets offered
        link: Bottleneck description
        dt: Tick length in seconds

    Returns:
        The same state, advanced to clock + dt
    """
    now = state.clock
    capacity = link.capacity_at(now)
    senders = [s for s in state.senders if s.active]

    offered = [s.rate * dt for s in senders]
    dropped = [_random_loss(o, link.random_loss, state.packet_bits, s.rng) for o, s in zip(offered, senders)]
    admitted = [o - d for o, d in zip(offered, dropped)]
    total_offered = sum(offered)
    total_admitted = sum(admitted)

    backlog = state.queue + total_admitted - capacity * dt
    delivered = min(state.queue + total_admitted, capacity * dt)
    overflow = max(0.0, backlog - state.buffer)
    queue = min(max(backlog, 0.0), state.buffer)

    rtt = link.base_rtt + queue / capacity
    for sender, o, d, a in zip(senders, offered, dropped, admitted):
        share = a / total_admitted if total_admitted > 0 else 0.0
        lost = d + overflow * share
        sender.in_flight.append(FeedbackSample(now, now + rtt, rtt, o, lost))
        sender.last_rtt = rtt
        sender.row_offered += o
        sender.row_lost += lost
        sender.row_delivered += delivered * (o / total_offered) if total_offered > 0 else 0.0
        sender.row_time += dt

    state.mass.offered += total_offered
    state.mass.delivered += delivered
    state.mass.random_loss += sum(dropped)
    state.mass.overflow_loss += overflow
    state.mass.queued = queue

    state.queue = queue
    state.clock = now + dt
    for sender in state.senders:
        while sender.in_flight and sender.in_flight[0].arrival_time <= state.clock + TIME_EPS:
            sender.arrived.append(sender.in_flight.popleft())
    return state


def _begin_interval(sender: SenderState, now: float, rate: float, length: float) -> None:
    sender.rate = rate
    sender.window_start = now
    sender.window_end = now + length
    sender.waiting = False
    sender.arrived = [s for s in sender.arrived if s.send_time >= now - TIME_EPS]


def _feedback_complete(sender: SenderState) -> bool:
    return not sender.in_flight or sender.in_flight[0].send_time >= sender.window_end - TIME_EPS


def drive_controllers(state: SimState) -> None:
    """Start, stop and feed each sender's controller at the current clock"""
    now = state.clock
    for sender in state.senders:
        if sender.stopped:
            continue
        if not sender.started:
            if sender.spec.is_active(now):
                decision = sender.controller.start()
                sender.started = True
                _begin_interval(sender, now, decision.next_rate, decision.interval_length)
                logger.debug("%s started at %.3fs", sender.spec.id, now)
            continue
        if not sender.spec.is_active(now):
            sender.stopped = True
            sender.rate = 0.0
            logger.debug("%s stopped at %.3fs", sender.spec.id, now)
            continue

        if not sender.waiting and now >= sender.window_end - TIME_EPS:
            sender.waiting = True
        if sender.waiting and _feedback_complete(sender):
            stats = collect_interval_stats(sender, (sender.window_start, sender.window_end), sender.last_stats)
            sender.last_stats = stats
            decision = sender.controller.on_interval_end(stats)
            _begin_interval(sender, now, decision.next_rate, decision.interval_length)


def record(state: SimState, series: TimeSeries) -> None:
    """Append one row per active sender covering the ticks since the previous row"""
    for sender in state.senders:
        if sender.active and sender.row_time > 0:
            series.append(
                time=state.clock,
                conn_id=sender.spec.id,
                protocol=sender.spec.protocol.value,
                state=sender.controller.mode,
                send_rate=sender.rate,
                throughput=sender.row_delivered / sender.row_time,
                utility=sender.controller.last_utility,
                rtt=sender.last_rtt,
                loss_ratio=sender.row_lost / sender.row_offered if sender.row_offered > 0 else 0.0,
            )
        sender.row_offered = sender.row_lost = sender.row_delivered = sender.row_time = 0.0


def build_state(config: ScenarioConfig, seed: int) -> SimState:
    """
    Fresh simulator state with per-connection generators

    Each connection receives two independent streams spawned from the seed:
    one for random-loss thinning and one for its controller.
    """
    streams = np.random.SeedSequence(seed).spawn(2 * len(config.connections))
    senders = []
    for index, spec in enumerate(config.connections):
        loss_rng = np.random.default_rng(streams[2 * index])
        controller_rng = np.random.default_rng(streams[2 * index + 1])
        controller = create_controller(spec.protocol, spec.requirement, config, controller_rng)
        senders.append(SenderState(spec=spec, controller=controller, rng=loss_rng))
    return SimState(clock=0.0, queue=0.0, buffer=config.link.buffer_bits(), senders=senders)


def run(config: ScenarioConfig, seed: Optional[int] = None) -> SimResult:
    """
    Simulate a scenario for its full duration

    Args:
        config: Validated scenario
        seed: Overrides config.seed (trials use seed, seed + 1, ...)

    Returns:
        SimResult with the recorded time series, summary and mass balance
    """
    seed = config.seed if seed is None else seed
    dt = config.tick
    ticks = int(round(config.duration / dt))
    record_every = max(1, int(round(config.record_interval / dt)))

    state = build_state(config, seed)
    series = TimeSeries()
    logger.info(
        "Simulating scenario",
        extra={"scenario": config.name, "seed": seed, "ticks": ticks, "connections": len(config.connections)},
    )

    for k in range(ticks):
        state.clock = k * dt
        drive_controllers(state)
        step(state, config.link, dt)
        if (k + 1) % record_every == 0:
            state.clock = (k + 1) * dt
            record(state, series)

    summary = summarize_run(series, config, seed)
    logger.info(
        "Scenario finished",
        extra={"scenario": config.name, "seed": seed, "utilization": summary.utilization},
    )
    return SimResult(scenario=config.name, seed=seed, series=series, summary=summary, mass=state.mass)
