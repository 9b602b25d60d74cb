"""
Hercules rate-control state machine: slow start, probing and moving
"""
import enum
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np

from app.core.exceptions import StaleStats
from app.core.utility import priced_utility, utility
from app.schemas.network import CoefficientSet, IntervalStats, Requirement
from app.schemas.scenario import ControllerConfig, Protocol

logger = logging.getLogger(__name__)

# RFC 6298 smoothing gain for the RTT estimate
SRTT_GAIN = 1 / 8
STALE_TOLERANCE = 0.5


class Mode(str, enum.Enum):
    """Controller state label"""
    SLOW_START = "slow_start"
    PROBING = "probing"
    MOVING = "moving"


class Direction(str, enum.Enum):
    """Direction held while moving"""
    UP = "up"
    DOWN = "down"


class RateDecision(NamedTuple):
    """What the sender does for its next interval"""
    next_rate: float
    next_mode: str
    interval_length: float


class Feedback(NamedTuple):
    """What the controller learned from the interval just sent"""
    utility: float
    penalty: float


class PricedUtility(NamedTuple):
    """Utility of a rate under a congestion penalty, plus what normalizes its slope"""
    evaluate: Callable[[float, float], float]
    unit: float
    exponent: float


@dataclass(frozen=True)
class ControllerState:
    """
    Snapshot of one connection's controller

    current_rate is the base rate x; scheduled_rate is what is actually sent
    during the pending interval (a probe rate while probing, clamped to the
    floor and, for bounded connections, to the maximum requirement).
    Candidate rates are compared at smoothed_penalty, the EWMA of the
    congestion penalty over every interval measured so far.
    """
    mode: Mode
    current_rate: float
    scheduled_rate: float
    interval_length: float
    direction: Direction = Direction.UP
    last_utility: Optional[float] = None
    previous_rate: Optional[float] = None
    probe_plan: Tuple[float, ...] = ()
    probe_results: Tuple[Tuple[float, float], ...] = ()
    smoothed_rtt: Optional[float] = None
    smoothed_penalty: Optional[float] = None
    rng: np.random.Generator = field(default_factory=np.random.default_rng, compare=False, repr=False)


def _clamp_rate(rate: float, req: Requirement, cfg: ControllerConfig) -> float:
    if req.bounded:
        rate = min(rate, req.max_rate)
    return max(rate, cfg.rate_floor)


def plan_interval(state: ControllerState, cfg: ControllerConfig) -> float:
    """
    Length of the next update interval

    Args:
        state: Controller state (its smoothed RTT may be None)
        cfg: Controller configuration

    Returns:
        cfg.interval_policy(smoothed RTT), i.e. max(smoothed RTT, 10 ms) by default
    """
    return cfg.interval_policy(state.smoothed_rtt)


def new_controller(
    req: Requirement,
    coeffs: CoefficientSet,
    cfg: ControllerConfig,
    rng: Optional[np.random.Generator] = None,
) -> ControllerState:
    """
    Fresh controller in slow start

    Args:
        req: Validated requirement
        coeffs: Coefficient set (kept for signature symmetry with on_interval_end)
        cfg: Controller configuration
        rng: Generator ordering the probe sub-intervals; seeded by the caller

    Returns:
        ControllerState starting at min(initial_rate_cap, min_rate)
    """
    initial = _clamp_rate(min(cfg.initial_rate_cap, req.min_rate), req, cfg)
    return ControllerState(
        mode=Mode.SLOW_START,
        current_rate=initial,
        scheduled_rate=initial,
        interval_length=cfg.interval_policy(None),
        rng=rng if rng is not None else np.random.default_rng(),
    )


def _enter_probing(state: ControllerState, rate: float, req: Requirement, cfg: ControllerConfig) -> ControllerState:
    rate = _clamp_rate(rate, req, cfg)
    up, down = rate * (1 + cfg.delta), rate * (1 - cfg.delta)
    plan = (up, down) if state.rng.random() < 0.5 else (down, up)
    return replace(
        state,
        mode=Mode.PROBING,
        current_rate=rate,
        scheduled_rate=_clamp_rate(plan[0], req, cfg),
        probe_plan=plan,
        probe_results=(),
    )


def _move(
    state: ControllerState, direction: Direction, step: float, req: Requirement, cfg: ControllerConfig
) -> ControllerState:
    factor = 1 + step if direction is Direction.UP else 1 - step
    moved = _clamp_rate(state.current_rate * factor, req, cfg)
    return replace(
        state,
        mode=Mode.MOVING,
        direction=direction,
        previous_rate=state.current_rate,
        current_rate=moved,
        scheduled_rate=moved,
        probe_plan=(),
        probe_results=(),
    )


def _check_fresh(state: ControllerState, stats: IntervalStats) -> None:
    expected = state.interval_length
    if abs(stats.duration - expected) > STALE_TOLERANCE * expected:
        raise StaleStats(
            f"stats cover {stats.duration:.6f}s but the scheduled interval was {expected:.6f}s"
        )


def _update_rtt(state: ControllerState, stats: IntervalStats) -> Optional[float]:
    if not stats.rtt_samples:
        return state.smoothed_rtt
    sample = stats.mean_rtt
    if state.smoothed_rtt is None:
        return sample
    return (1 - SRTT_GAIN) * state.smoothed_rtt + SRTT_GAIN * sample


def advance(
    state: ControllerState,
    req: Requirement,
    cfg: ControllerConfig,
    feedback: Feedback,
    smoothed_rtt: Optional[float],
    priced: PricedUtility,
) -> Tuple[ControllerState, RateDecision]:
    """
    Apply one transition given the feedback of the interval just measured

    Shared by Hercules and the fair-share baseline; only the utility differs.

    Args:
        state: Controller state whose interval the feedback covers
        req: Validated requirement
        cfg: Controller configuration
        feedback: Measured utility and congestion penalty of that interval
        smoothed_rtt: Updated RTT estimate
        priced: Utility of a rate under a congestion penalty

    Returns:
        Tuple of (new state, decision)
    """
    if state.smoothed_penalty is None:
        price = feedback.penalty
    else:
        price = (1 - cfg.penalty_gain) * state.smoothed_penalty + cfg.penalty_gain * feedback.penalty
    state = replace(state, smoothed_rtt=smoothed_rtt, smoothed_penalty=price, last_utility=feedback.utility)

    def utility_at(rate: float) -> float:
        return priced.evaluate(rate, price)

    def normalized_slope(rise: float, run: float) -> float:
        return rise / run / (state.current_rate / priced.unit) ** priced.exponent

    if state.mode is Mode.SLOW_START:
        decreased = (
            state.previous_rate is not None
            and utility_at(state.current_rate) < utility_at(state.previous_rate)
        )
        if decreased:
            logger.debug(
                "slow start: utility decreased at %.0f bps, probing at %.0f", state.current_rate, state.previous_rate
            )
            state = _enter_probing(state, state.previous_rate, req, cfg)
        elif state.current_rate >= req.max_rate:
            logger.debug("slow start: %.0f bps reached the maximum requirement", state.current_rate)
            state = _enter_probing(state, state.current_rate, req, cfg)
        else:
            doubled = _clamp_rate(state.current_rate * 2, req, cfg)
            state = replace(state, previous_rate=state.current_rate, current_rate=doubled, scheduled_rate=doubled)

    elif state.mode is Mode.PROBING:
        results = state.probe_results + ((state.probe_plan[len(state.probe_results)], feedback.utility),)
        if len(results) < len(state.probe_plan):
            state = replace(
                state,
                probe_results=results,
                scheduled_rate=_clamp_rate(state.probe_plan[len(results)], req, cfg),
            )
        else:
            rate = state.current_rate
            up_utility = utility_at(_clamp_rate(rate * (1 + cfg.delta), req, cfg))
            down_utility = utility_at(_clamp_rate(rate * (1 - cfg.delta), req, cfg))
            gap = up_utility - down_utility
            scale = max(abs(up_utility), abs(down_utility), 1e-300)
            direction = Direction.UP if gap > cfg.tie_tolerance * scale else Direction.DOWN
            step = cfg.step_for(normalized_slope(gap, 2 * cfg.delta))
            logger.debug("probing at %.0f bps: gradient %s, step %.3f", rate, direction.value, step)
            state = _move(state, direction, step, req, cfg)

    else:
        current = utility_at(state.current_rate)
        previous = utility_at(state.previous_rate)
        if current < previous or state.current_rate == state.previous_rate:
            logger.debug("moving %s: utility decreased at %.0f bps", state.direction.value, state.current_rate)
            state = _enter_probing(state, state.current_rate, req, cfg)
        else:
            run = abs(math.log(state.current_rate / state.previous_rate))
            step = cfg.step_for(normalized_slope(current - previous, run))
            state = _move(state, state.direction, step, req, cfg)

    state = replace(state, interval_length=plan_interval(state, cfg))
    return state, RateDecision(state.scheduled_rate, state.mode.value, state.interval_length)


def hercules_pricing(req: Requirement, coeffs: CoefficientSet, cfg: ControllerConfig) -> PricedUtility:
    """Hercules utility of one connection as a function of rate and penalty"""
    unit = cfg.hercules_unit(req)
    return PricedUtility(
        evaluate=lambda rate, penalty: priced_utility(rate, req, penalty, coeffs, unit),
        unit=unit,
        exponent=coeffs.t,
    )


def on_interval_end(
    state: ControllerState,
    req: Requirement,
    coeffs: CoefficientSet,
    cfg: ControllerConfig,
    stats: IntervalStats,
) -> Tuple[ControllerState, RateDecision]:
    """
    Consume the feedback of the interval just sent and decide the next one

    Args:
        state: Controller state whose scheduled interval the stats cover
        req: Validated requirement
        coeffs: Coefficient set
        cfg: Controller configuration
        stats: Feedback for the interval

    Returns:
        Tuple of (new state, decision)

    Raises:
        StaleStats: If stats.duration differs from the scheduled interval by more than 50%
    """
    _check_fresh(state, stats)
    pricing = hercules_pricing(req, coeffs, cfg)
    measured = utility(state.scheduled_rate, req, stats, coeffs, pricing.unit)
    feedback = Feedback(utility=measured.value, penalty=measured.penalty)
    return advance(state, req, cfg, feedback, _update_rtt(state, stats), pricing)


class RateController:
    """
    Per-connection controller object driven by the simulator

    Subclasses keep their own state and translate interval feedback into
    RateDecisions; one instance per connection, not shared across threads.
    """
    protocol: Protocol

    def start(self) -> RateDecision:
        raise NotImplementedError

    def on_interval_end(self, stats: IntervalStats) -> RateDecision:
        raise NotImplementedError

    @property
    def mode(self) -> str:
        raise NotImplementedError

    @property
    def rate(self) -> float:
        raise NotImplementedError

    @property
    def last_utility(self) -> float:
        return math.nan


class HerculesController(RateController):
    """Hercules controller for one connection"""
    protocol = Protocol.HERCULES

    def __init__(
        self,
        req: Requirement,
        coeffs: CoefficientSet,
        cfg: ControllerConfig,
        rng: Optional[np.random.Generator] = None,
    ):
        self.req = req
        self.coeffs = coeffs
        self.cfg = cfg
        self.state = new_controller(req, coeffs, cfg, rng)

    def start(self) -> RateDecision:
        return RateDecision(self.state.scheduled_rate, self.state.mode.value, self.state.interval_length)

    def on_interval_end(self, stats: IntervalStats) -> RateDecision:
        self.state, decision = on_interval_end(self.state, self.req, self.coeffs, self.cfg, stats)
        return decision

    @property
    def mode(self) -> str:
        return self.state.mode.value

    @property
    def rate(self) -> float:
        return self.state.scheduled_rate

    @property
    def last_utility(self) -> float:
        return math.nan if self.state.last_utility is None else self.state.last_utility
