"""
Baseline controllers: fair-share online learner and rate-based AIMD
"""
import enum
import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from app.core.utility import priced_vivace_utility, vivace_utility
from app.schemas.network import IntervalStats, Requirement
from app.schemas.scenario import AimdConfig, ControllerConfig, Protocol, VivaceLikeConfig
from app.services.rate_control import (
    ControllerState,
    Feedback,
    PricedUtility,
    RateController,
    RateDecision,
    _check_fresh,
    _update_rtt,
    advance,
    new_controller,
)

logger = logging.getLogger(__name__)


def vivace_pricing(cfg: ControllerConfig, vivace: VivaceLikeConfig) -> PricedUtility:
    """Fair-share utility in the fixed rate unit, shared by every connection"""
    coeffs = vivace.as_coefficients()
    return PricedUtility(
        evaluate=lambda rate, penalty: priced_vivace_utility(rate, penalty, coeffs, cfg.utility_unit),
        unit=cfg.utility_unit,
        exponent=coeffs.t,
    )


def vivace_like_decision(
    state: ControllerState,
    req: Requirement,
    cfg: ControllerConfig,
    vivace: VivaceLikeConfig,
    stats: IntervalStats,
) -> Tuple[ControllerState, RateDecision]:
    """
    Hercules state machine driven by the fair-share utility (H = 1, phi = 0)

    Args:
        state: Controller state
        req: Requirement; only used for clamping bounded connections
        cfg: Controller configuration
        vivace: Baseline coefficients
        stats: Feedback for the interval

    Returns:
        Tuple of (new state, decision)

    Raises:
        StaleStats: As for the Hercules controller
    """
    _check_fresh(state, stats)
    measured = vivace_utility(state.scheduled_rate, stats, vivace.as_coefficients(), cfg.utility_unit)
    feedback = Feedback(utility=measured.value, penalty=measured.penalty)
    return advance(state, req, cfg, feedback, _update_rtt(state, stats), vivace_pricing(cfg, vivace))


class VivaceLikeController(RateController):
    """Fair-share baseline reusing the Hercules probing machinery"""
    protocol = Protocol.VIVACE_LIKE

    def __init__(
        self,
        req: Requirement,
        cfg: ControllerConfig,
        vivace: VivaceLikeConfig,
        rng: Optional[np.random.Generator] = None,
    ):
        self.req = req
        self.cfg = cfg
        self.vivace = vivace
        self.state = new_controller(req, vivace.as_coefficients(), cfg, rng)

    def start(self) -> RateDecision:
        return RateDecision(self.state.scheduled_rate, self.state.mode.value, self.state.interval_length)

    def on_interval_end(self, stats: IntervalStats) -> RateDecision:
        self.state, decision = vivace_like_decision(self.state, self.req, self.cfg, self.vivace, stats)
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


class AimdMode(str, enum.Enum):
    """AIMD phase"""
    SLOW_START = "slow_start"
    CONGESTION_AVOIDANCE = "congestion_avoidance"


@dataclass(frozen=True)
class AimdState:
    """Rate-based Reno state"""
    rate: float
    mode: AimdMode
    interval_length: float
    smoothed_rtt: Optional[float] = None


def new_aimd(req: Requirement, aimd: AimdConfig, cfg: ControllerConfig, slow_start: bool = True) -> AimdState:
    """Fresh AIMD state at the configured initial rate"""
    rate = max(min(aimd.initial_rate, req.min_rate), cfg.rate_floor)
    mode = AimdMode.SLOW_START if slow_start else AimdMode.CONGESTION_AVOIDANCE
    return AimdState(rate=rate, mode=mode, interval_length=cfg.interval_policy(None))


def aimd_decision(
    state: AimdState,
    req: Requirement,
    cfg: ControllerConfig,
    aimd: AimdConfig,
    stats: IntervalStats,
) -> Tuple[AimdState, RateDecision]:
    """
    Additive increase per RTT, multiplicative decrease on loss

    Args:
        state: AIMD state
        req: Requirement; bounded connections are clamped at max_rate
        cfg: Controller configuration (rate floor, interval policy)
        aimd: AIMD parameters
        stats: Feedback for the interval

    Returns:
        Tuple of (new state, decision)
    """
    srtt = state.smoothed_rtt
    if stats.rtt_samples:
        sample = stats.mean_rtt
        srtt = sample if srtt is None else 0.875 * srtt + 0.125 * sample
    rtt = srtt if srtt else stats.duration

    rate = state.rate
    mode = state.mode
    if stats.loss_ratio > aimd.loss_threshold:
        rate *= aimd.multiplicative_decrease
        mode = AimdMode.CONGESTION_AVOIDANCE
    elif mode is AimdMode.SLOW_START:
        rate *= 2
    else:
        rate += aimd.additive_increase * (stats.duration / rtt)

    if req.bounded:
        rate = min(rate, req.max_rate)
    rate = max(rate, cfg.rate_floor)

    state = replace(state, rate=rate, mode=mode, smoothed_rtt=srtt, interval_length=cfg.interval_policy(srtt))
    return state, RateDecision(rate, mode.value, state.interval_length)


class AimdController(RateController):
    """AIMD baseline for one connection"""
    protocol = Protocol.AIMD

    def __init__(self, req: Requirement, cfg: ControllerConfig, aimd: AimdConfig):
        self.req = req
        self.cfg = cfg
        self.aimd = aimd
        self.state = new_aimd(req, aimd, cfg)

    def start(self) -> RateDecision:
        return RateDecision(self.state.rate, self.state.mode.value, self.state.interval_length)

    def on_interval_end(self, stats: IntervalStats) -> RateDecision:
        self.state, decision = aimd_decision(self.state, self.req, self.cfg, self.aimd, stats)
        return decision

    @property
    def mode(self) -> str:
        return self.state.mode.value

    @property
    def rate(self) -> float:
        return self.state.rate
