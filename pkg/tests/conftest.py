"""
Pytest configuration and fixtures
"""
import copy

import pytest
from fastapi.testclient import TestClient

from app.main import app
from app.schemas.network import CoefficientSet, IntervalStats, Requirement
from app.schemas.scenario import ControllerConfig
from app.utils.units import kbps, mbps

BASE_RTT = 0.02


def flat_stats(duration: float, rtt: float = BASE_RTT, loss: float = 0.0, tick: float = 0.001) -> IntervalStats:
    """Stats of a congestion-free interval (constant RTT) of the given length"""
    count = max(2, int(round(duration / tick)))
    samples = [(k * tick, rtt) for k in range(count)]
    return IntervalStats.from_samples(samples, avg_rate=1.0, loss_ratio=loss, duration=duration)


def scenario_document(**overrides) -> dict:
    """A small valid scenario: two Hercules connections on a 20 Mbps link for 3 s"""
    document = {
        "name": "small",
        "description": "two connections",
        "link": {
            "capacity_schedule": [{"start_time": 0.0, "capacity": mbps(20)}],
            "base_rtt": BASE_RTT,
            "buffer_bdp": 1.0,
        },
        "connections": [
            {"id": "low", "requirement": {"min_rate": mbps(1), "max_rate": mbps(1.5)}},
            {"id": "high", "requirement": {"min_rate": mbps(10), "max_rate": mbps(15)}},
        ],
        "duration": 3.0,
        "seed": 7,
    }
    document.update(overrides)
    return copy.deepcopy(document)


@pytest.fixture(scope="function")
def client():
    """Create a test client"""
    with TestClient(app) as test_client:
        yield test_client


@pytest.fixture
def coeffs():
    """Default coefficient set"""
    return CoefficientSet()


@pytest.fixture
def controller_cfg():
    """Default controller configuration"""
    return ControllerConfig()


@pytest.fixture
def five_level_requirements():
    """Requirement levels 10 Kbps to 100 Mbps with maxima 1.5 times higher"""
    minima = [kbps(10), kbps(100), mbps(1), mbps(10), mbps(100)]
    return [Requirement(min_rate=a, max_rate=1.5 * a) for a in minima]


@pytest.fixture
def three_requirements():
    """The (20,30), (40,60), (60,90) Mbps example"""
    return [
        Requirement(min_rate=mbps(20), max_rate=mbps(30)),
        Requirement(min_rate=mbps(40), max_rate=mbps(60)),
        Requirement(min_rate=mbps(60), max_rate=mbps(90)),
    ]


@pytest.fixture
def small_scenario():
    """Document of a small valid scenario"""
    return scenario_document()
