"""
Long-running scenario checks against reference figures

Marked ``acceptance`` and run with the default suite; select them alone with
``pytest -m acceptance``.
"""
import time

import numpy as np
import pytest

from app.schemas.results import AllocationProblem
from app.schemas.scenario import Protocol, ScenarioConfig
from app.services.fairness import hrf_allocate
from app.services.metrics import convergence_time, rate_matrix, rate_oscillation
from app.services.scenario_service import (
    bundled_scenarios,
    load_scenario,
    parse_scenario,
    resolve_scenario,
    with_parameter,
)
from app.services.simulator import run
from app.utils.units import mbps

from tests.conftest import BASE_RTT

pytestmark = pytest.mark.acceptance

WARMUP = 10.0
SMALL_SENDERS = ("r10k", "r100k", "r1m", "r10m")


def bundled(name: str, **changes) -> ScenarioConfig:
    data = parse_scenario(resolve_scenario(name)).model_dump(mode="json")
    data.update(changes)
    return load_scenario(data)


def with_protocol(config: ScenarioConfig, protocol: Protocol) -> ScenarioConfig:
    data = config.model_dump(mode="json")
    for conn in data["connections"]:
        conn["protocol"] = protocol.value
    return load_scenario(data)


def satisfaction(config: ScenarioConfig) -> dict:
    summary = run(config).summary
    return {conn.conn_id: conn.satisfaction for conn in summary.connections}


def average_rates(config: ScenarioConfig) -> dict:
    summary = run(config).summary
    return {conn.conn_id: conn.avg_rate for conn in summary.connections}


class TestOracle:
    """Test the allocation oracle on the three-connection example"""

    def test_three_connection_example(self, three_requirements):
        """(20,30), (40,60), (60,90) Mbps on 120 Mbps get exactly their minima"""
        allocation = hrf_allocate(AllocationProblem(requirements=three_requirements, capacity=mbps(120)))
        assert list(allocation.rates.rates) == pytest.approx([mbps(20), mbps(40), mbps(60)], abs=1e3)


class TestFairShare:
    """Test the fair-share learner on the five-level mix"""

    def test_hundred_mbps_sender_gets_fair_share(self):
        """Requirement-blind senders leave the 100 Mbps sender near a fifth of 135 Mbps"""
        config = with_protocol(bundled("all-unbounded-135", warmup=WARMUP), Protocol.VIVACE_LIKE)
        assert satisfaction(config)["r100m"] == pytest.approx(0.27, abs=0.05)

    def test_symmetric_senders_split_capacity(self):
        """Four identical learners on 100 Mbps settle near 25 Mbps each"""
        config = load_scenario({
            "name": "symmetric-fair-share",
            "link": {
                "capacity_schedule": [{"start_time": 0.0, "capacity": mbps(100)}],
                "base_rtt": BASE_RTT,
                "buffer_bdp": 1.0,
            },
            "connections": [
                {"id": f"s{k}", "requirement": {"min_rate": mbps(1), "max_rate": mbps(1.5)}, "protocol": "vivace_like"}
                for k in range(4)
            ],
            "duration": 30.0,
            "warmup": WARMUP,
            "seed": 1,
        })
        rates = list(average_rates(config).values())
        assert rates == pytest.approx([mbps(25)] * 4, rel=0.15)
        assert max(rates) <= 1.05 * min(rates)


class TestHerculesSatisfaction:
    """Test requirement-aware allocation on the five-level mix"""

    @pytest.mark.parametrize("capacity,floor", [(95, 0.55), (120, 0.80), (135, 0.85)])
    def test_all_unbounded(self, capacity, floor):
        """The 100 Mbps sender clears its floor while the small senders keep 90% of their minima"""
        config = bundled(f"all-unbounded-{capacity}", warmup=WARMUP)
        result = run(config)
        ratios = {conn.conn_id: conn.satisfaction for conn in result.summary.connections}
        assert ratios["r100m"] >= floor
        assert all(ratios[conn] >= 0.9 for conn in SMALL_SENDERS)
        assert result.summary.utilization >= 0.90


class TestDynamics:
    """Test reconvergence after arrivals and capacity changes"""

    def test_arrival_converges(self):
        """A second identical sender arriving at 10 s is within 15% of the first by 20 s"""
        config = bundled("dynamic-arrival")
        times, conn_ids, matrix = rate_matrix(run(config).series)
        buckets = np.floor(times).astype(int)
        converged_at = None
        for second in range(10, int(config.duration)):
            rows = matrix[buckets == second]
            first, second_rate = np.nanmean(rows[:, 0]), np.nanmean(rows[:, 1])
            if abs(first - second_rate) <= 0.15 * max(first, second_rate):
                converged_at = second
                break
        assert converged_at is not None and converged_at <= 20

    def test_capacity_changes_reconverge(self):
        """Each capacity step is followed by a steady run within 15 s"""
        config = parse_scenario(resolve_scenario("dynamic-network"))
        series = run(config).series
        for change in (60.0, 120.0, 180.0):
            settled = convergence_time(series, after=change, until=change + 60.0)
            assert settled is not None and settled <= change + 15.0


class TestSteepness:
    """Test the effect of the requirement-penalty steepness D"""

    def test_high_steepness_oscillates_more(self):
        """D = 1000 swings harder than D = 2"""
        base = bundled("d-sweep")
        calm = rate_oscillation(run(with_parameter(base, "d", 2.0)).series)
        wild = rate_oscillation(run(with_parameter(base, "d", 1000.0)).series)
        assert np.mean(list(wild.values())) > np.mean(list(calm.values()))

    def test_low_steepness_converges_later(self):
        """D = 1 settles later than D = 2, or not at all"""
        base = bundled("d-sweep")
        slow = convergence_time(run(with_parameter(base, "d", 1.0)).series)
        fast = convergence_time(run(with_parameter(base, "d", 2.0)).series)
        assert fast is not None
        assert slow is None or slow > fast


class TestRobustness:
    """Test random loss and buffer sizing"""

    def test_random_loss(self):
        """Hercules beats the fair-share learner up to 4% loss and keeps 70% of its clean share"""
        base = bundled("all-unbounded-120", warmup=WARMUP)
        clean = satisfaction(base)["r100m"]
        for loss in (0.0, 0.01, 0.02, 0.04):
            lossy = with_parameter(base, "loss", loss)
            hercules = satisfaction(lossy)["r100m"]
            vivace = satisfaction(with_protocol(lossy, Protocol.VIVACE_LIKE))["r100m"]
            assert hercules > vivace
            if loss == 0.04:
                assert hercules >= 0.7 * clean

    @pytest.mark.parametrize("buffer", [0.5, 1.0, 2.0, 5.0])
    def test_buffer_sizes(self, buffer):
        """The 120 Mbps figures hold from half a BDP to five BDPs of buffer"""
        config = with_parameter(bundled("all-unbounded-120", warmup=WARMUP), "buffer", buffer)
        ratios = satisfaction(config)
        assert ratios["r100m"] >= 0.80
        assert all(ratios[conn] >= 0.9 for conn in SMALL_SENDERS)


class TestEqualRequirements:
    """Test that identical requirements get identical shares"""

    def test_identical_senders_share_evenly(self):
        """Two 50 Mbps senders end within 10% of each other"""
        config = bundled("dynamic-arrival", warmup=20.0)
        ratios = satisfaction(config)
        assert ratios["first"] == pytest.approx(ratios["second"], rel=0.1)


class TestCoexistence:
    """Test Hercules sharing a link with other controllers"""

    @pytest.mark.xfail(
        reason="an under-provisioned Hercules sender holds the link near 10% loss, "
               "which keeps a zero-threshold AIMD sender at its floor",
        strict=True,
    )
    def test_aimd_sender_does_not_starve(self):
        """Every sender averages more than 5% of capacity next to an AIMD sender"""
        config = bundled("coexistence-aimd", warmup=WARMUP)
        capacity = config.link.initial_capacity
        rates = average_rates(config)
        assert all(rate > 0.05 * capacity for rate in rates.values())

    def test_hercules_senders_keep_their_share_next_to_aimd(self):
        """Both Hercules senders stay above 5% of capacity"""
        config = bundled("coexistence-aimd", warmup=WARMUP)
        capacity = config.link.initial_capacity
        rates = average_rates(config)
        hercules = [spec.id for spec in config.connections if spec.protocol is Protocol.HERCULES]
        assert all(rates[conn] > 0.05 * capacity for conn in hercules)


class TestRuntime:
    """Test that bundled scenarios stay interactive"""

    @pytest.mark.parametrize("name", bundled_scenarios())
    def test_runs_under_a_minute(self, name):
        config = parse_scenario(resolve_scenario(name))
        started = time.perf_counter()
        run(config)
        assert time.perf_counter() - started < 60.0
