"""
Tests for scenario parsing, trial execution and result files
"""
import csv
import json
from collections import defaultdict

import pytest

from app.core.exceptions import OutputError, ScenarioParseError, ScenarioValidationError
from app.schemas.results import CSV_COLUMNS
from app.services.scenario_service import (
    ExperimentRunner,
    bundled_scenarios,
    emit_scenario,
    load_scenario,
    oracle_allocations,
    parse_scenario,
    parse_scenario_text,
    resolve_scenario,
    scenario_issues,
    with_parameter,
)
from app.utils.units import mbps

from tests.conftest import scenario_document


@pytest.fixture
def short_config():
    """Small scenario cut to one second"""
    return load_scenario(scenario_document(duration=1.0, warmup=0.2))


class TestParseScenario:
    """Test reading and validating scenario documents"""

    def test_bundled_five_level(self):
        config = parse_scenario(resolve_scenario("all-unbounded-95"))
        assert len(config.connections) == 5
        assert config.link.initial_capacity == mbps(95)
        assert [c.id for c in config.connections] == ["r10k", "r100k", "r1m", "r10m", "r100m"]

    @pytest.mark.parametrize("name", bundled_scenarios())
    def test_every_bundled_scenario_is_valid(self, name):
        assert parse_scenario(resolve_scenario(name)).name == name

    def test_inverted_requirement_names_connection(self):
        document = scenario_document()
        document["connections"][1]["requirement"] = {"min_rate": mbps(15), "max_rate": mbps(10)}
        with pytest.raises(ScenarioValidationError) as exc_info:
            load_scenario(document)
        assert any("high" in error for error in exc_info.value.errors)
        assert exc_info.value.exit_code == 2

    def test_empty_connections(self):
        with pytest.raises(ScenarioValidationError) as exc_info:
            load_scenario(scenario_document(connections=[]))
        assert any(error.startswith("connections") for error in exc_info.value.errors)

    def test_unknown_key_rejected(self):
        with pytest.raises(ScenarioValidationError):
            load_scenario(scenario_document(colour="blue"))

    def test_malformed_json_reports_line(self):
        with pytest.raises(ScenarioParseError) as exc_info:
            parse_scenario_text('{\n  "name": "x",\n  "link": \n}')
        assert exc_info.value.line == 4

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioParseError):
            parse_scenario(tmp_path / "absent.json")

    def test_emit_then_parse(self, short_config):
        assert parse_scenario_text(emit_scenario(short_config)) == short_config

    def test_issues_listed_without_raising(self):
        document = scenario_document(tick=0.008)
        document["connections"][0]["requirement"] = {"min_rate": 0, "max_rate": 1}
        assert len(scenario_issues(document)) == 2
        assert scenario_issues(scenario_document()) == []


class TestOracleAllocations:
    """Test scenario-level reference allocations"""

    def test_hrf_uses_initial_capacity(self):
        oracle = oracle_allocations(parse_scenario(resolve_scenario("all-unbounded-95")))
        assert oracle["capacity"] == mbps(95)
        assert sum(oracle["hrf"].rates.rates) == pytest.approx(mbps(95))
        assert oracle["conn_ids"][-1] == "r100m"


class TestExperimentRunner:
    """Test trials, summaries and written outputs"""

    def test_single_trial_worst_equals_mean(self, short_config):
        results, report = ExperimentRunner().run_scenario(short_config, write=False)
        assert len(results) == 1
        assert report.trials == 1
        for conn in report.connections:
            assert conn.worst_satisfaction == conn.mean_satisfaction

    def test_trials_use_consecutive_seeds(self, short_config):
        config = short_config.model_copy(update={"trials": 2})
        results, report = ExperimentRunner().run_scenario(config, write=False)
        assert [r.seed for r in results] == [config.seed, config.seed + 1]
        assert len(report.convergence_times) == 2

    def test_files_consistent_with_summary(self, short_config, tmp_path):
        """Satisfaction and utilization recomputed from the CSV match the summary"""
        _, report = ExperimentRunner(output_dir=str(tmp_path)).run_scenario(short_config)
        csv_path = tmp_path / f"{short_config.name}_seed{short_config.seed}.csv"
        assert (tmp_path / f"{short_config.name}_oracle.json").exists()
        summary = json.loads((tmp_path / f"{short_config.name}_summary.json").read_text())

        with open(csv_path, newline="") as f:
            reader = csv.reader(f)
            assert tuple(next(reader)) == CSV_COLUMNS
            rows = list(reader)

        rates = defaultdict(list)
        totals = defaultdict(float)
        for row in rows:
            t, conn, rate = float(row[0]), row[1], float(row[4])
            if t >= short_config.warmup:
                rates[conn].append(rate)
                totals[t] += rate

        capacity = short_config.link.initial_capacity
        utilization = sum(total / capacity for total in totals.values()) / len(totals)
        assert summary["utilization_median"] == pytest.approx(utilization, abs=1e-9)
        for conn in summary["connections"]:
            mean_rate = sum(rates[conn["conn_id"]]) / len(rates[conn["conn_id"]])
            assert conn["mean_satisfaction"] == pytest.approx(mean_rate / conn["min_rate"], abs=1e-9)
        assert summary["scenario"] == report.scenario

    def test_unwritable_output(self, short_config, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(OutputError):
            ExperimentRunner(output_dir=str(blocker)).run_scenario(short_config)

    def test_sweep_over_steepness(self, short_config):
        aggregate = ExperimentRunner().sweep(short_config, "d", [1.0, 2.0], write=False)
        assert [point["value"] for point in aggregate["points"]] == [1.0, 2.0]
        assert all(len(point["connections"]) == 2 for point in aggregate["points"])

    def test_sweep_writes_aggregate(self, short_config, tmp_path):
        ExperimentRunner(output_dir=str(tmp_path)).sweep(short_config, "capacity", [mbps(10)])
        assert (tmp_path / "sweep_capacity.json").exists()

    def test_unknown_sweep_parameter(self, short_config):
        with pytest.raises(ScenarioValidationError):
            ExperimentRunner().sweep(short_config, "colour", [1.0], write=False)

    def test_with_parameter_revalidates(self, short_config):
        variant = with_parameter(short_config, "d", 4.0)
        assert variant.coefficients.d_scale == 4.0
        assert variant.name == "small_d4"
        with pytest.raises(ScenarioValidationError):
            with_parameter(short_config, "loss", 2.0)
