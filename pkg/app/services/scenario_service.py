"""
Scenario service: parsing, validation, trial execution, summaries and sweeps
"""
import csv
import json
import logging
import statistics
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from pydantic import ValidationError

from app.config import settings
from app.core.exceptions import InvalidScenario, OutputError, ScenarioParseError, ScenarioValidationError
from app.schemas.results import (
    CSV_COLUMNS,
    AllocationProblem,
    ConnectionReport,
    SimResult,
    SummaryReport,
)
from app.schemas.scenario import ScenarioConfig
from app.services.fairness import hrf_allocate, mmf_allocate
from app.services.simulator import run
from app.utils.validators import scenario_errors

logger = logging.getLogger(__name__)

SWEEP_PARAMS = ("capacity", "loss", "buffer", "d")


def _format_loc(loc: Sequence[Union[str, int]]) -> str:
    path = ""
    for part in loc:
        path += f"[{part}]" if isinstance(part, int) else (f".{part}" if path else str(part))
    return path or "scenario"


def load_scenario(data: Any) -> ScenarioConfig:
    """
    Validate an already-decoded scenario document

    Args:
        data: Decoded JSON value

    Returns:
        Validated ScenarioConfig

    Raises:
        ScenarioValidationError: Listing every schema and semantic violation
    """
    if not isinstance(data, dict):
        raise ScenarioValidationError(["scenario: top-level value must be an object"])
    try:
        config = ScenarioConfig.model_validate(data)
    except ValidationError as e:
        raise ScenarioValidationError([f"{_format_loc(err['loc'])}: {err['msg']}" for err in e.errors()])

    errors = scenario_errors(config)
    if errors:
        raise ScenarioValidationError(errors)
    return config


def parse_scenario_text(text: str) -> ScenarioConfig:
    """Parse and validate scenario JSON text"""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioParseError(e.msg, line=e.lineno, column=e.colno)
    return load_scenario(data)


def parse_scenario(path: Union[str, Path]) -> ScenarioConfig:
    """
    Read a scenario file

    Args:
        path: JSON scenario file

    Returns:
        Validated ScenarioConfig

    Raises:
        ScenarioParseError: If the file cannot be read or is not well-formed JSON
        ScenarioValidationError: If the document violates the schema or invariants
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioParseError(f"cannot read {path}: {e.strerror or e}")
    return parse_scenario_text(text)


def emit_scenario(config: ScenarioConfig) -> str:
    """Canonical JSON form of a scenario; parse_scenario_text inverts it"""
    return config.model_dump_json(indent=2)


def scenario_issues(data: Any) -> List[str]:
    """Every problem with a decoded scenario document, empty when valid"""
    try:
        load_scenario(data)
    except InvalidScenario as e:
        return e.errors
    return []


def bundled_scenarios() -> List[str]:
    """Names of the scenario files shipped with the project"""
    return sorted(path.stem for path in settings.scenario_path.glob("*.json"))


def resolve_scenario(name_or_path: str) -> Path:
    """A path as given, or a bundled scenario by name"""
    path = Path(name_or_path)
    if path.exists() or path.suffix:
        return path
    return settings.scenario_path / f"{name_or_path}.json"


def oracle_allocations(config: ScenarioConfig) -> Dict[str, Any]:
    """HRF and MMF reference allocations of a scenario at its initial capacity"""
    problem = AllocationProblem(
        requirements=[conn.requirement for conn in config.connections],
        capacity=config.link.initial_capacity,
    )
    return {
        "capacity": problem.capacity,
        "conn_ids": [conn.id for conn in config.connections],
        "hrf": hrf_allocate(problem),
        "mmf": mmf_allocate(problem),
    }


def oracle_document(config: ScenarioConfig) -> Dict[str, Any]:
    """JSON-ready form of oracle_allocations"""
    oracle = oracle_allocations(config)
    return {
        **oracle,
        "hrf": oracle["hrf"].model_dump(mode="json"),
        "mmf": oracle["mmf"].model_dump(mode="json"),
    }


def _median(values: List[Optional[float]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    return statistics.median(present) if present else None


def summarize(results: Sequence[SimResult], config: ScenarioConfig) -> SummaryReport:
    """
    Aggregate trials of one scenario

    Args:
        results: Non-empty list of trial results
        config: Scenario the trials ran

    Returns:
        SummaryReport with mean and worst-case satisfaction per connection,
        median utilization and convergence time, and the oracle references
    """
    reports = []
    for index, conn in enumerate(config.connections):
        rows = [result.summary.connections[index] for result in results]
        swings = [row.oscillation for row in rows if row.oscillation is not None]
        reports.append(ConnectionReport(
            conn_id=conn.id,
            protocol=conn.protocol.value,
            min_rate=conn.requirement.min_rate,
            mean_rate=statistics.fmean(row.avg_rate for row in rows),
            mean_satisfaction=statistics.fmean(row.satisfaction for row in rows),
            worst_satisfaction=min(row.satisfaction for row in rows),
            mean_oscillation=statistics.fmean(swings) if swings else None,
        ))

    oracle = oracle_allocations(config)
    convergence = [result.summary.convergence_time for result in results]
    return SummaryReport(
        scenario=config.name,
        trials=len(results),
        d_scale=config.coefficients.d_scale,
        utilization_median=statistics.median(result.summary.utilization for result in results),
        convergence_time_median=_median(convergence),
        convergence_times=convergence,
        connections=reports,
        hrf_reference=oracle["hrf"],
        mmf_reference=oracle["mmf"],
    )


def write_series_csv(result: SimResult, path: Path) -> None:
    """Write a trial's time series with the fixed CSV columns"""
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(CSV_COLUMNS)
            writer.writerows(result.series.rows())
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e.strerror or e}")


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e.strerror or e}")


def _ensure_dir(path: Path) -> Path:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(f"cannot create {path}: {e.strerror or e}")
    return path


def run_trial(config: ScenarioConfig, seed: int, output_dir: Optional[str] = None) -> SimResult:
    """Simulate one trial and, when an output directory is given, write its CSV"""
    result = run(config, seed)
    if output_dir is not None:
        write_series_csv(result, Path(output_dir) / f"{config.name}_seed{seed}.csv")
    return result


class ExperimentRunner:
    """Runs scenarios and sweeps, writing results under one output directory"""

    def __init__(self, output_dir: Optional[str] = None, max_workers: Optional[int] = None):
        self.output_dir = output_dir
        self.max_workers = max_workers or settings.MAX_WORKERS

    def _target(self, config: ScenarioConfig, write: bool) -> Optional[Path]:
        if not write:
            return None
        return _ensure_dir(Path(self.output_dir or config.output_dir or settings.OUTPUT_DIR))

    def run_trials(self, config: ScenarioConfig, target: Optional[Path] = None) -> List[SimResult]:
        """Run seeds seed, seed + 1, ... serially or across worker processes"""
        seeds = [config.seed + k for k in range(config.trials)]
        out = str(target) if target is not None else None
        if self.max_workers > 1 and len(seeds) > 1:
            with ProcessPoolExecutor(max_workers=self.max_workers) as pool:
                return list(pool.map(run_trial, [config] * len(seeds), seeds, [out] * len(seeds)))
        return [run_trial(config, seed, out) for seed in seeds]

    def run_scenario(self, config: ScenarioConfig, write: bool = True) -> Tuple[List[SimResult], SummaryReport]:
        """
        Run every trial of a scenario and summarize

        Args:
            config: Validated scenario
            write: Write per-trial CSVs, the summary JSON and the oracle JSON

        Returns:
            Tuple of (trial results, summary report)

        Raises:
            OutputError: If the output directory cannot be written
        """
        target = self._target(config, write)
        logger.info("Running scenario", extra={"scenario": config.name, "trials": config.trials})
        results = self.run_trials(config, target)
        report = summarize(results, config)

        if target is not None:
            _write_text(target / f"{config.name}_summary.json", report.model_dump_json(indent=2))
            _write_text(target / f"{config.name}_oracle.json", json.dumps(oracle_document(config), indent=2))
            logger.info("Results written", extra={"scenario": config.name, "output_dir": str(target)})
        return results, report

    def sweep(
        self,
        config: ScenarioConfig,
        param: str,
        values: Sequence[float],
        write: bool = True,
    ) -> Dict[str, Any]:
        """
        Run a scenario once per swept value

        Args:
            config: Base scenario
            param: One of capacity, loss, buffer, d
            values: Values substituted for the parameter
            write: Write each value's outputs and the aggregate sweep JSON

        Returns:
            Aggregate with per-value satisfaction, utilization and oscillation

        Raises:
            ScenarioValidationError: If a substituted value makes the scenario invalid
        """
        if param not in SWEEP_PARAMS:
            raise ScenarioValidationError([f"unknown sweep parameter {param!r}; expected one of {SWEEP_PARAMS}"])

        points = []
        for value in values:
            variant = with_parameter(config, param, value)
            _, report = self.run_scenario(variant, write=write)
            points.append({
                "value": value,
                "utilization_median": report.utilization_median,
                "convergence_time_median": report.convergence_time_median,
                "connections": [
                    {
                        "conn_id": conn.conn_id,
                        "protocol": conn.protocol,
                        "mean_satisfaction": conn.mean_satisfaction,
                        "worst_satisfaction": conn.worst_satisfaction,
                        "mean_oscillation": conn.mean_oscillation,
                    }
                    for conn in report.connections
                ],
            })

        aggregate = {"scenario": config.name, "param": param, "points": points}
        if write:
            target = self._target(config, True)
            _write_text(target / f"sweep_{param}.json", json.dumps(aggregate, indent=2))
        return aggregate


def with_parameter(config: ScenarioConfig, param: str, value: float) -> ScenarioConfig:
    """Copy of a scenario with one swept parameter substituted and re-validated"""
    data = config.model_dump(mode="json")
    if param == "capacity":
        data["link"]["capacity_schedule"] = [{"start_time": 0.0, "capacity": value}]
    elif param == "loss":
        data["link"]["random_loss"] = value
    elif param == "buffer":
        data["link"]["buffer_bdp"] = value
        data["link"]["buffer_bytes"] = None
    elif param == "d":
        data["coefficients"]["d_scale"] = value
    label = f"{value:g}".replace(".", "p")
    data["name"] = f"{config.name}_{param}{label}"
    return load_scenario(data)

