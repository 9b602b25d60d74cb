"""
Scenario endpoints
"""
from typing import Any, Dict, Optional

from fastapi import APIRouter, Body, Query

from app.schemas.api import BundledScenariosResponse, ScenarioCheckResponse
from app.schemas.results import SummaryReport
from app.services.scenario_service import (
    ExperimentRunner,
    bundled_scenarios,
    load_scenario,
    scenario_issues,
)

router = APIRouter(prefix="/scenarios", tags=["Scenarios"])


@router.get("/bundled", response_model=BundledScenariosResponse)
def list_bundled():
    """Names of the scenarios shipped with the service"""
    return BundledScenariosResponse(scenarios=bundled_scenarios())


@router.post("/validate", response_model=ScenarioCheckResponse)
def validate(document: Dict[str, Any] = Body(...)):
    """
    Validate a scenario document

    - Always answers 200; problems are listed in errors
    """
    errors = scenario_issues(document)
    return ScenarioCheckResponse(valid=not errors, errors=errors)


@router.post("/run", response_model=SummaryReport)
def run(
    document: Dict[str, Any] = Body(...),
    trials: Optional[int] = Query(None, ge=1, description="Override the scenario's trial count"),
):
    """
    Run a scenario and return its summary

    - Files are written only when the scenario names an output_dir
    - Invalid scenarios answer 422 with every violation listed
    """
    if trials is not None:
        document = {**document, "trials": trials}
    config = load_scenario(document)
    runner = ExperimentRunner(max_workers=1)
    _, report = runner.run_scenario(config, write=config.output_dir is not None)
    return report
