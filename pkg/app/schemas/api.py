"""
Request and response bodies of the HTTP service
"""
from typing import List

from pydantic import BaseModel

from app.schemas.results import Allocation


class OracleResponse(BaseModel):
    """HRF and MMF allocations of one problem"""
    hrf: Allocation
    mmf: Allocation


class ScenarioCheckResponse(BaseModel):
    """Outcome of validating a scenario document"""
    valid: bool
    errors: List[str] = []


class BundledScenariosResponse(BaseModel):
    """Scenario names usable with the CLI or as files"""
    scenarios: List[str]
