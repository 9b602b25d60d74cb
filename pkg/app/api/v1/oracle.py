"""
Allocation oracle endpoints
"""
from fastapi import APIRouter

from app.schemas.api import OracleResponse
from app.schemas.results import AllocationProblem
from app.services.fairness import hrf_allocate, mmf_allocate

router = APIRouter(prefix="/oracle", tags=["Oracle"])


@router.post("/allocate", response_model=OracleResponse)
def allocate(problem: AllocationProblem):
    """
    Compute the HRF and max-min fair allocations of a single bottleneck

    - Requirements must satisfy 0 < min_rate < max_rate
    - Bounded connections are capped at max_rate unless respect_bounds is false
    """
    return OracleResponse(hrf=hrf_allocate(problem), mmf=mmf_allocate(problem))
