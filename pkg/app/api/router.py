"""
API Router - combines all API endpoints
"""
from fastapi import APIRouter

from app.api.v1 import oracle, scenarios

api_v1_router = APIRouter(prefix="/v1")
api_v1_router.include_router(oracle.router)
api_v1_router.include_router(scenarios.router)

api_router = APIRouter(prefix="/api")
api_router.include_router(api_v1_router)
