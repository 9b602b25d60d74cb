"""
Main FastAPI application
"""
import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request, status
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from app.api.router import api_router
from app.config import settings
from app.core.exceptions import HerculesException, InvalidScenario
from app.core.logging import configure_logging
from app.core.middleware import ErrorHandlingMiddleware, LoggingMiddleware, error_body

configure_logging(settings.LOG_LEVEL, settings.LOG_FORMAT)

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Log startup and shutdown"""
    logger.info(
        "Starting service",
        extra={
            "app_name": settings.APP_NAME,
            "version": settings.APP_VERSION,
            "environment": settings.ENVIRONMENT,
            "scenario_dir": str(settings.scenario_path),
        },
    )
    yield
    logger.info("Service stopped")


app = FastAPI(
    title=settings.APP_NAME,
    version=settings.APP_VERSION,
    description="Requirement-aware congestion control: allocation oracles and bottleneck simulations",
    docs_url="/docs",
    redoc_url="/redoc",
    openapi_url="/openapi.json",
    lifespan=lifespan,
)

app.add_middleware(LoggingMiddleware)
app.add_middleware(ErrorHandlingMiddleware)


@app.exception_handler(HerculesException)
async def hercules_exception_handler(request: Request, exc: HerculesException):
    """Handle application exceptions"""
    body = error_body(exc.message, exc.status_code, request.url.path)
    if isinstance(exc, InvalidScenario):
        body["details"] = exc.errors
    return JSONResponse(status_code=exc.status_code, content=body)


@app.exception_handler(RequestValidationError)
async def validation_exception_handler(request: Request, exc: RequestValidationError):
    """Handle request body validation errors"""
    body = error_body("Validation error", status.HTTP_422_UNPROCESSABLE_ENTITY, request.url.path)
    body["details"] = [
        {
            "field": " -> ".join(str(loc) for loc in error["loc"]),
            "message": error["msg"],
            "type": error["type"],
        }
        for error in exc.errors()
    ]
    return JSONResponse(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, content=body)


app.include_router(api_router)


@app.get("/health", tags=["Health"])
async def health_check():
    """
    Health check endpoint

    Returns application status and version
    """
    return {
        "status": "healthy",
        "app_name": settings.APP_NAME,
        "version": settings.APP_VERSION,
        "environment": settings.ENVIRONMENT,
    }


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(
        "app.main:app",
        host=settings.HOST,
        port=settings.PORT,
        reload=settings.DEBUG,
        log_level=settings.LOG_LEVEL.lower(),
    )
