"""
Middleware for request logging and error handling
"""
import logging
import time
from typing import Callable

from fastapi import Request, Response, status
from fastapi.responses import JSONResponse
from starlette.middleware.base import BaseHTTPMiddleware

from app.core.exceptions import HerculesException

logger = logging.getLogger(__name__)


def error_body(message: str, status_code: int, path: str) -> dict:
    """Uniform JSON error payload"""
    return {"error": message, "status_code": status_code, "path": path}


class LoggingMiddleware(BaseHTTPMiddleware):
    """Log one structured record per request"""

    async def dispatch(self, request: Request, call_next: Callable) -> Response:
        start_time = time.time()
        try:
            response = await call_next(request)
        except Exception:
            logger.error(
                "Request failed",
                extra={
                    "method": request.method,
                    "path": request.url.path,
                    "duration_s": round(time.time() - start_time, 6),
                },
                exc_info=True,
            )
            raise

        duration = time.time() - start_time
        logger.info(
            "Request handled",
            extra={
                "method": request.method,
                "path": request.url.path,
                "status_code": response.status_code,
                "duration_s": round(duration, 6),
                "client": request.client.host if request.client else None,
            },
        )
        response.headers["X-Process-Time"] = str(duration)
        return response


class ErrorHandlingMiddleware(BaseHTTPMiddleware):
    """Turn exceptions escaping the routes into JSON error bodies"""

    async def dispatch(self, request: Request, call_next: Callable) -> Response:
        try:
            return await call_next(request)

        except HerculesException as e:
            return JSONResponse(
                status_code=e.status_code,
                content=error_body(e.message, e.status_code, request.url.path),
            )

        except ValueError as e:
            return JSONResponse(
                status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
                content=error_body(str(e), 422, request.url.path),
            )

        except Exception as e:
            logger.exception(f"Unexpected error: {str(e)}")
            return JSONResponse(
                status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
                content=error_body("Internal server error", 500, request.url.path),
            )
