"""
Main Application Entry Point - A-Geometry API Server

This module serves as the HTTP entry point of the toolkit. It configures
logging, creates the FastAPI server and registers one router per feature
under the versioned API prefix.

API Structure:
    - All API endpoints are prefixed with '/api/v1'
    - /a-space, /isometry, /krein, /geodesics, /sequence, /suite
    - Domain errors become {"success": false, ...} with 422 or 409

Usage:
    Development:
        python main.py

    Production:
        uvicorn main:app --host 0.0.0.0 --port 8000 --workers 4
"""

from dotenv import load_dotenv

from config import get_app_settings
from core.logging import setup_logging

load_dotenv()
settings = get_app_settings()
setup_logging(
    log_level=settings.log_level,
    log_file=settings.log_file,
    max_file_size=8 * 1024 * 1024,  # 8MB per file
    backup_count=3,
)

import logging

import uvicorn
from fastapi import HTTPException, Request, responses

from core.server import create_server
from features.a_space.router import router as a_space_router
from features.geodesics.router import router as geodesics_router
from features.isometry_manifold.router import router as isometry_router
from features.krein_extension.router import router as krein_router
from features.sequence_models.router import router as sequence_router
from features.suite.router import router as suite_router

logger = logging.getLogger(__name__)

app = create_server()

app.include_router(a_space_router, prefix=settings.api_v1_prefix)
app.include_router(isometry_router, prefix=settings.api_v1_prefix)
app.include_router(krein_router, prefix=settings.api_v1_prefix)
app.include_router(geodesics_router, prefix=settings.api_v1_prefix)
app.include_router(sequence_router, prefix=settings.api_v1_prefix)
app.include_router(suite_router, prefix=settings.api_v1_prefix)


@app.exception_handler(HTTPException)
async def http_exception_handler(request: Request, exc: HTTPException):
    return responses.JSONResponse(
        status_code=exc.status_code,
        content={"success": False, "message": exc.detail, "code": exc.status_code},
    )


@app.get("/")
async def root():
    return {"message": f"{settings.app_name} is running!"}


@app.get("/health")
async def health_check():
    return {"status": "healthy", "version": settings.version}


def main():
    """Main Function"""
    logger.info(f"Serving {settings.app_name} {settings.version}")
    uvicorn.run("main:app", host="0.0.0.0")


if __name__ == "__main__":
    main()
