"""
FastAPI Server Module

This module provides functionality to create and configure the FastAPI
application serving the A-geometry toolkit, with lifecycle logging and a
handler translating domain errors into JSON responses.
"""

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request, responses
from fastapi.middleware.cors import CORSMiddleware

from config import get_app_settings, get_solver_settings, get_tolerance_settings
from core.exceptions import AGeometryError

logger = logging.getLogger(__name__)


def create_server():
    """
    Create and configure a FastAPI application instance.

    This function initializes the FastAPI server with:
    - Application lifecycle management
    - CORS middleware configuration
    - The domain error handler

    Returns:
        FastAPI: Configured FastAPI application instance, or None if initialization fails
    """
    app_settings = get_app_settings()

    try:

        @asynccontextmanager
        async def lifespan(app: FastAPI):
            logger.info("Starting up FastAPI application...")
            # settings are validated here
            tolerances = get_tolerance_settings()
            solver = get_solver_settings()
            logger.info(
                f"Tolerances loaded (identity={tolerances.identity:g}, section={tolerances.section:g}); "
                f"eigen solver {solver.eigen_solver}"
            )

            yield

            logger.info("Shutting down FastAPI application...")

        app = FastAPI(
            title=app_settings.app_name,
            description="""
Numerical toolkit for the geometry of isometries of a weighted inner product
<f, g>_A = <Af, g> with A a positive contraction.
Features:
- A-adjoints, compatible projectors and the Douglas test
- Local sections of the projection and isometry manifolds
- Norm-preserving symmetric extensions
- Minimal curves and competitor races
- Weighted sequence models
- Seeded acceptance suite
""",
            version=app_settings.version,
            debug=app_settings.debug,
            lifespan=lifespan,
        )

        app.add_middleware(
            CORSMiddleware,
            allow_origins=["*"],
            allow_credentials=True,
            allow_methods=["*"],
            allow_headers=["*"],
        )

        @app.exception_handler(AGeometryError)
        async def a_geometry_exception_handler(request: Request, exc: AGeometryError):
            logger.warning(f"{request.url.path} failed with {exc.code}: {exc.message}")
            return responses.JSONResponse(
                status_code=exc.status_code,
                content={
                    "success": False,
                    "message": exc.message,
                    "code": exc.status_code,
                    "error": exc.to_dict(),
                },
            )

        return app

    except Exception as e:
        logger.error(f"Failed to create FastAPI server: {e}", exc_info=True)
        return None
