"""
Dependency Injection Module for A-Space Features

Provides the configured `ASpaceService` to route handlers through
FastAPI's `Depends()` and to the CLI by direct call.
"""

from fastapi import Depends

from config import (
    SolverSettings,
    ToleranceSettings,
    get_solver_settings,
    get_tolerance_settings,
)
from features.a_space.services import ASpaceService


def get_a_space_service(
    tolerances: ToleranceSettings = Depends(get_tolerance_settings),
    solver: SolverSettings = Depends(get_solver_settings),
) -> ASpaceService:
    """
    Dependency function to create and provide an ASpaceService instance.

    Args:
        tolerances (ToleranceSettings): Verification tolerances.
        solver (SolverSettings): Solver settings.

    Returns:
        ASpaceService: Service initialised with the given settings.
    """
    return ASpaceService(tolerances, solver)
