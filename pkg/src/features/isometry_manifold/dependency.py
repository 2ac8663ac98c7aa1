"""
Dependency Injection Module for Isometry Manifold Features
"""

from fastapi import Depends

from config import (
    SolverSettings,
    ToleranceSettings,
    get_solver_settings,
    get_tolerance_settings,
)
from features.a_space.dependency import get_a_space_service
from features.a_space.services import ASpaceService
from features.isometry_manifold.services import IsometryManifoldService


def get_isometry_service(
    tolerances: ToleranceSettings = Depends(get_tolerance_settings),
    solver: SolverSettings = Depends(get_solver_settings),
    a_space: ASpaceService = Depends(get_a_space_service),
) -> IsometryManifoldService:
    """
    Dependency function to create and provide an IsometryManifoldService instance.

    Args:
        tolerances (ToleranceSettings): Verification tolerances.
        solver (SolverSettings): Solver settings.
        a_space (ASpaceService): A-space service, provided by `get_a_space_service`.

    Returns:
        IsometryManifoldService: Service sharing the given settings.
    """
    return IsometryManifoldService(tolerances, solver, a_space)
