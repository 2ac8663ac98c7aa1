"""
Dependency Injection Module for Krein Extension Features
"""

from fastapi import Depends

from config import (
    SolverSettings,
    ToleranceSettings,
    get_solver_settings,
    get_tolerance_settings,
)
from features.krein_extension.services import KreinExtensionService


def get_krein_service(
    tolerances: ToleranceSettings = Depends(get_tolerance_settings),
    solver: SolverSettings = Depends(get_solver_settings),
) -> KreinExtensionService:
    """
    Dependency function to create and provide a KreinExtensionService instance.

    Args:
        tolerances (ToleranceSettings): Verification tolerances.
        solver (SolverSettings): Escalation and Dykstra settings.

    Returns:
        KreinExtensionService: Service initialised with the given settings.
    """
    return KreinExtensionService(tolerances, solver)
