"""
Dependency Injection Module for Geodesic Features
"""

from fastapi import Depends

from config import (
    AppSettings,
    SolverSettings,
    ToleranceSettings,
    get_app_settings,
    get_solver_settings,
    get_tolerance_settings,
)
from features.geodesics.services import GeodesicService
from features.krein_extension.dependency import get_krein_service
from features.krein_extension.services import KreinExtensionService


def get_geodesic_service(
    tolerances: ToleranceSettings = Depends(get_tolerance_settings),
    solver: SolverSettings = Depends(get_solver_settings),
    app: AppSettings = Depends(get_app_settings),
    krein: KreinExtensionService = Depends(get_krein_service),
) -> GeodesicService:
    """
    Dependency function to create and provide a GeodesicService instance.

    Args:
        tolerances (ToleranceSettings): Verification tolerances.
        solver (SolverSettings): Quadrature settings.
        app (AppSettings): Thread cap.
        krein (KreinExtensionService): Extension service, provided by `get_krein_service`.

    Returns:
        GeodesicService: Service initialised with the given settings.
    """
    return GeodesicService(tolerances, solver, app, krein)
