"""
Dependency Injection Module for the Acceptance Suite
"""

from fastapi import Depends

from config import AppSettings, ToleranceSettings, get_app_settings, get_tolerance_settings
from features.a_space.dependency import get_a_space_service
from features.a_space.services import ASpaceService
from features.geodesics.dependency import get_geodesic_service
from features.geodesics.services import GeodesicService
from features.isometry_manifold.dependency import get_isometry_service
from features.isometry_manifold.services import IsometryManifoldService
from features.krein_extension.dependency import get_krein_service
from features.krein_extension.services import KreinExtensionService
from features.sequence_models.dependency import get_sequence_service
from features.sequence_models.services import SequenceModelService
from features.suite.services import AcceptanceSuiteService


def get_suite_service(
    tolerances: ToleranceSettings = Depends(get_tolerance_settings),
    app: AppSettings = Depends(get_app_settings),
    a_space: ASpaceService = Depends(get_a_space_service),
    isometry: IsometryManifoldService = Depends(get_isometry_service),
    krein: KreinExtensionService = Depends(get_krein_service),
    geodesics: GeodesicService = Depends(get_geodesic_service),
    sequence: SequenceModelService = Depends(get_sequence_service),
) -> AcceptanceSuiteService:
    """
    Dependency function to create and provide an AcceptanceSuiteService instance.

    Returns:
        AcceptanceSuiteService: Suite wired to every feature service.
    """
    return AcceptanceSuiteService(tolerances, app, a_space, isometry, krein, geodesics, sequence)
