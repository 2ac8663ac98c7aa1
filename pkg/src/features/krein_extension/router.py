"""
Krein Extension API Router Module

All routes are prefixed with '/krein'.
"""

import logging

from fastapi import APIRouter, Depends

from features.krein_extension.dependency import get_krein_service
from features.krein_extension.schemas import KreinRequest, KreinResponse, NormProfileResponse
from features.krein_extension.services import KreinExtensionService

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/krein", tags=["API Endpoints for symmetric extensions"])


@router.post(
    "/extend",
    description="API endpoint to extend XP to a Hermitian Z with ZP = XP and ||Z|| = 1",
    response_model=KreinResponse,
    summary="Norm-one symmetric extension",
    responses={
        200: {"description": "Extension computed"},
        409: {"description": "Construction or fallback failed"},
        422: {"description": "X is not Hermitian or P is not an orthogonal projection"},
    },
)
def extend(
    request: KreinRequest,
    service: KreinExtensionService = Depends(get_krein_service),
):
    """
    Compute a norm-one symmetric extension.

    Args:
        request (KreinRequest): ``X``, ``P``, optional initial ``m`` and the method.
        service (KreinExtensionService): The extension service instance.

    Returns:

        KreinResponse: ``Z`` with the method used, ``m`` and all residuals.
    """
    return service.extend_report(request.to_instance(), request.method, request.m)


@router.post(
    "/profile",
    description="API endpoint to tabulate the construction's norms along a grid of m",
    response_model=NormProfileResponse,
    summary="Norm profile in m",
)
def profile(
    request: KreinRequest,
    service: KreinExtensionService = Depends(get_krein_service),
):
    rows = service.profile_report(request.to_instance())
    return NormProfileResponse(success=True, message="Profile computed", profile=rows)
