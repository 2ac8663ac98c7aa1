"""
Isometry Manifold API Router Module

Routes for isometry checks, local cross-sections, conjugators and the dense
Wold split.

All routes are prefixed with '/isometry'.
"""

import logging

from fastapi import APIRouter, Depends

from features.isometry_manifold.dependency import get_isometry_service
from features.isometry_manifold.schemas import (
    ConjugatorRequest,
    ConjugatorResponse,
    EquivalenceResponse,
    IsometryCheckResponse,
    IsometryRequest,
    SectionRequest,
    SectionResponse,
    WoldResponse,
)
from features.isometry_manifold.services import IsometryManifoldService

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/isometry", tags=["API Endpoints for A-isometries"])


@router.post(
    "/check",
    description="API endpoint to verify T*AT = A0 and report the adjointability witness",
    response_model=IsometryCheckResponse,
    summary="Check A-isometry",
    responses={
        200: {"description": "Check evaluated"},
        422: {"description": "Invalid weight or operator"},
    },
)
def check_isometry(
    request: IsometryRequest,
    service: IsometryManifoldService = Depends(get_isometry_service),
):
    """
    Verify an A-isometry.

    Args:
        request (IsometryRequest): Weight, operator, optional source weight and power.
        service (IsometryManifoldService): The isometry service instance.

    Returns:

        IsometryCheckResponse: Defect, lambda witness and left-inverse defect.
    """
    _, T = request.to_models()
    return service.check_report(T, request.power)


@router.post(
    "/adjointability",
    description="API endpoint to evaluate the equivalent adjointability conditions",
    response_model=EquivalenceResponse,
    summary="Adjointability equivalence",
)
def adjointability(
    request: IsometryRequest,
    service: IsometryManifoldService = Depends(get_isometry_service),
):
    _, T = request.to_models()
    return service.equivalence_report(T)


@router.post(
    "/section",
    description="API endpoint to build the A-unitary carrying T0 onto a nearby T",
    response_model=SectionResponse,
    summary="Local cross-section",
    responses={
        200: {"description": "Section constructed"},
        409: {"description": "Final projections too far apart"},
        422: {"description": "Inputs are not isometries"},
    },
)
def isometry_section(
    request: SectionRequest,
    service: IsometryManifoldService = Depends(get_isometry_service),
):
    T0, T = request.to_models()
    return service.section_report(T0, T)


@router.post(
    "/conjugate",
    description="API endpoint to build K with (KH)T1 = T2",
    response_model=ConjugatorResponse,
    summary="Conjugator",
    responses={
        200: {"description": "Conjugator constructed"},
        422: {"description": "H does not conjugate the final projections"},
    },
)
def conjugate(
    request: ConjugatorRequest,
    service: IsometryManifoldService = Depends(get_isometry_service),
):
    T1, T2, H = request.to_models()
    return service.conjugator_report(T1, T2, H)


@router.post(
    "/wold",
    description="API endpoint for the Wold split of a square A-isometry",
    response_model=WoldResponse,
    summary="Dense Wold split",
)
def dense_wold(
    request: IsometryRequest,
    service: IsometryManifoldService = Depends(get_isometry_service),
):
    _, T = request.to_models()
    return service.wold_report(T)
