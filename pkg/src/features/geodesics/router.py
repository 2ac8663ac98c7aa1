"""
Geodesics API Router Module

All routes are prefixed with '/geodesics'.
"""

import logging

from fastapi import APIRouter, Depends

from features.geodesics.dependency import get_geodesic_service
from features.geodesics.schemas import (
    CurveRequest,
    CurveResponse,
    RaceReport,
    RaceRequest,
    TangentRequest,
)
from features.geodesics.services import GeodesicService
from models import TangentVector

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/geodesics", tags=["API Endpoints for minimal curves"])


def _tangent(request: TangentRequest, service: GeodesicService) -> TangentVector:
    T = request.to_isometry()
    if request.H is not None:
        return service.tangent_from_hermitian(T, request.H.to_array())
    return service.make_tangent(T, request.V.to_array())


@router.post(
    "/curve",
    description="API endpoint to build the minimal curve with a given initial velocity",
    response_model=CurveResponse,
    summary="Minimal curve",
    responses={
        200: {"description": "Curve built and sampled"},
        422: {"description": "Velocity is not tangent"},
    },
)
def minimal_curve(
    request: CurveRequest,
    service: GeodesicService = Depends(get_geodesic_service),
):
    """
    Build ``delta(t) = exp(itZ) T`` and sample it.

    Args:
        request (CurveRequest): Base isometry, velocity or generator, sample times.
        service (GeodesicService): The geodesic service instance.

    Returns:

        CurveResponse: ``Z`` in both models, samples and optionally the length on ``[0, t1]``.
    """
    return service.curve_report(_tangent(request, service), request.ts, request.t1)


@router.post(
    "/race",
    description="API endpoint to race the minimal curve against random competitors",
    response_model=RaceReport,
    summary="Competitor race",
    responses={
        200: {"description": "Race finished"},
        422: {"description": "t1 outside [0, pi] or velocity not tangent"},
    },
)
def race(
    request: RaceRequest,
    service: GeodesicService = Depends(get_geodesic_service),
):
    return service.race(_tangent(request, service), request.t1, request.trials, request.seed)
