"""
Sequence Model API Router Module

All routes are prefixed with '/sequence'.
"""

import logging

from fastapi import APIRouter, Depends

from features.sequence_models.dependency import get_sequence_service
from features.sequence_models.schemas import (
    AdjointabilityResponse,
    DivergenceRequest,
    DivergenceResponse,
    SeqRequest,
    SeqWoldResponse,
)
from features.sequence_models.services import SequenceModelService

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/sequence", tags=["API Endpoints for sequence models"])


@router.post(
    "/adjointability",
    description="API endpoint for adjointability evidence of a built-in basis map",
    response_model=AdjointabilityResponse,
    summary="Adjointability evidence",
    responses={
        200: {"description": "Verdict computed"},
        422: {"description": "Unknown operator or space"},
    },
)
def adjointability(
    request: SeqRequest,
    service: SequenceModelService = Depends(get_sequence_service),
):
    """
    Evaluate the boundedness on H of a built-in operator and of its adjoint.

    Args:
        request (SeqRequest): Operator name, optional space and horizon.
        service (SequenceModelService): The sequence model service instance.

    Returns:

        AdjointabilityResponse: Verdict, witness map and both boundedness reports.
    """
    return service.adjointability_report(request.operator, request.space, request.horizon)


@router.post(
    "/wold",
    description="API endpoint for the index-level Wold split of a built-in basis isometry",
    response_model=SeqWoldResponse,
    summary="Sequence Wold split",
)
def wold(
    request: SeqRequest,
    service: SequenceModelService = Depends(get_sequence_service),
):
    return service.wold_report(request.operator, request.horizon)


@router.post(
    "/demo",
    description="API endpoint for the divergent partial sums of the non-adjointability witness",
    response_model=DivergenceResponse,
    summary="Divergence witness",
)
def demo(
    request: DivergenceRequest,
    service: SequenceModelService = Depends(get_sequence_service),
):
    return service.divergence_report(request.K)
