"""
Acceptance Suite API Router Module

All routes are prefixed with '/suite'.
"""

import logging

from fastapi import APIRouter, Depends

from features.suite.dependency import get_suite_service
from features.suite.schemas import SuiteReport, SuiteRequest
from features.suite.services import AcceptanceSuiteService

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/suite", tags=["API Endpoints for the acceptance suite"])


@router.get(
    "/items",
    description="API endpoint to list the acceptance items in run order",
    summary="Suite items",
)
def list_items(service: AcceptanceSuiteService = Depends(get_suite_service)):
    return {"items": list(service.items)}


@router.post(
    "",
    description="API endpoint to run the acceptance suite on seeded random instances",
    response_model=SuiteReport,
    summary="Run acceptance suite",
    responses={
        200: {"description": "Suite finished; success is false if any item failed"},
        422: {"description": "Unknown item or non-positive scale"},
    },
)
def run_suite(
    request: SuiteRequest,
    service: AcceptanceSuiteService = Depends(get_suite_service),
):
    """
    Run the suite.

    Args:
        request (SuiteRequest): Seed, trial scale and optional item subset.
        service (AcceptanceSuiteService): The suite service instance.

    Returns:
        SuiteReport: One entry per item, in canonical order.
    """
    logger.info(f"Running acceptance suite seed={request.seed} scale={request.scale}")
    return service.suite_report(request.seed, request.scale, request.only)
