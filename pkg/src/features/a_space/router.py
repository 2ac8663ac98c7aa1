"""
A-Space API Router Module

Routes for the A-inner-product calculus: inner products, A-adjoints, norms,
compatible projectors and the Douglas solvability test.

All routes are prefixed with '/a-space'.
"""

import logging

import numpy as np
from fastapi import APIRouter, Depends

from features.a_space.dependency import get_a_space_service
from features.a_space.schemas import (
    DouglasRequest,
    DouglasResponse,
    InnerProductRequest,
    InnerProductResponse,
    NormsResponse,
    OperatorReportResponse,
    OperatorRequest,
    ProjectorRequest,
    ProjectorResponse,
)
from features.a_space.services import ASpaceService
from models import AOperator

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/a-space", tags=["API Endpoints for the A-inner product"])


def _vector(pairs) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)


@router.post(
    "/inner",
    description="API endpoint to evaluate <f, g>_A = <Af, g>",
    response_model=InnerProductResponse,
    summary="A-inner product",
    responses={
        200: {"description": "Inner product evaluated"},
        422: {"description": "Invalid weight or vector lengths"},
    },
)
def inner_product(
    request: InnerProductRequest,
    service: ASpaceService = Depends(get_a_space_service),
):
    form = request.form.to_form()
    value = service.a_inner(form, _vector(request.f), _vector(request.g))
    return InnerProductResponse(
        success=True, message="Inner product evaluated", value=[value.real, value.imag]
    )


@router.post(
    "/adjoint",
    description="API endpoint to compute the A-adjoint of an operator with its diagnostics",
    response_model=OperatorReportResponse,
    summary="A-adjoint",
    responses={
        200: {"description": "Operator analysed"},
        422: {"description": "Invalid weight or operator"},
    },
)
def operator_adjoint(
    request: OperatorRequest,
    service: ASpaceService = Depends(get_a_space_service),
):
    """
    Compute ``B^# = A^{-1} B* A`` together with both norms and the L-model form.

    Args:
        request (OperatorRequest): Weight and operator in the JSON matrix format.
        service (ASpaceService): The A-space service instance.

    Returns:

        OperatorReportResponse: Adjoint, L-model operator, norms and symmetry flag.
    """
    form = request.form.to_form()
    return service.operator_report(AOperator(form, request.operator.to_array()))


@router.post(
    "/norms",
    description="API endpoint to compute the operator norm, the adjoint norm and the L-model norm",
    response_model=NormsResponse,
    summary="Operator norms",
)
def operator_norms(
    request: OperatorRequest,
    service: ASpaceService = Depends(get_a_space_service),
):
    form = request.form.to_form()
    report = service.operator_report(AOperator(form, request.operator.to_array()))
    return NormsResponse(
        success=True,
        message="Norms computed",
        norm=report.norm,
        adjoint_norm=report.adjoint_norm,
        banach_norm=report.banach_norm,
        l_norm=report.l_norm,
    )


@router.post(
    "/projector",
    description="API endpoint to build the A-symmetric idempotent onto the span of given columns",
    response_model=ProjectorResponse,
    summary="Compatible projector",
    responses={
        200: {"description": "Compatible projector built"},
        422: {"description": "Basis is rank deficient or does not match the weight"},
    },
)
def compatible_projector(
    request: ProjectorRequest,
    service: ASpaceService = Depends(get_a_space_service),
):
    form = request.form.to_form()
    return service.projector_report(form, request.basis.to_array())


@router.post(
    "/douglas",
    description="API endpoint to decide solvability of AX = B by three equivalent criteria",
    response_model=DouglasResponse,
    summary="Douglas range inclusion",
    responses={
        200: {"description": "Criteria evaluated"},
        422: {"description": "Coefficient is not positive semidefinite"},
    },
)
def douglas(
    request: DouglasRequest,
    service: ASpaceService = Depends(get_a_space_service),
):
    return service.douglas_report(request.A.to_array(), request.B.to_array())
