"""
A-Space Schema Models Module

This module defines Pydantic models (schemas) used for data validation and
serialization of A-inner-product requests and reports. Matrices use the shared
row-major ``[re, im]`` wire format.
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from core.serialization import FormPayload, MatrixPayload


class BaseResponse(BaseModel):
    """
    Base schema for responses.

    A common response structure used across every feature so that the CLI and
    the HTTP layer report success and a short message the same way.
    """

    success: bool
    message: str


class InnerProductRequest(BaseModel):
    form: FormPayload
    f: List[List[float]] = Field(..., description="Vector as [re, im] pairs")
    g: List[List[float]] = Field(..., description="Vector as [re, im] pairs")


class InnerProductResponse(BaseResponse):
    value: List[float] = Field(..., description="[re, im] of <Af, g>")


class OperatorRequest(BaseModel):
    form: FormPayload
    operator: MatrixPayload


class OperatorReportResponse(BaseResponse):
    """Adjoint, both norms, L-model form and symmetry of an operator."""

    adjoint: MatrixPayload
    l_model: MatrixPayload
    norm: float
    adjoint_norm: float
    banach_norm: float
    l_norm: float
    a_symmetric: bool
    adjoint_defect: float


class ProjectorRequest(BaseModel):
    form: FormPayload
    basis: MatrixPayload = Field(..., description="Columns spanning the subspace")


class ProjectorResponse(BaseResponse):
    Q: MatrixPayload
    Q_l: MatrixPayload
    orthogonal_projection: MatrixPayload
    rank: int
    defects: Dict[str, float]


class DouglasRequest(BaseModel):
    A: MatrixPayload
    B: MatrixPayload


class DouglasResponse(BaseResponse):
    """Verdicts of the three equivalent solvability criteria for ``AX = B``."""

    solvable: bool
    range_inclusion: bool
    lambda_feasible: bool
    X: Optional[MatrixPayload] = None
    lam: Optional[float] = None
    residual: float
    range_defect: float


class NormsResponse(BaseResponse):
    norm: float
    adjoint_norm: float
    banach_norm: float
    l_norm: float
