"""
Isometry Manifold Schema Models Module

Request and response models for isometry checks, cross-sections, conjugators
and the dense Wold split. A request carries the target weight ``form``, the
isometry ``T`` and, for rectangular isometries, the ``source`` weight.
"""

from typing import Dict, Optional, Tuple

from pydantic import BaseModel, Field

from core.serialization import FormPayload, MatrixPayload
from features.a_space.schemas import BaseResponse
from models import AForm, AIsometry, AUnitary


class IsometryRequest(BaseModel):
    form: FormPayload
    T: MatrixPayload
    source: Optional[FormPayload] = None
    power: Optional[int] = Field(default=None, ge=1)

    def to_models(self) -> Tuple[AForm, AIsometry]:
        form = self.form.to_form()
        source = self.source.to_source_form(form) if self.source else None
        return form, AIsometry(form, self.T.to_array(), source)


class SectionRequest(BaseModel):
    form: FormPayload
    T0: MatrixPayload
    T: MatrixPayload
    source: Optional[FormPayload] = None

    def to_models(self) -> Tuple[AIsometry, AIsometry]:
        form = self.form.to_form()
        source = self.source.to_source_form(form) if self.source else None
        return (
            AIsometry(form, self.T0.to_array(), source),
            AIsometry(form, self.T.to_array(), source),
        )


class ConjugatorRequest(BaseModel):
    form: FormPayload
    T1: MatrixPayload
    T2: MatrixPayload
    H: Optional[MatrixPayload] = Field(
        default=None, description="A-unitary with H P1 H^-1 = P2; built when omitted"
    )
    source: Optional[FormPayload] = None

    def to_models(self) -> Tuple[AIsometry, AIsometry, Optional[AUnitary]]:
        form = self.form.to_form()
        source = self.source.to_source_form(form) if self.source else None
        H = AUnitary(form, self.H.to_array()) if self.H is not None else None
        return (
            AIsometry(form, self.T1.to_array(), source),
            AIsometry(form, self.T2.to_array(), source),
            H,
        )


class IsometryCheckResponse(BaseResponse):
    isometric: bool
    defect: float
    lambda_witness: float
    left_inverse_defect: float
    power: Optional[int] = None
    power_defect: Optional[float] = None


class SectionResponse(BaseResponse):
    """A-unitary ``G`` with ``G T0 = T`` and the residuals it was verified with."""

    G: MatrixPayload
    reconstruction_residual: float
    unitary_defect: float
    projection_distance: float
    sufficient_radius: float


class ConjugatorResponse(BaseResponse):
    K: MatrixPayload
    H: MatrixPayload
    reconstruction_residual: float
    unitary_defect: float
    projection_residual: float


class WoldResponse(BaseResponse):
    unitary_dim: int
    shift_dim: int
    wandering_dim: int


class EquivalenceResponse(BaseResponse):
    adjoint_exists: bool
    l_adjoint_preserves_model: bool
    range_compatible: bool
    range_condition: bool
    lambda_finite: bool
    lambda_witness: float
    half_power_witness: float
    details: Dict[str, float]
