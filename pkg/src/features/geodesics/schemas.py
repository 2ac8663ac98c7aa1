"""
Geodesic Schema Models Module

A tangent vector is given either by its H-model velocity ``V`` or by an
L-model Hermitian generator ``H`` (then ``V = i H T``).
"""

from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from core.serialization import FormPayload, MatrixPayload
from features.a_space.schemas import BaseResponse
from models import AIsometry


class TangentRequest(BaseModel):
    form: FormPayload
    T: MatrixPayload
    source: Optional[FormPayload] = None
    V: Optional[MatrixPayload] = None
    H: Optional[MatrixPayload] = None

    @model_validator(mode="after")
    def _one_direction(self) -> "TangentRequest":
        if (self.V is None) == (self.H is None):
            raise ValueError("give exactly one of V and H")
        return self

    def to_isometry(self) -> AIsometry:
        form = self.form.to_form()
        source = self.source.to_source_form(form) if self.source else None
        return AIsometry(form, self.T.to_array(), source)


class CurveRequest(TangentRequest):
    ts: List[float] = Field(default_factory=lambda: [0.0, 1.0, 2.0, 3.0])
    t1: Optional[float] = Field(default=None, ge=0.0)


class RaceRequest(TangentRequest):
    t1: float = Field(..., ge=0.0)
    trials: int = Field(default=200, ge=0)
    seed: int = 0


class CurveSample(BaseModel):
    t: float
    isometry_defect: float
    speed: float


class CurveResponse(BaseResponse):
    Z: MatrixPayload
    Z_l: MatrixPayload
    time_scale: float
    t_max: float
    tangent_norm: float
    extension_method: Optional[str] = None
    samples: List[CurveSample]
    length: Optional[float] = None


class RaceReport(BaseResponse):
    """Lengths of the geodesic and of every competitor, in trial order."""

    t1: float
    geodesic_length: float
    competitor_lengths: List[float]
    min_length: Optional[float] = None
    median_length: Optional[float] = None
    violations: int
    max_endpoint_residual: float
    seed: int
    trials: int
