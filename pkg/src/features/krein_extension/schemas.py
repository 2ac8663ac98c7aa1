"""
Krein Extension Schema Models Module

Request and response models for norm-one symmetric extensions. ``X`` and ``P``
are given in L-model coordinates; ``X`` is divided by ``||XP||`` on ingestion
and the divisor is echoed back as ``scale``.
"""

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field

from core.serialization import MatrixPayload
from features.a_space.schemas import BaseResponse
from models import KreinInstance


class KreinRequest(BaseModel):
    X: MatrixPayload
    P: MatrixPayload
    m: Optional[float] = Field(default=None, ge=1.0)
    method: Literal["auto", "paper", "completion", "dykstra"] = "auto"

    def to_instance(self) -> KreinInstance:
        return KreinInstance.normalized(self.X.to_array(), self.P.to_array())


class KreinResponse(BaseResponse):
    """A verified extension ``Z`` with every residual and the route that produced it."""

    Z: MatrixPayload
    m_used: float
    m_initial: float
    escalations: int
    method: str
    norm_Z: float
    construction_norm_Z: Optional[float] = None
    constraint_residual: float
    hermiticity_defect: float
    iterations: int
    proof_checks: Dict[str, float]
    scale: float


class NormProfileEntry(BaseModel):
    m: float
    norm_B: float
    m_norm_B: float
    norm_Z: float


class NormProfileResponse(BaseResponse):
    profile: List[NormProfileEntry]
