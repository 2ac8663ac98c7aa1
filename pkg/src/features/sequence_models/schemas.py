"""
Sequence Model Schema Models Module

Requests name built-in operators and spaces; responses carry verdicts with
their witness data. Index lists are truncated to a fixed number of entries,
counts are always complete.
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from features.a_space.schemas import BaseResponse


class SeqRequest(BaseModel):
    operator: str
    space: Optional[str] = None
    horizon: Optional[int] = Field(default=None, ge=8)


class DivergenceRequest(BaseModel):
    K: int = Field(default=1_000_000, ge=1)


class WitnessEntry(BaseModel):
    index: int
    ratio: float


class BoundednessReport(BaseModel):
    bounded_evidence: bool
    sup_ratio: float
    trend: str
    window_sups: List[float]
    witnesses: List[WitnessEntry]


class AdjointabilityResponse(BaseResponse):
    operator: str
    space: str
    horizon: int
    verdict: str
    witness_map: Optional[str] = Field(
        default=None, description="'adjoint' or 'operator': the map whose H-ratio grows"
    )
    operator_bound: BoundednessReport
    adjoint_bound: BoundednessReport


class SeqWoldResponse(BaseResponse):
    operator: str
    horizon: int
    wandering_count: int
    unitary_count: int
    undetermined_count: int
    layer_count: int
    layer_sizes: List[int]
    wandering: List[int]
    unitary: List[int]
    undetermined: List[int]
    shift_layers: List[List[int]]


class DivergenceResponse(BaseResponse):
    K: int
    final_partial_sum: float
    closed_form: float
    log_estimate: float
    witness_h_norm_sq: float
    monotone: bool
    checkpoints: Dict[str, float]
