"""
Suite Schema Models Module
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from features.a_space.schemas import BaseResponse


class SuiteRequest(BaseModel):
    seed: Optional[int] = None
    scale: float = Field(default=1.0, gt=0.0)
    only: Optional[List[str]] = None


class SuiteItemReport(BaseModel):
    name: str
    passed: bool
    trials: int
    metrics: Dict[str, Any]


class SuiteReport(BaseResponse):
    seed: int
    scale: float
    items: List[SuiteItemReport]
