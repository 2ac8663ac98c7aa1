"""
JSON wire format shared by the CLI, the HTTP routers and the reports.

A matrix travels as ``{"rows": n, "cols": m, "data": [[re, im], ...]}`` in
row-major order; a weight travels as its matrix plus bookkeeping flags.
Both models also accept a plain nested list of numbers or ``[re, im]``
pairs, which is how hand-written input files usually spell a matrix.
"""

import dataclasses
import json
import logging
from pathlib import Path
from typing import Any, List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator

from config import get_app_settings
from core.exceptions import InputError, ShapeMismatch
from core.numerics import CMatrix, as_cmatrix
from models import AForm

logger = logging.getLogger(__name__)


def _nested_to_array(value: Any) -> CMatrix:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return as_cmatrix(arr[..., 0] + 1j * arr[..., 1])
    return as_cmatrix(arr)


class MatrixPayload(BaseModel):
    """Row-major complex matrix."""

    rows: int = Field(..., ge=0)
    cols: int = Field(..., ge=0)
    data: List[List[float]] = Field(default_factory=list)

    @model_validator(mode="before")
    @classmethod
    def _accept_nested(cls, value: Any) -> Any:
        if isinstance(value, (list, tuple)):
            M = _nested_to_array(value)
            return {
                "rows": M.shape[0],
                "cols": M.shape[1],
                "data": [[float(z.real), float(z.imag)] for z in M.reshape(-1)],
            }
        return value

    @model_validator(mode="after")
    def _check_length(self) -> "MatrixPayload":
        if len(self.data) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.data)}"
            )
        if any(len(pair) != 2 for pair in self.data):
            raise ValueError("every entry must be a [re, im] pair")
        return self

    @classmethod
    def from_array(cls, M: Any) -> "MatrixPayload":
        M = as_cmatrix(M)
        flat = M.reshape(-1)
        return cls(
            rows=M.shape[0],
            cols=M.shape[1],
            data=[[float(z.real), float(z.imag)] for z in flat],
        )

    def to_array(self) -> CMatrix:
        values = np.array(
            [complex(re, im) for re, im in self.data], dtype=np.complex128
        )
        return as_cmatrix(values.reshape(self.rows, self.cols))


class FormPayload(BaseModel):
    """Serialized weight ``A``."""

    matrix: MatrixPayload
    psd_checked: bool = False
    normalized: bool = False
    scale: float = 1.0

    @model_validator(mode="before")
    @classmethod
    def _accept_bare_matrix(cls, value: Any) -> Any:
        if isinstance(value, (list, tuple)) or (
            isinstance(value, dict) and "matrix" not in value
        ):
            return {"matrix": value}
        return value

    @classmethod
    def from_form(cls, form: AForm) -> "FormPayload":
        return cls(
            matrix=MatrixPayload.from_array(form.A),
            psd_checked=form.psd_checked,
            normalized=form.normalized,
            scale=form.scale,
        )

    def to_form(self, normalize: Optional[bool] = None) -> AForm:
        """Validate and build the form.

        Args:
            normalize (Optional[bool]): Override of the configured
                ``normalize_forms`` policy. Payloads already marked as
                normalized are not rescaled again.

        Returns:
            AForm: Form with ``psd_checked`` set.
        """
        if normalize is None:
            normalize = get_app_settings().normalize_forms
        form = AForm.from_matrix(
            self.matrix.to_array(), normalize=normalize and not self.normalized
        )
        if self.normalized:
            # keep the original divisor when a normalized payload is reloaded
            return dataclasses.replace(form, scale=self.scale, normalized=True)
        return form

    def to_source_form(self, target: AForm) -> AForm:
        """Source weight of a rectangular isometry into ``target``.

        The source is divided by the target's scale so that ``T*AT = A0``
        survives normalization of the target.
        """
        if self.normalized:
            return self.to_form(normalize=False)
        raw = AForm.from_matrix(self.matrix.to_array() / target.scale)
        return dataclasses.replace(raw, scale=target.scale, normalized=target.normalized)


def matrix_from_json(value: Union[dict, list]) -> CMatrix:
    """Accept either the wire format or a plain nested list of numbers.

    Raises:
        ShapeMismatch: If the value cannot be read as a matrix.
    """
    try:
        return MatrixPayload.model_validate(value).to_array()
    except ValueError as e:
        raise ShapeMismatch(f"invalid matrix payload: {e}")


def form_from_json(value: Union[dict, list], normalize: Optional[bool] = None) -> AForm:
    try:
        payload = FormPayload.model_validate(value)
    except ValueError as e:
        raise ShapeMismatch(f"invalid form payload: {e}")
    return payload.to_form(normalize)


def load_json(path: Union[str, Path]) -> Any:
    """Read a JSON document, raising ``InputError`` on any I/O or parse failure."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Failed to read input {path}: {str(e)}")
        raise InputError(f"cannot read JSON input {path}: {e}")
