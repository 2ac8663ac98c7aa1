"""
Domain value types.

Every type is immutable after construction; matrices are ``numpy`` complex
arrays in H-model coordinates unless the field name ends in ``_l`` (L-model,
i.e. conjugated by the square root of the weight).
"""

import logging
from dataclasses import dataclass, field
from enum import Enum as PyEnum
from typing import Any, Callable, Dict, Mapping, Optional

import numpy as np
from numpy.typing import NDArray

from config import get_tolerance_settings
from core.exceptions import (
    InvalidInstance,
    NonHermitian,
    NotPositiveDefinite,
    ShapeMismatch,
)
from core.numerics import (
    CMatrix,
    adjoint,
    as_cmatrix,
    herm_eig,
    hermitian_part,
    is_hermitian,
    mat_exp,
    svd_norm,
)

logger = logging.getLogger(__name__)

IndexRule = Callable[[NDArray[np.int64]], NDArray[np.int64]]
CoeffRule = Callable[[NDArray[np.int64]], NDArray[np.complex128]]
WeightRule = Callable[[NDArray[np.int64]], NDArray[np.float64]]


class ExtensionMethod(str, PyEnum):
    """How a symmetric norm-one extension was obtained."""

    PAPER_CONSTRUCTION = "paper_construction"
    BLOCK_COMPLETION = "block_completion"
    DYKSTRA_FALLBACK = "dykstra_fallback"


class Trend(str, PyEnum):
    BOUNDED = "bounded"
    GROWING = "growing"


class Verdict(str, PyEnum):
    ADJOINTABLE_EVIDENCE = "adjointable_evidence"
    NON_ADJOINTABLE_EVIDENCE = "non_adjointable_evidence"


def _frozen(M: CMatrix) -> CMatrix:
    M.setflags(write=False)
    return M


@dataclass(frozen=True, eq=False)
class AForm:
    """Positive definite weight ``A`` with its cached square roots.

    ``<f, g>_A = <Af, g>``. The L-model is the coordinate change
    ``f -> A^{1/2} f``, under which operators transform by
    ``B -> A^{1/2} B A^{-1/2}``.
    """

    A: CMatrix
    sqrtA: CMatrix
    invSqrtA: CMatrix
    invA: CMatrix
    conditioning: float
    scale: float = 1.0
    normalized: bool = False
    psd_checked: bool = True

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def norm(self) -> float:
        return svd_norm(self.A)

    @classmethod
    def from_matrix(cls, A: Any, normalize: bool = False) -> "AForm":
        """Build a form from a Hermitian positive definite matrix.

        Args:
            A (Any): Matrix-like weight.
            normalize (bool): Divide by ``||A||`` so that ``A`` becomes a
                positive contraction; the divisor is kept in ``scale``.

        Returns:
            AForm: The validated form.

        Raises:
            NonHermitian: If ``A`` is not Hermitian.
            NotPositiveDefinite: If some eigenvalue is not strictly positive.
        """
        A = as_cmatrix(A, square=True)
        w, V = herm_eig(A)
        if w.size == 0 or w[0] <= 0.0:
            raise NotPositiveDefinite(
                "weight must have trivial nullspace and be positive",
                details={"min_eigenvalue": float(w[0]) if w.size else None},
            )
        scale = 1.0
        if normalize:
            scale = float(w[-1])
            w = w / scale
        conditioning = float(w[-1] / w[0])
        if conditioning > get_tolerance_settings().conditioning_warning:
            logger.warning(
                f"Weight is badly conditioned ({conditioning:.3e}); "
                "results approach the non-closed-range regime"
            )
        Vh = adjoint(V)
        return cls(
            A=_frozen(hermitian_part((V * w) @ Vh)),
            sqrtA=_frozen(hermitian_part((V * np.sqrt(w)) @ Vh)),
            invSqrtA=_frozen(hermitian_part((V / np.sqrt(w)) @ Vh)),
            invA=_frozen(hermitian_part((V / w) @ Vh)),
            conditioning=conditioning,
            scale=scale,
            normalized=normalize,
        )

    @classmethod
    def identity(cls, n: int) -> "AForm":
        return cls.from_matrix(np.eye(n))

    @classmethod
    def diagonal(cls, weights: Any, normalize: bool = False) -> "AForm":
        return cls.from_matrix(np.diag(np.asarray(weights, dtype=float)), normalize)

    def to_l(self, M: CMatrix, source: Optional["AForm"] = None) -> CMatrix:
        """L-model form ``A^{1/2} M A0^{-1/2}`` of an H-model operator."""
        source = self if source is None else source
        return self.sqrtA @ M @ source.invSqrtA

    def from_l(self, M_l: CMatrix, source: Optional["AForm"] = None) -> CMatrix:
        source = self if source is None else source
        return self.invSqrtA @ M_l @ source.sqrtA

    def sharp(self, M: CMatrix, source: Optional["AForm"] = None) -> CMatrix:
        """A-adjoint ``A0^{-1} M* A`` of ``M: (C^k, A0) -> (C^n, A)``."""
        source = self if source is None else source
        return source.invA @ adjoint(M) @ self.A


@dataclass(frozen=True, eq=False)
class AOperator:
    """Square operator on the weighted space, in H-model coordinates."""

    form: AForm
    M: CMatrix

    def __post_init__(self) -> None:
        M = as_cmatrix(self.M, square=True)
        if M.shape[0] != self.form.n:
            raise ShapeMismatch(
                f"operator of size {M.shape[0]} on a form of dimension {self.form.n}"
            )
        object.__setattr__(self, "M", _frozen(M))


@dataclass(frozen=True, eq=False)
class AProjection:
    """A-symmetric idempotent: ``Q^2 = Q`` and ``AQ = Q*A``."""

    form: AForm
    Q: CMatrix

    @property
    def rank(self) -> int:
        return int(round(np.real(np.trace(self.Q))))

    @property
    def Q_l(self) -> CMatrix:
        return self.form.to_l(self.Q)


@dataclass(frozen=True, eq=False)
class AIsometry:
    """Isometry ``T: (C^k, A0) -> (C^n, A)`` with ``T*AT = A0``.

    With ``source`` omitted the isometry is square and ``A0 = A``.
    """

    form: AForm
    T: CMatrix
    source: Optional[AForm] = None
    lambda_witness: Optional[float] = None

    def __post_init__(self) -> None:
        T = as_cmatrix(self.T)
        src = self.form if self.source is None else self.source
        if T.shape != (self.form.n, src.n):
            raise ShapeMismatch(
                f"isometry shape {T.shape} does not match forms ({self.form.n}, {src.n})"
            )
        object.__setattr__(self, "T", _frozen(T))
        object.__setattr__(self, "source", src)

    @property
    def is_square(self) -> bool:
        return self.source is self.form

    @property
    def T_l(self) -> CMatrix:
        return self.form.to_l(self.T, self.source)

    @property
    def sharp(self) -> CMatrix:
        return self.form.sharp(self.T, self.source)


@dataclass(frozen=True, eq=False)
class AUnitary(AIsometry):
    """Invertible square A-isometry with its cached inverse ``T^{-1} = T^#``."""

    inverse: Optional[CMatrix] = None

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.T.shape[0] != self.T.shape[1]:
            raise ShapeMismatch("an A-unitary must be square")
        if self.inverse is None:
            object.__setattr__(self, "inverse", _frozen(self.form.sharp(self.T)))


@dataclass(frozen=True, eq=False)
class KreinInstance:
    """Hermitian ``X`` and orthogonal projection ``P`` (L-model) with ``||XP|| = 1``."""

    X: CMatrix
    P: CMatrix
    norm_XP: float
    scale: float = 1.0

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @classmethod
    def normalized(cls, X: Any, P: Any, tol: Optional[float] = None) -> "KreinInstance":
        """Validate ``(X, P)`` and divide ``X`` by ``||XP||``.

        Args:
            X (Any): Hermitian matrix.
            P (Any): Hermitian idempotent of the same size.
            tol (Optional[float]): Tolerance for the Hermitian/idempotent checks.

        Returns:
            KreinInstance: Instance with ``||XP|| = 1``; ``scale`` is the divisor.

        Raises:
            NonHermitian: If ``X`` or ``P`` is not Hermitian.
            InvalidInstance: If ``P`` is not idempotent or ``XP = 0``.
        """
        tol = get_tolerance_settings().identity if tol is None else tol
        X = as_cmatrix(X, square=True)
        P = as_cmatrix(P, square=True)
        if X.shape != P.shape:
            raise ShapeMismatch(f"X {X.shape} and P {P.shape} differ in shape")
        if not is_hermitian(X):
            raise NonHermitian("X must be Hermitian")
        if not is_hermitian(P) or svd_norm(P @ P - P) > tol:
            raise InvalidInstance("P must be an orthogonal projection")
        X = hermitian_part(X)
        P = hermitian_part(P)
        scale = svd_norm(X @ P)
        if scale <= tol:
            raise InvalidInstance("XP vanishes; there is nothing to extend")
        return cls(X=_frozen(X / scale), P=_frozen(P), norm_XP=1.0, scale=scale)


@dataclass(frozen=True)
class KreinReport:
    """Outcome of a symmetric norm-one extension."""

    Z: CMatrix
    m_used: float
    method: ExtensionMethod
    norm_Z: float
    constraint_residual: float
    hermiticity_defect: float
    iterations: int
    m_initial: float = 0.0
    escalations: int = 0
    construction_norm_Z: Optional[float] = None
    proof_checks: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Velocity ``V = i X T`` at an isometry, with its minimal Hermitian lift."""

    base: AIsometry
    V: CMatrix
    X_l: CMatrix
    norm: float


@dataclass(frozen=True, eq=False)
class GeodesicCurve:
    """Curve ``t -> exp(itZ) T`` with ``Z`` A-symmetric and ``||Z_l|| = 1``."""

    base: AIsometry
    Z: AOperator
    Z_l: CMatrix
    t_max: float
    time_scale: float = 1.0
    extension: Optional[KreinReport] = None

    def at_l(self, t: float) -> CMatrix:
        """L-model point ``exp(itZ_l) T_l``."""
        return mat_exp(1j * t * self.Z_l) @ self.base.T_l

    def at(self, t: float) -> CMatrix:
        """H-model point ``delta(t) = exp(itZ) T``."""
        return self.base.form.from_l(self.at_l(t), self.base.source)


@dataclass(frozen=True)
class WeightedSpace:
    """Weighted sequence space: ``||x||_H^2 = sum w(n) |x_n|^2``, ``w >= 1``."""

    name: str
    weight: WeightRule
    description: str = ""

    def w(self, n: NDArray[np.int64]) -> NDArray[np.float64]:
        return np.asarray(self.weight(np.asarray(n, dtype=np.int64)), dtype=float)


@dataclass(frozen=True)
class SeqOperator:
    """Basis map ``e_n -> c(n) e_{sigma(n)}`` on indices ``n >= 1``.

    ``sigma`` returns 0 where the map sends ``e_n`` to zero (partial maps
    arise as adjoints). ``sigma_inverse`` returns the preimage or 0.
    """

    name: str
    sigma: IndexRule
    coeff: CoeffRule
    description: str = ""
    sigma_inverse: Optional[IndexRule] = None
    surjective: bool = False
    overrides: Mapping[int, int] = field(default_factory=dict)

    def apply_sigma(self, n: NDArray[np.int64]) -> NDArray[np.int64]:
        n = np.asarray(n, dtype=np.int64)
        out = np.asarray(self.sigma(n), dtype=np.int64).copy()
        for index, image in self.overrides.items():
            out[n == index] = image
        return out

    def apply_coeff(self, n: NDArray[np.int64]) -> NDArray[np.complex128]:
        n = np.asarray(n, dtype=np.int64)
        return np.broadcast_to(np.asarray(self.coeff(n), dtype=np.complex128), n.shape)
