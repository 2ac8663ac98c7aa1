"""
A-Space Service Module

This module contains the `ASpaceService` class, which encapsulates the
A-inner-product calculus: A-adjoints, the two norms of an adjointable
operator, the L-model obtained by conjugation with the square root of the
weight, compatible (A-symmetric) projectors and the range-inclusion test for
operator equations ``AX = B``.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from config import SolverSettings, ToleranceSettings
from core.exceptions import (
    AGeometryError,
    ComputationError,
    NotPSD,
    RankDeficient,
    ShapeMismatch,
    Singular,
)
from core.numerics import (
    CMatrix,
    adjoint,
    as_cmatrix,
    hermitian_part,
    is_hermitian,
    min_eig,
    pinv_solve,
    range_basis,
    singular_values,
    svd_norm,
)
from features.a_space.schemas import DouglasResponse, OperatorReportResponse, ProjectorResponse
from core.serialization import MatrixPayload
from models import AForm, AOperator, AProjection

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DouglasResult:
    """Outcome of the three range-inclusion criteria for ``AX = B``."""

    solvable: bool
    range_inclusion: bool
    lambda_feasible: bool
    X: Optional[CMatrix]
    lam: Optional[float]
    residual: float
    range_defect: float

    @property
    def criteria_agree(self) -> bool:
        return self.solvable == self.range_inclusion == self.lambda_feasible


class ASpaceService:
    """
    Service class for the A-inner-product structure.

    Every method is pure; the instance only carries tolerances and solver
    settings so callers can override them per run.
    """

    def __init__(self, tolerances: ToleranceSettings, solver: SolverSettings):
        """
        Initializes the ASpaceService with its numerical settings.

        Args:
            tolerances (ToleranceSettings): Verification tolerances.
            solver (SolverSettings): Bisection and iteration settings.
        """
        self.tol = tolerances
        self.solver = solver

    # Inner product and model change

    def a_inner(self, form: AForm, f: Any, g: Any) -> complex:
        """Return ``<f, g>_A = <Af, g>``."""
        f = np.asarray(f, dtype=np.complex128).reshape(-1)
        g = np.asarray(g, dtype=np.complex128).reshape(-1)
        if f.shape[0] != form.n or g.shape[0] != form.n:
            raise ShapeMismatch(
                f"vectors of length {f.shape[0]}, {g.shape[0]} on a form of dimension {form.n}"
            )
        return complex(np.vdot(g, form.A @ f))

    def to_l_model(self, B: AOperator) -> CMatrix:
        """Extension of ``B`` to the L-model: ``A^{1/2} B A^{-1/2}``."""
        return B.form.to_l(B.M)

    def from_l_model(self, form: AForm, M_l: Any) -> AOperator:
        return AOperator(form, form.from_l(as_cmatrix(M_l, square=True)))

    # Adjoint and norms

    def a_adjoint(self, B: AOperator) -> AOperator:
        """Return ``B^# = A^{-1} B* A``."""
        return AOperator(B.form, B.form.sharp(B.M))

    def banach_norm(self, B: AOperator) -> float:
        """Return ``|B| = max(||B||, ||B^#||)``."""
        return max(svd_norm(B.M), svd_norm(self.a_adjoint(B).M))

    def l_norm(self, B: AOperator) -> float:
        return svd_norm(self.to_l_model(B))

    def is_a_symmetric(self, B: AOperator, tol: Optional[float] = None) -> bool:
        """True iff ``||AB - B*A|| <= tol ||A|| ||B||``."""
        tol = self.tol.identity if tol is None else tol
        A = B.form.A
        defect = svd_norm(A @ B.M - adjoint(B.M) @ A)
        return defect <= tol * svd_norm(A) * svd_norm(B.M)

    def adjoint_defect(self, B: AOperator) -> float:
        """Largest ``|<Bf, g>_A - <f, B^# g>_A|`` over basis vectors ``f, g``."""
        A = B.form.A
        sharp = self.a_adjoint(B).M
        # entry (j, i) is <B e_i, e_j>_A - <e_i, B^# e_j>_A
        return float(np.max(np.abs(A @ B.M - adjoint(sharp) @ A))) if B.form.n else 0.0

    # Projections

    def compatible_projector(self, form: AForm, F: Any) -> AProjection:
        """
        A-symmetric idempotent onto ``R(F)`` with nullspace ``A(R(F))^perp``.

        Args:
            form (AForm): The weight.
            F (Any): n x k matrix of full column rank spanning the subspace.

        Returns:
            AProjection: ``Q = F (F*AF)^{-1} F*A``.

        Raises:
            RankDeficient: If the smallest singular value of ``F`` is below
                ``full_rank`` times the largest.
        """
        F = as_cmatrix(F)
        if F.shape[0] != form.n:
            raise ShapeMismatch(f"subspace basis has {F.shape[0]} rows, form has {form.n}")
        s = singular_values(F)
        if s.size == 0 or s[0] == 0.0 or s[-1] <= self.tol.full_rank * s[0]:
            raise RankDeficient(
                "subspace basis is not of full column rank",
                details={"singular_values": [float(v) for v in s]},
            )
        gram = adjoint(F) @ form.A @ F
        Q = F @ np.linalg.solve(gram, adjoint(F) @ form.A)
        return AProjection(form, Q)

    def projection_defects(self, proj: AProjection) -> Dict[str, float]:
        """Residuals of ``Q^2 = Q``, ``AQ = Q*A`` and of the L-model projection."""
        Q, A = proj.Q, proj.form.A
        Q_l = proj.Q_l
        return {
            "idempotency": svd_norm(Q @ Q - Q),
            "a_symmetry": svd_norm(A @ Q - adjoint(Q) @ A),
            "l_hermiticity": svd_norm(Q_l - adjoint(Q_l)),
            "l_idempotency": svd_norm(Q_l @ Q_l - Q_l),
        }

    def projector_from_idempotent(self, Q: Any) -> CMatrix:
        """
        Orthogonal projection onto the range of an idempotent.

        Uses ``P = Q (Q + Q* - 1)^{-1}``.

        Raises:
            ComputationError: If ``Q`` is not idempotent.
            Singular: If ``Q + Q* - 1`` is numerically singular.
        """
        Q = as_cmatrix(Q, square=True)
        if svd_norm(Q @ Q - Q) > self.tol.identity * max(1.0, svd_norm(Q)):
            raise ComputationError("input is not idempotent")
        M = Q + adjoint(Q) - np.eye(Q.shape[0])
        s = singular_values(M)
        if s.size and s[-1] <= self.tol.rank_cutoff * max(s[0], 1.0):
            raise Singular("Q + Q* - 1 is not invertible")
        return Q @ np.linalg.inv(M)

    # Range inclusion

    def dominating_scale(self, C: CMatrix, D: CMatrix) -> float:
        """
        Smallest ``lam >= 0`` with ``C <= lam D`` for Hermitian ``C`` and positive definite ``D``.

        Bisection on the minimum eigenvalue of ``lam D - C``.
        """
        if C.shape[0] == 0:
            return 0.0
        d_min = min_eig(D)
        if d_min <= 0.0:
            raise ComputationError("dominating form must be positive definite")
        hi = max(svd_norm(C) / d_min, 0.0)
        if min_eig(hi * D - C) < 0.0:
            hi = 2.0 * hi + 1.0
        lo = 0.0
        if min_eig(-C) >= 0.0:
            return 0.0
        while hi - lo > self.solver.bisection_tol * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if min_eig(mid * D - C) >= 0.0:
                hi = mid
            else:
                lo = mid
        return hi

    def douglas(self, Acoef: Any, B: Any) -> DouglasResult:
        """
        Decide solvability of ``AX = B`` three ways.

        The criteria are: a least-squares solution with vanishing residual,
        the range inclusion ``R(B) in R(A)``, and the existence of ``lam`` with
        ``BB* <= lam AA*``. ``A`` may be singular.

        Args:
            Acoef (Any): Hermitian positive semidefinite coefficient.
            B (Any): Right-hand side.

        Returns:
            DouglasResult: The three verdicts, ``X = A^+ B`` and the smallest
            ``lam`` when solvable.

        Raises:
            NotPSD: If ``A`` is not Hermitian positive semidefinite.
        """
        A = as_cmatrix(Acoef, square=True)
        B = as_cmatrix(B)
        if B.shape[0] != A.shape[0]:
            raise ShapeMismatch(f"A is {A.shape}, B is {B.shape}")
        if not is_hermitian(A):
            raise NotPSD("coefficient is not Hermitian")
        norm_A = svd_norm(A)
        if A.shape[0] and min_eig(A) < -self.tol.douglas * max(norm_A, 1.0):
            raise NotPSD("coefficient has a negative eigenvalue")

        norm_B = svd_norm(B)
        threshold = self.tol.douglas * norm_B

        X, residual = pinv_solve(A, B, rcond=self.tol.rank_cutoff)
        solvable = residual <= threshold

        U_r, U_c = range_basis(A, rcond=self.tol.rank_cutoff)
        range_defect = svd_norm(adjoint(U_c) @ B)
        range_inclusion = range_defect <= threshold

        lam: Optional[float] = None
        lambda_feasible = False
        if range_inclusion:
            BB = B @ adjoint(B)
            AA = A @ adjoint(A)
            C = hermitian_part(adjoint(U_r) @ BB @ U_r)
            D = hermitian_part(adjoint(U_r) @ AA @ U_r)
            lam = self.dominating_scale(C, D)
            slack = self.tol.douglas * max(1.0, norm_B**2)
            gap = lam * AA - BB + slack * np.eye(A.shape[0])
            lambda_feasible = min_eig(hermitian_part(gap)) >= 0.0
        else:
            logger.debug(
                f"Range obstruction {range_defect:.3e}: no lambda dominates BB* off R(A)"
            )

        return DouglasResult(
            solvable=solvable,
            range_inclusion=range_inclusion,
            lambda_feasible=lambda_feasible,
            X=X if solvable else None,
            lam=lam if lambda_feasible else None,
            residual=residual,
            range_defect=range_defect,
        )

    # Report facades used by the router and the CLI

    def operator_report(self, B: AOperator) -> OperatorReportResponse:
        """
        Collects adjoint, norms and symmetry of an operator into one response.

        Raises:
            AGeometryError: Domain errors are re-raised unchanged.
            ComputationError: Any unexpected failure.
        """
        try:
            sharp = self.a_adjoint(B)
            return OperatorReportResponse(
                success=True,
                message="Operator analysed",
                adjoint=MatrixPayload.from_array(sharp.M),
                l_model=MatrixPayload.from_array(self.to_l_model(B)),
                norm=svd_norm(B.M),
                adjoint_norm=svd_norm(sharp.M),
                banach_norm=self.banach_norm(B),
                l_norm=self.l_norm(B),
                a_symmetric=self.is_a_symmetric(B),
                adjoint_defect=self.adjoint_defect(B),
            )
        except AGeometryError as e:
            raise e
        except Exception as e:
            logger.error(f"Failed to analyse operator, error: {str(e)}")
            raise ComputationError(f"operator analysis failed: {e}")

    def projector_report(self, form: AForm, F: Any) -> ProjectorResponse:
        try:
            proj = self.compatible_projector(form, F)
            orthogonal = self.projector_from_idempotent(proj.Q)
            return ProjectorResponse(
                success=True,
                message="Compatible projector built",
                Q=MatrixPayload.from_array(proj.Q),
                Q_l=MatrixPayload.from_array(proj.Q_l),
                orthogonal_projection=MatrixPayload.from_array(orthogonal),
                rank=proj.rank,
                defects=self.projection_defects(proj),
            )
        except AGeometryError as e:
            raise e
        except Exception as e:
            logger.error(f"Failed to build compatible projector, error: {str(e)}")
            raise ComputationError(f"projector construction failed: {e}")

    def douglas_report(self, Acoef: Any, B: Any) -> DouglasResponse:
        try:
            result = self.douglas(Acoef, B)
            if not result.criteria_agree:
                logger.warning(
                    "Douglas criteria disagree: "
                    f"solvable={result.solvable} range={result.range_inclusion} "
                    f"lambda={result.lambda_feasible}"
                )
            return DouglasResponse(
                success=result.criteria_agree,
                message="Criteria agree" if result.criteria_agree else "Criteria disagree",
                solvable=result.solvable,
                range_inclusion=result.range_inclusion,
                lambda_feasible=result.lambda_feasible,
                X=MatrixPayload.from_array(result.X) if result.X is not None else None,
                lam=result.lam,
                residual=result.residual,
                range_defect=result.range_defect,
            )
        except AGeometryError as e:
            raise e
        except Exception as e:
            logger.error(f"Failed to evaluate Douglas criteria, error: {str(e)}")
            raise ComputationError(f"Douglas evaluation failed: {e}")
