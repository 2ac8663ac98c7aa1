"""
Isometry Manifold Service Module

This module contains the `IsometryManifoldService` class: membership checks for
A-isometries, final projections ``P_T = T T^#``, the local cross-sections of
the action of the A-unitary group on isometries, conjugators between isometries
with conjugate final projections, and the (degenerate) dense Wold split.

An isometry ``T`` maps ``(C^k, A0)`` into ``(C^n, A)``. Residuals are measured
in the L-model, where isometries have orthonormal columns and A-symmetric
projections are orthogonal, so every tolerance is scale free.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from config import SolverSettings, ToleranceSettings
from core.exceptions import (
    AGeometryError,
    ComputationError,
    NotIsometric,
    ProjectionMismatch,
    ShapeMismatch,
    TooFar,
    VerificationFailed,
)
from core.numerics import (
    adjoint,
    herm_inv_sqrt,
    hermitian_part,
    identity_defect,
    mat_exp,
    min_eig,
    numerical_rank,
    svd_norm,
)
from core.serialization import MatrixPayload
from features.a_space.services import ASpaceService
from features.isometry_manifold.schemas import (
    ConjugatorResponse,
    EquivalenceResponse,
    IsometryCheckResponse,
    SectionResponse,
    WoldResponse,
)
from models import AForm, AIsometry, AProjection, AUnitary

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IsometryCheck:
    isometric: bool
    defect: float
    lambda_witness: float
    left_inverse_defect: float
    power: Optional[int] = None
    power_defect: Optional[float] = None


@dataclass(frozen=True)
class SectionResult:
    """A-unitary ``G`` with ``G T0 = T`` and its residuals."""

    G: AUnitary
    reconstruction_residual: float
    unitary_defect: float
    projection_distance: float
    sufficient_radius: float


@dataclass(frozen=True)
class ConjugatorResult:
    K: AUnitary
    reconstruction_residual: float
    unitary_defect: float
    projection_residual: float


@dataclass(frozen=True)
class AdjointabilityEquivalence:
    """The five equivalent adjointability conditions evaluated on one isometry."""

    adjoint_exists: bool
    l_adjoint_preserves_model: bool
    range_compatible: bool
    range_condition: bool
    lambda_finite: bool
    lambda_witness: float
    half_power_witness: float
    details: Dict[str, float] = field(default_factory=dict)

    @property
    def all_agree(self) -> bool:
        flags = {
            self.adjoint_exists,
            self.l_adjoint_preserves_model,
            self.range_compatible,
            self.range_condition,
            self.lambda_finite,
        }
        return len(flags) == 1


class IsometryManifoldService:
    """
    Service class for A-isometries and the A-unitary group acting on them.
    """

    def __init__(
        self,
        tolerances: ToleranceSettings,
        solver: SolverSettings,
        a_space: ASpaceService,
    ):
        """
        Initializes the IsometryManifoldService.

        Args:
            tolerances (ToleranceSettings): Verification tolerances.
            solver (SolverSettings): Solver settings.
            a_space (ASpaceService): Service providing adjoints, projectors
                and the Douglas test.
        """
        self.tol = tolerances
        self.solver = solver
        self.a_space = a_space

    # Membership

    def isometry_defect(self, T: AIsometry) -> float:
        """Return ``||T*AT - A0|| / ||A0||``."""
        A0 = T.source.A
        return svd_norm(adjoint(T.T) @ T.form.A @ T.T - A0) / max(svd_norm(A0), 1e-300)

    def unitary_defect(self, G: AIsometry) -> float:
        """Largest of ``||G_l* G_l - 1||`` and ``||G_l G_l* - 1||``."""
        G_l = G.T_l
        return max(identity_defect(adjoint(G_l) @ G_l), identity_defect(G_l @ adjoint(G_l)))

    def check_isometry(self, T: AIsometry, power: Optional[int] = None) -> IsometryCheck:
        """
        Verify ``T*AT = A0`` and measure how well conditioned the adjoint is.

        Args:
            T (AIsometry): Candidate isometry.
            power (Optional[int]): Also check ``T^k`` (square case only).

        Returns:
            IsometryCheck: ``lambda_witness`` is the smallest ``lam`` with
            ``T*A^2T <= lam A0^2``.
        """
        defect = self.isometry_defect(T)
        A, A0 = T.form.A, T.source.A
        lam = self.a_space.dominating_scale(
            hermitian_part(adjoint(T.T) @ A @ A @ T.T), hermitian_part(A0 @ A0)
        )
        left = identity_defect(T.sharp @ T.T)

        power_defect = None
        if power is not None:
            if not T.is_square:
                raise ShapeMismatch("powers are defined for square isometries only")
            if power < 1:
                raise ShapeMismatch("power must be a positive integer")
            Tk = AIsometry(T.form, np.linalg.matrix_power(T.T, power))
            power_defect = self.isometry_defect(Tk)

        isometric = defect <= self.tol.section and (
            power_defect is None or power_defect <= self.tol.section
        )
        return IsometryCheck(
            isometric=isometric,
            defect=defect,
            lambda_witness=lam,
            left_inverse_defect=left,
            power=power,
            power_defect=power_defect,
        )

    def require_isometry(self, T: AIsometry) -> None:
        defect = self.isometry_defect(T)
        if defect > self.tol.section:
            raise NotIsometric(
                f"T*AT differs from the source form by {defect:.3e}",
                details={"defect": defect},
            )

    # Final projections and cross-sections

    def final_projection(self, T: AIsometry) -> AProjection:
        """Return ``P_T = T T^#``; in the L-model this is ``T_l T_l*``."""
        self.require_isometry(T)
        return AProjection(T.form, T.T @ T.sharp)

    def projection_section(self, P0: AProjection, P: AProjection) -> AUnitary:
        """
        A-unitary ``G`` with ``G P0 G^{-1} = P``, equal to the identity at ``P = P0``.

        In the L-model ``G_l = (P P0 + (1 - P)(1 - P0)) (1 - (P - P0)^2)^{-1/2}``.

        Raises:
            TooFar: If ``||P_l - P0_l|| >= 1 - too_far_margin``.
            VerificationFailed: If the conjugation identity does not hold.
        """
        form = P0.form
        if P.form.n != form.n:
            raise ShapeMismatch("projections act on spaces of different dimension")
        P0_l = hermitian_part(P0.Q_l)
        P_l = hermitian_part(form.to_l(P.Q))
        distance = svd_norm(P_l - P0_l)
        if distance >= 1.0 - self.tol.too_far_margin:
            logger.warning(f"Projections too far apart for a local section: {distance:.6f}")
            raise TooFar(
                "projections are not within distance 1 in the L-model",
                details={"distance": distance},
            )
        eye = np.eye(form.n)
        D = P_l - P0_l
        G_l = (P_l @ P0_l + (eye - P_l) @ (eye - P0_l)) @ herm_inv_sqrt(
            hermitian_part(eye - D @ D)
        )
        G = AUnitary(form, form.from_l(G_l))
        residual = svd_norm(form.to_l(G.T @ P0.Q @ G.inverse) - P_l)
        if residual > self.tol.section:
            raise VerificationFailed(
                "section does not conjugate the projections",
                details={"residual": residual},
            )
        return G

    def isometry_section(self, T0: AIsometry, T: AIsometry) -> SectionResult:
        """
        Local cross-section ``sigma_{T0}(T) = T T0^# + G (1 - P_{T0})``.

        Args:
            T0 (AIsometry): Base point.
            T (AIsometry): Nearby isometry with the same source form.

        Returns:
            SectionResult: ``G`` with ``G T0 = T`` and ``sigma_{T0}(T0) = 1``,
            plus the sufficient-radius diagnostic ``d (d + 2 ||T0_l||)`` with
            ``d = ||T_l - T0_l||``. The diagnostic never gates the construction.

        Raises:
            TooFar: If the final projections are too far apart.
        """
        self._require_same_source(T0, T)
        self.require_isometry(T0)
        self.require_isometry(T)
        P0 = self.final_projection(T0)
        P = self.final_projection(T)
        G = self.projection_section(P0, P)

        form = T0.form
        sigma = T.T @ T0.sharp + G.T @ (np.eye(form.n) - P0.Q)
        section = AUnitary(form, sigma)

        d = svd_norm(T.T_l - T0.T_l)
        result = SectionResult(
            G=section,
            reconstruction_residual=svd_norm(form.to_l(sigma @ T0.T - T.T, T0.source)),
            unitary_defect=self.unitary_defect(section),
            projection_distance=svd_norm(form.to_l(P.Q - P0.Q)),
            sufficient_radius=d * (d + 2.0 * svd_norm(T0.T_l)),
        )
        logger.debug(
            f"Section built: distance={result.projection_distance:.3e} "
            f"residual={result.reconstruction_residual:.3e}"
        )
        return result

    def conjugator(self, T1: AIsometry, T2: AIsometry, H: AUnitary) -> ConjugatorResult:
        """
        A-unitary ``K`` with ``(K H) T1 = T2``, given ``H P1 H^{-1} = P2``.

        ``K = T2 (H T1)^# + 1 - P2``.

        Raises:
            ProjectionMismatch: If ``H`` does not carry ``P1`` onto ``P2``.
        """
        self._require_same_source(T1, T2)
        form = T1.form
        P1 = self.final_projection(T1)
        P2 = self.final_projection(T2)
        mismatch = svd_norm(form.to_l(H.T @ P1.Q @ H.inverse - P2.Q))
        if mismatch > self.tol.section:
            raise ProjectionMismatch(
                "H does not conjugate the final projections",
                details={"residual": mismatch},
            )
        T1_moved = AIsometry(form, H.T @ T1.T, T1.source)
        K = AUnitary(form, T2.T @ T1_moved.sharp + np.eye(form.n) - P2.Q)
        return ConjugatorResult(
            K=K,
            reconstruction_residual=svd_norm(form.to_l(K.T @ H.T @ T1.T - T2.T, T1.source)),
            unitary_defect=self.unitary_defect(K),
            projection_residual=mismatch,
        )

    def orbit_projection_check(
        self, G: AUnitary, T1: AIsometry, T2: AIsometry
    ) -> Dict[str, Any]:
        """If ``G T1 = T2`` then ``G P1 G^{-1} = P2``; both residuals are reported."""
        form = T1.form
        P1 = self.final_projection(T1)
        P2 = self.final_projection(T2)
        orbit = svd_norm(form.to_l(G.T @ T1.T - T2.T, T1.source))
        projection = svd_norm(form.to_l(G.T @ P1.Q @ G.inverse - P2.Q))
        return {
            "orbit_residual": orbit,
            "projection_residual": projection,
            "holds": orbit > self.tol.section or projection <= self.tol.section,
        }

    # Wold split and adjointability

    def dense_wold(self, T: AIsometry) -> Dict[str, int]:
        """
        Wold split of a square isometry: it is invertible, so all of it is unitary.

        Raises:
            ShapeMismatch: If ``T`` is not square.
            NotIsometric: If ``T`` fails the isometry check or has a
                non-trivial A-orthogonal complement of its range.
        """
        if not T.is_square:
            raise ShapeMismatch("the dense Wold split needs a square isometry")
        self.require_isometry(T)
        n = T.form.n
        rank = numerical_rank(T.T_l, self.tol.rank_cutoff)
        if rank != n:
            raise NotIsometric(
                "range of T has a non-trivial A-orthogonal complement",
                details={"rank": rank, "n": n},
            )
        if identity_defect(T.sharp @ T.T) > self.tol.section:
            raise NotIsometric("T^# is not a left inverse of T")
        return {"unitary_dim": n, "shift_dim": 0, "wandering_dim": 0}

    def adjointability_equivalence(self, T: AIsometry) -> AdjointabilityEquivalence:
        """
        Evaluate the equivalent characterisations of an adjointable isometry.

        (1) ``A0 X = T*A`` is solvable (Douglas); (2) the L-model adjoint maps
        the model into itself; (3) ``R(T)`` is compatible; (4) ``R(T*A)``
        fills ``R(A0)``; (5) ``T*A^2T <= lam A0^2`` for a finite ``lam``.
        The half-power witness ``T*AT <= lam A0`` is also reported; it is 1
        for every isometry.

        Condition (2) is witnessed by L-conjugating the Douglas solution
        ``X = T^#``: ``A0^{1/2} X A^{-1/2}`` must reproduce ``T_l*``. Condition
        (5) requires ``lam A0^2 - T*A^2T`` to be positive semidefinite at the
        returned ``lam``.
        """
        self.require_isometry(T)
        A, A0 = T.form.A, T.source.A

        douglas = self.a_space.douglas(A0, adjoint(T.T) @ A)
        adjoint_exists = douglas.solvable and douglas.range_inclusion

        try:
            self.a_space.compatible_projector(T.form, T.T)
            range_compatible = True
        except AGeometryError as e:
            logger.info(f"Range of T is not compatible: {e.message}")
            range_compatible = False

        rank_TA = numerical_rank(adjoint(T.T) @ A, self.tol.rank_cutoff)
        rank_A0 = numerical_rank(A0, self.tol.rank_cutoff)

        lam = self.a_space.dominating_scale(
            hermitian_part(adjoint(T.T) @ A @ A @ T.T), hermitian_part(A0 @ A0)
        )
        half = self.a_space.dominating_scale(
            hermitian_part(adjoint(T.T) @ A @ T.T), hermitian_part(A0)
        )

        T_l = T.T_l
        scale = max(1.0, svd_norm(T_l))
        model_residual = float("inf")
        if douglas.X is not None:
            conjugated = T.source.sqrtA @ douglas.X @ T.form.invSqrtA
            model_residual = svd_norm(conjugated - adjoint(T_l)) / scale
        lam_gap = float("-inf")
        if np.isfinite(lam):
            C = hermitian_part(adjoint(T.T) @ A @ A @ T.T)
            lam_gap = min_eig(hermitian_part(lam * A0 @ A0) - C) / max(1.0, svd_norm(C))
        return AdjointabilityEquivalence(
            adjoint_exists=adjoint_exists,
            l_adjoint_preserves_model=model_residual <= self.tol.douglas,
            range_compatible=range_compatible,
            range_condition=rank_TA == rank_A0,
            lambda_finite=lam_gap >= -self.tol.douglas,
            lambda_witness=lam,
            half_power_witness=half,
            details={
                "douglas_residual": douglas.residual,
                "model_residual": model_residual,
                "lambda_gap": lam_gap,
                "rank_TA": float(rank_TA),
                "rank_A0": float(rank_A0),
            },
        )

    # A-unitary group

    def random_a_unitary(
        self, form: AForm, rng: np.random.Generator, scale: float = 1.0
    ) -> AUnitary:
        """``A^{-1/2} exp(iH) A^{1/2}`` for a random Hermitian ``H`` with ``||H|| = scale``."""
        n = form.n
        H = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        H = hermitian_part(H)
        norm = svd_norm(H)
        if norm > 0.0:
            H = H * (scale / norm)
        return AUnitary(form, form.from_l(mat_exp(1j * H)))

    def random_isometry(
        self,
        form: AForm,
        rng: np.random.Generator,
        source: Optional[AForm] = None,
    ) -> AIsometry:
        """Random isometry from ``source`` (default: ``form``) into ``form``."""
        src = form if source is None else source
        if src.n > form.n:
            raise ShapeMismatch("source dimension exceeds target dimension")
        Z = rng.standard_normal((form.n, src.n)) + 1j * rng.standard_normal((form.n, src.n))
        Q, R = np.linalg.qr(Z)
        # fix the phases so that the distribution is Haar
        Q = Q * (np.diag(R) / np.abs(np.diag(R)))
        return AIsometry(form, form.from_l(Q, src), None if source is None else src)

    def compose(self, G1: AUnitary, G2: AUnitary) -> AUnitary:
        if G1.form.n != G2.form.n:
            raise ShapeMismatch("A-unitaries act on spaces of different dimension")
        return AUnitary(G1.form, G1.T @ G2.T, inverse=G2.inverse @ G1.inverse)

    def invert(self, G: AUnitary) -> AUnitary:
        return AUnitary(G.form, G.inverse, inverse=G.T)

    def sharp(self, G: AUnitary) -> AUnitary:
        """``G^#`` is again A-unitary and equals ``G^{-1}``."""
        return AUnitary(G.form, G.sharp, inverse=G.T)

    def _require_same_source(self, T1: AIsometry, T2: AIsometry) -> None:
        if T1.T.shape != T2.T.shape:
            raise ShapeMismatch(f"isometries of shapes {T1.T.shape} and {T2.T.shape}")
        if svd_norm(T1.source.A - T2.source.A) > self.tol.identity * max(
            svd_norm(T1.source.A), 1.0
        ):
            raise ShapeMismatch("isometries have different source forms")
        if svd_norm(T1.form.A - T2.form.A) > self.tol.identity * max(
            svd_norm(T1.form.A), 1.0
        ):
            raise ShapeMismatch("isometries have different target forms")

    # Report facades used by the router and the CLI

    def check_report(self, T: AIsometry, power: Optional[int] = None) -> IsometryCheckResponse:
        try:
            check = self.check_isometry(T, power)
            return IsometryCheckResponse(
                success=check.isometric,
                message="Operator is an A-isometry" if check.isometric else "Operator is not an A-isometry",
                isometric=check.isometric,
                defect=check.defect,
                lambda_witness=check.lambda_witness,
                left_inverse_defect=check.left_inverse_defect,
                power=check.power,
                power_defect=check.power_defect,
            )
        except AGeometryError as e:
            raise e
        except Exception as e:
            logger.error(f"Failed to check isometry, error: {str(e)}")
            raise ComputationError(f"isometry check failed: {e}")

    def section_report(self, T0: AIsometry, T: AIsometry) -> SectionResponse:
        try:
            result = self.isometry_section(T0, T)
            ok = max(result.reconstruction_residual, result.unitary_defect) <= self.tol.section
            return SectionResponse(
                success=ok,
                message="Section constructed" if ok else "Section residuals exceed tolerance",
                G=MatrixPayload.from_array(result.G.T),
                reconstruction_residual=result.reconstruction_residual,
                unitary_defect=result.unitary_defect,
                projection_distance=result.projection_distance,
                sufficient_radius=result.sufficient_radius,
            )
        except AGeometryError as e:
            raise e
        except Exception as e:
            logger.error(f"Failed to build section, error: {str(e)}")
            raise ComputationError(f"section construction failed: {e}")

    def conjugator_report(
        self, T1: AIsometry, T2: AIsometry, H: Optional[AUnitary] = None
    ) -> ConjugatorResponse:
        """Build ``K``; with ``H`` omitted the projection section supplies it."""
        try:
            if H is None:
                H = self.projection_section(self.final_projection(T1), self.final_projection(T2))
            result = self.conjugator(T1, T2, H)
            ok = max(result.reconstruction_residual, result.unitary_defect) <= self.tol.section
            return ConjugatorResponse(
                success=ok,
                message="Conjugator constructed" if ok else "Conjugator residuals exceed tolerance",
                K=MatrixPayload.from_array(result.K.T),
                H=MatrixPayload.from_array(H.T),
                reconstruction_residual=result.reconstruction_residual,
                unitary_defect=result.unitary_defect,
                projection_residual=result.projection_residual,
            )
        except AGeometryError as e:
            raise e
        except Exception as e:
            logger.error(f"Failed to build conjugator, error: {str(e)}")
            raise ComputationError(f"conjugator construction failed: {e}")

    def wold_report(self, T: AIsometry) -> WoldResponse:
        try:
            split = self.dense_wold(T)
            return WoldResponse(success=True, message="Isometry is unitary", **split)
        except AGeometryError as e:
            raise e
        except Exception as e:
            logger.error(f"Failed to compute Wold split, error: {str(e)}")
            raise ComputationError(f"Wold split failed: {e}")

    def equivalence_report(self, T: AIsometry) -> EquivalenceResponse:
        try:
            eq = self.adjointability_equivalence(T)
            return EquivalenceResponse(
                success=eq.all_agree,
                message="Conditions agree" if eq.all_agree else "Conditions disagree",
                adjoint_exists=eq.adjoint_exists,
                l_adjoint_preserves_model=eq.l_adjoint_preserves_model,
                range_compatible=eq.range_compatible,
                range_condition=eq.range_condition,
                lambda_finite=eq.lambda_finite,
                lambda_witness=eq.lambda_witness,
                half_power_witness=eq.half_power_witness,
                details=eq.details,
            )
        except AGeometryError as e:
            raise e
        except Exception as e:
            logger.error(f"Failed to evaluate adjointability, error: {str(e)}")
            raise ComputationError(f"adjointability evaluation failed: {e}")
