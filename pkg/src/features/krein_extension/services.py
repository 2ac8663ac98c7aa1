"""
Krein Extension Service Module

Given a Hermitian ``X`` and an orthogonal projection ``P`` with ``||XP|| = 1``,
build a Hermitian ``Z`` with ``ZP = XP`` and ``||Z|| = 1``.

The primary route rescales ``X`` by ``m``, builds the operator
``B = P X_m + P^perp X_m Pi`` from the indefinite-form projection ``Pi`` and
symmetrizes it. When its norm overshoots at every escalated ``m``, the
closed-form block completion takes over: in the frame of ``P`` write
``X21 = K (1 - X11^2)^{1/2}`` with ``||K|| <= 1`` and set ``Z22 = -K X11 K*``.
A Dykstra alternating-projection solver is kept as an independent oracle.
"""

import dataclasses
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import SolverSettings, ToleranceSettings
from core.exceptions import (
    AGeometryError,
    ComputationError,
    GramNotPD,
    Infeasible,
    NoConvergence,
    Singular,
    VerificationFailed,
)
from core.numerics import (
    CMatrix,
    adjoint,
    as_cmatrix,
    herm_eig,
    hermiticity_defect,
    hermitian_part,
    min_eig,
    singular_values,
    svd_norm,
)
from core.serialization import MatrixPayload
from features.krein_extension.schemas import KreinResponse, NormProfileEntry
from models import ExtensionMethod, KreinInstance, KreinReport

logger = logging.getLogger(__name__)


class KreinExtensionService:
    """
    Service class for norm-one symmetric extensions.
    """

    def __init__(self, tolerances: ToleranceSettings, solver: SolverSettings):
        self.tol = tolerances
        self.solver = solver

    # Explicit construction

    def default_m(self, inst: KreinInstance) -> float:
        """``m0 = 2 max(1, ||X||)`` so that ``||X_m P X_m|| <= 1/4``."""
        return 2.0 * max(1.0, svd_norm(inst.X))

    def _construct(self, inst: KreinInstance, m: float) -> Tuple[CMatrix, CMatrix, Dict[str, float]]:
        """One pass of the construction at scale ``m``.

        Returns:
            Tuple: ``Z``, the unsymmetrized ``B`` and the proof-identity residuals.

        Raises:
            GramNotPD: If ``1 - X_m P X_m`` is not positive definite.
            Singular: If ``P + Q_m - 1`` is not invertible.
        """
        n = inst.n
        eye = np.eye(n)
        P = inst.P
        Pperp = eye - P
        Xm = inst.X / m

        B0 = P @ Xm
        W = hermitian_part(eye - Xm @ P @ Xm)
        w_min = min_eig(W)
        if w_min <= 0.0:
            raise GramNotPD(
                f"1 - X_m P X_m is not positive definite at m={m:.6g}",
                details={"min_eigenvalue": w_min, "m": m},
            )
        Qm = np.linalg.solve(W, P @ W)
        S = P + Qm - eye
        s = singular_values(S)
        if s[-1] <= self.tol.rank_cutoff * max(s[0], 1.0):
            raise Singular("P + Q_m - 1 is not invertible", details={"m": m})
        Pi = P @ np.linalg.inv(S)
        B1 = Pperp @ Xm @ Pi
        B = B0 + B1
        Z = m * hermitian_part(B)

        D = P - Qm
        checks = {
            "gram_min_eigenvalue": w_min,
            "q_idempotency": svd_norm(Qm @ Qm - Qm),
            "square_identity": svd_norm(S @ S - (eye - D @ D)),
            "pi_idempotency": svd_norm(Pi @ Pi - Pi),
            "left_constraint": svd_norm(P @ B - P @ Xm),
            "right_constraint": svd_norm(B @ P - Xm @ P),
            "b0_range": svd_norm(Pperp @ B0),
            "b1_range": svd_norm(P @ B1),
        }
        failed = {
            name: value
            for name, value in checks.items()
            if name != "gram_min_eigenvalue" and value > self.tol.identity * max(1.0, svd_norm(S))
        }
        if failed:
            raise VerificationFailed(
                "intermediate identities of the construction do not hold",
                details={"m": m, **failed},
            )
        return Z, B, checks

    def extend_paper(
        self, inst: KreinInstance, m: Optional[float] = None, fallback: bool = True
    ) -> KreinReport:
        """
        Norm-one extension by the rescaling construction, with fallback.

        Args:
            inst (KreinInstance): Normalized instance.
            m (Optional[float]): Initial scale; defaults to ``default_m``.
            fallback (bool): Hand overshooting instances to the block
                completion; otherwise raise ``VerificationFailed``.

        Returns:
            KreinReport: ``method`` tells whether the construction (possibly
            after escalating ``m``) or the fallback produced ``Z``; the
            construction's last norm stays in ``construction_norm_Z``.

        Raises:
            Infeasible: If ``||XP|| > 1``.
            GramNotPD: If the supplied ``m`` is too small.
        """
        self._require_feasible(inst)
        m0 = self.default_m(inst) if m is None else float(m)
        if m0 < 1.0:
            raise GramNotPD("m must be at least 1", details={"m": m0})

        m_k = m0
        attempts = 0
        norm_Z = float("nan")
        checks: Dict[str, float] = {}
        for k in range(self.solver.escalation_steps + 1):
            m_k = m0 * self.solver.escalation_factor**k
            attempts = k
            try:
                Z, _, checks = self._construct(inst, m_k)
            except (Singular, VerificationFailed) as e:
                if not fallback:
                    raise e
                logger.warning(f"Construction failed at m={m_k:.6g} with {e.code}: {e.message}")
                checks = {f"failed_{key}": float(value) for key, value in e.details.items()}
                break
            norm_Z = svd_norm(Z)
            if norm_Z <= 1.0 + self.tol.extension_norm:
                return self._report(
                    inst,
                    Z,
                    m_used=m_k,
                    method=ExtensionMethod.PAPER_CONSTRUCTION,
                    iterations=k + 1,
                    m_initial=m0,
                    escalations=k,
                    construction_norm_Z=norm_Z,
                    proof_checks=checks,
                )
            logger.info(f"Extension norm {norm_Z:.9f} at m={m_k:.6g}; escalating")

        if not fallback:
            raise VerificationFailed(
                "construction overshoots the unit ball at every escalation",
                details={"norm_Z": norm_Z, "m": m_k},
            )
        logger.warning(
            f"Construction did not reach the unit ball after {attempts} escalations "
            f"(norm {norm_Z:.9f}); falling back to the block completion"
        )
        completion = self.extend_completion(inst)
        return dataclasses.replace(
            completion,
            m_used=m_k,
            m_initial=m0,
            escalations=attempts,
            construction_norm_Z=norm_Z,
            proof_checks=checks,
        )

    # Block completion

    def _frame(self, inst: KreinInstance) -> Tuple[CMatrix, int, CMatrix]:
        """Unitary ``U`` whose first ``r`` columns span ``R(P)``, and ``U* X U``."""
        w, U = herm_eig(inst.P)
        U = np.concatenate([U[:, w > 0.5], U[:, w <= 0.5]], axis=1)
        r = int(np.sum(w > 0.5))
        return U, r, hermitian_part(adjoint(U) @ inst.X @ U)

    def extend_completion(self, inst: KreinInstance) -> KreinReport:
        """
        Closed-form Hermitian contraction completion.

        With ``X11 = V diag(lam) V*`` and ``D = (1 - X11^2)^{1/2}``, the
        contraction ``K = X21 D^+`` is computed on eigenvalues of ``D`` above
        ``extension_norm / 10`` and its singular values are clipped to 1.
        ``Z = [[X11, X21*], [X21, -K X11 K*]]`` keeps the first block column of
        ``X`` exactly, and ``diag(1, K) [[X11, D], [D, -X11]] diag(1, K*)``
        bounds its norm by 1.

        Raises:
            Infeasible: If ``||XP|| > 1``.
            NoConvergence: If rounding leaves ``||Z||`` above tolerance and
                the Dykstra polish does not recover it.
        """
        self._require_feasible(inst)
        U, r, Xr = self._frame(inst)
        Zr = Xr.copy()
        if r == 0:
            Zr[:] = 0.0
        elif r < inst.n:
            X11 = Xr[:r, :r]
            X21 = Xr[r:, :r]
            lam, V = herm_eig(X11)
            d = np.sqrt(np.clip(1.0 - np.clip(lam, -1.0, 1.0) ** 2, 0.0, None))
            cutoff = 0.1 * self.tol.extension_norm
            d_inv = np.where(d > cutoff, 1.0 / np.maximum(d, cutoff), 0.0)
            K = (X21 @ V * d_inv) @ adjoint(V)
            W, s, Yh = np.linalg.svd(K, full_matrices=False)
            K = (W * np.minimum(s, 1.0)) @ Yh
            Zr[r:, r:] = -K @ X11 @ adjoint(K)
        Z = hermitian_part(U @ Zr @ adjoint(U))
        report = self._report(inst, Z, m_used=0.0, method=ExtensionMethod.BLOCK_COMPLETION, iterations=0)
        if report.norm_Z <= 1.0 + self.tol.extension_norm:
            return report
        logger.warning(f"Completion norm {report.norm_Z:.12f} above tolerance; polishing with Dykstra")
        return self.extend_dykstra(inst, start=Z)

    # Dykstra oracle

    def extend_dykstra(self, inst: KreinInstance, start: Optional[CMatrix] = None) -> KreinReport:
        """
        Dykstra alternating projections between the constraint set and a ball.

        The constraint set ``{Z = Z*: ZP = XP}`` fixes every block of ``Z``
        touching ``R(P)``; in the eigenbasis of ``P`` its projection just
        overwrites those blocks. Every feasible ``Z`` has ``||Z|| >= ||XP|| = 1``,
        so the ball is taken with radius ``1 + extension_norm / 2`` and its
        projection clips eigenvalues to that radius. The returned point is the
        constraint projection of the last iterate, so ``ZP = XP`` holds to
        rounding.

        Args:
            inst (KreinInstance): Normalized instance.
            start (Optional[CMatrix]): Warm start; ``X`` itself by default.

        Raises:
            NoConvergence: If the iteration cap is hit before ``||Z||`` falls
                within ``extension_norm`` of 1.
        """
        self._require_feasible(inst)
        U, r, Xr = self._frame(inst)
        radius = 1.0 + 0.5 * self.tol.extension_norm

        def onto_constraint(Y: CMatrix) -> CMatrix:
            Y = Y.copy()
            Y[:r, :] = Xr[:r, :]
            Y[:, :r] = Xr[:, :r]
            return hermitian_part(Y)

        def onto_ball(Y: CMatrix) -> CMatrix:
            ev, V = herm_eig(hermitian_part(Y))
            return (V * np.clip(ev, -radius, radius)) @ adjoint(V)

        x = Xr.copy() if start is None else hermitian_part(adjoint(U) @ as_cmatrix(start) @ U)
        p = np.zeros_like(x)
        q = np.zeros_like(x)
        target = 1.0 + self.tol.extension_norm
        iterations = 0
        step = float("inf")
        if svd_norm(onto_constraint(x)) <= target:
            # warm start already feasible
            return self._report(
                inst,
                hermitian_part(U @ onto_constraint(x) @ adjoint(U)),
                m_used=0.0,
                method=ExtensionMethod.DYKSTRA_FALLBACK,
                iterations=0,
            )
        for iterations in range(1, self.solver.dykstra_max_iter + 1):
            y = onto_constraint(x + p)
            p = x + p - y
            x_next = onto_ball(y + q)
            q = y + q - x_next
            step = float(np.linalg.norm(x_next - x))
            x = x_next
            if step < self.solver.dykstra_tol or svd_norm(onto_constraint(x)) <= target:
                break

        Zr = onto_constraint(x)
        norm_Z = svd_norm(Zr)
        if norm_Z > 1.0 + self.tol.extension_norm:
            logger.error(f"Dykstra stopped at norm {norm_Z:.9f} after {iterations} iterations")
            raise NoConvergence(
                "Dykstra iteration did not reach a norm-one extension",
                details={"iterations": iterations, "norm_Z": norm_Z, "last_step": step},
            )
        logger.debug(f"Dykstra converged in {iterations} iterations, norm {norm_Z:.12f}")
        Z = hermitian_part(U @ Zr @ adjoint(U))
        return self._report(
            inst, Z, m_used=0.0, method=ExtensionMethod.DYKSTRA_FALLBACK, iterations=iterations
        )

    # Measurements

    def verify_extension(self, inst: KreinInstance, Z: Any) -> Dict[str, Any]:
        Z = np.asarray(Z, dtype=np.complex128)
        herm = hermiticity_defect(Z)
        constraint = svd_norm(Z @ inst.P - inst.X @ inst.P)
        norm = svd_norm(Z)
        return {
            "hermiticity_defect": herm,
            "constraint_residual": constraint,
            "norm": norm,
            "ok": herm <= self.tol.hermiticity
            and constraint <= self.tol.extension_constraint
            and norm <= 1.0 + self.tol.extension_norm,
        }

    def norm_profile(
        self, inst: KreinInstance, m_grid: Optional[Sequence[float]] = None
    ) -> List[Dict[str, float]]:
        """``||B||``, ``m ||B||`` and ``||Z||`` of the construction along a grid of ``m``."""
        if m_grid is None:
            m0 = self.default_m(inst)
            m_grid = [m0 * self.solver.escalation_factor**k for k in range(self.solver.escalation_steps + 1)]
        profile = []
        for m in m_grid:
            Z, B, _ = self._construct(inst, float(m))
            norm_B = svd_norm(B)
            profile.append(
                {"m": float(m), "norm_B": norm_B, "m_norm_B": float(m) * norm_B, "norm_Z": svd_norm(Z)}
            )
        return profile

    def _require_feasible(self, inst: KreinInstance) -> None:
        norm_XP = svd_norm(inst.X @ inst.P)
        if norm_XP > 1.0 + self.tol.identity:
            raise Infeasible(
                "||XP|| exceeds 1; no norm-one extension exists",
                details={"norm_XP": norm_XP},
            )

    def _report(self, inst: KreinInstance, Z: CMatrix, **kwargs: Any) -> KreinReport:
        Z = hermitian_part(Z)
        return KreinReport(
            Z=Z,
            norm_Z=svd_norm(Z),
            constraint_residual=svd_norm(Z @ inst.P - inst.X @ inst.P),
            hermiticity_defect=hermiticity_defect(Z),
            **kwargs,
        )

    # Report facade used by the router and the CLI

    def extend_report(
        self, inst: KreinInstance, method: str = "auto", m: Optional[float] = None
    ) -> KreinResponse:
        try:
            if method == "dykstra":
                report = self.extend_dykstra(inst)
            elif method == "completion":
                report = self.extend_completion(inst)
            else:
                report = self.extend_paper(inst, m, fallback=method != "paper")
            verified = self.verify_extension(inst, report.Z)
            return KreinResponse(
                success=verified["ok"],
                message="Extension verified" if verified["ok"] else "Extension residuals exceed tolerance",
                Z=MatrixPayload.from_array(report.Z),
                m_used=report.m_used,
                m_initial=report.m_initial,
                escalations=report.escalations,
                method=report.method.value,
                norm_Z=report.norm_Z,
                construction_norm_Z=report.construction_norm_Z,
                constraint_residual=report.constraint_residual,
                hermiticity_defect=report.hermiticity_defect,
                iterations=report.iterations,
                proof_checks=report.proof_checks,
                scale=inst.scale,
            )
        except AGeometryError as e:
            raise e
        except Exception as e:
            logger.error(f"Failed to extend instance, error: {str(e)}")
            raise ComputationError(f"extension failed: {e}")

    def profile_report(self, inst: KreinInstance, m_grid: Optional[Sequence[float]] = None) -> List[NormProfileEntry]:
        return [NormProfileEntry(**row) for row in self.norm_profile(inst, m_grid)]
