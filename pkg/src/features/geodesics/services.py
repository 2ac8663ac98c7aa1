"""
Geodesic Service Module

This module contains the `GeodesicService` class: tangent vectors at an
isometry, the minimal curves ``delta(t) = exp(itZ) T`` obtained from a
norm-one symmetric extension of the velocity's Hermitian lift, their length
in the L-model operator norm, and a randomized race of competitor curves with
the same endpoints.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from config import AppSettings, SolverSettings, ToleranceSettings
from core.exceptions import (
    AGeometryError,
    ComputationError,
    InputError,
    NoConvergence,
    NotTangent,
    ShapeMismatch,
)
from core.numerics import (
    CMatrix,
    adjoint,
    as_cmatrix,
    exp_frechet,
    hermitian_part,
    hermiticity_defect,
    identity_defect,
    is_hermitian,
    svd_norm,
)
from core.serialization import MatrixPayload
from features.geodesics.schemas import CurveResponse, CurveSample, RaceReport
from features.krein_extension.services import KreinExtensionService
from models import AIsometry, AOperator, GeodesicCurve, KreinInstance, TangentVector

logger = logging.getLogger(__name__)

Speed = Callable[[float], float]


class GeodesicService:
    """
    Service class for tangent vectors, minimal curves and their lengths.
    """

    def __init__(
        self,
        tolerances: ToleranceSettings,
        solver: SolverSettings,
        app: AppSettings,
        krein: KreinExtensionService,
    ):
        """
        Initializes the GeodesicService.

        Args:
            tolerances (ToleranceSettings): Verification tolerances.
            solver (SolverSettings): Quadrature settings.
            app (AppSettings): Thread cap for race trials.
            krein (KreinExtensionService): Provides the symmetric extension.
        """
        self.tol = tolerances
        self.solver = solver
        self.app = app
        self.krein = krein

    # Tangent vectors

    def make_tangent(self, T: AIsometry, V: Any) -> TangentVector:
        """
        Minimal Hermitian lift of a velocity ``V`` at ``T``.

        With ``Y = -i V_l T_l*`` the lift is ``X_l = Y + Y* - P Y P`` where
        ``P = T_l T_l*``; it satisfies ``i X_l T_l = V_l``.

        Raises:
            NotTangent: If ``Y != YP`` or ``PYP`` is not Hermitian.
        """
        V = as_cmatrix(V)
        if V.shape != T.T.shape:
            raise ShapeMismatch(f"velocity shape {V.shape} differs from {T.T.shape}")
        form = T.form
        T_l = T.T_l
        V_l = form.to_l(V, T.source)
        P = T_l @ adjoint(T_l)
        Y = -1j * V_l @ adjoint(T_l)
        PYP = P @ Y @ P
        scale = max(svd_norm(V_l), 1.0)
        defect = max(svd_norm(Y - Y @ P), hermiticity_defect(PYP))
        if defect > self.tol.section * scale:
            raise NotTangent(
                "velocity is not of the form iXT with X Hermitian",
                details={"defect": defect},
            )
        X_l = hermitian_part(Y + adjoint(Y) - PYP)
        return TangentVector(base=T, V=V, X_l=X_l, norm=svd_norm(X_l @ P))

    def tangent_from_hermitian(self, T: AIsometry, H_l: Any) -> TangentVector:
        """Tangent ``V = i H T`` generated by an L-model Hermitian ``H_l``."""
        H_l = as_cmatrix(H_l, square=True)
        if not is_hermitian(H_l):
            raise NotTangent("generator must be Hermitian")
        V = T.form.from_l(1j * H_l @ T.T_l, T.source)
        return self.make_tangent(T, V)

    # Minimal curves

    def minimal_curve(self, v: TangentVector) -> GeodesicCurve:
        """
        Minimal curve through ``v.base`` with initial velocity ``v.V``.

        The lift is normalized to ``||X_l P|| = 1`` and extended to a
        Hermitian ``Z_l`` with ``Z_l P = X_l P`` and ``||Z_l|| = 1``;
        ``time_scale = 1 / v.norm`` records the reparametrization, so that
        ``delta(v.norm * t)`` has velocity ``v.V`` at ``t = 0``.
        """
        base = v.base
        n = base.form.n
        if v.norm <= self.tol.rank_cutoff:
            zero = np.zeros((n, n), dtype=np.complex128)
            return GeodesicCurve(
                base=base, Z=AOperator(base.form, zero), Z_l=zero, t_max=np.pi, time_scale=0.0
            )
        T_l = base.T_l
        P = hermitian_part(T_l @ adjoint(T_l))
        X_unit = v.X_l / v.norm

        extension = None
        if identity_defect(P) <= self.tol.identity:
            Z_l = X_unit
        else:
            inst = KreinInstance.normalized(X_unit, P)
            extension = self.krein.extend_paper(inst)
            Z_l = hermitian_part(extension.Z * inst.scale)
        return GeodesicCurve(
            base=base,
            Z=AOperator(base.form, base.form.from_l(Z_l)),
            Z_l=Z_l,
            t_max=np.pi,
            time_scale=1.0 / v.norm,
            extension=extension,
        )

    def sample_curve(self, curve: GeodesicCurve, ts: Sequence[float]) -> List[Dict[str, float]]:
        """Isometry defect and L-model speed of ``delta`` at each ``t``."""
        base = curve.base
        A0 = base.source.A
        samples = []
        for t in ts:
            point = curve.at(float(t))
            defect = svd_norm(adjoint(point) @ base.form.A @ point - A0) / svd_norm(A0)
            speed = svd_norm(curve.Z_l @ curve.at_l(float(t)))
            samples.append({"t": float(t), "isometry_defect": defect, "speed": speed})
        return samples

    # Lengths

    def curve_length(self, speed: Speed, a: float, b: float) -> float:
        """
        ``integral_a^b speed(s) ds`` by composite midpoint sums.

        The number of panels doubles until two successive Richardson-corrected
        estimates ``(4 M_2N - M_N) / 3`` agree to ``quadrature_tol``.

        Raises:
            NoConvergence: If ``quadrature_max_level`` is reached first.
        """
        if b == a:
            return 0.0

        def midpoint(panels: int) -> float:
            h = (b - a) / panels
            nodes = a + h * (np.arange(panels) + 0.5)
            return h * float(sum(speed(float(s)) for s in nodes))

        level = 2
        coarse = midpoint(2**level)
        previous: Optional[float] = None
        while level < self.solver.quadrature_max_level:
            level += 1
            fine = midpoint(2**level)
            estimate = (4.0 * fine - coarse) / 3.0
            if previous is not None and abs(estimate - previous) < self.solver.quadrature_tol:
                return estimate
            previous, coarse = estimate, fine
        raise NoConvergence(
            "midpoint quadrature did not settle",
            details={"level": level, "last_estimate": previous},
        )

    def geodesic_length(self, curve: GeodesicCurve, t1: float) -> float:
        """Length of ``delta`` on ``[0, t1]`` using ``delta'(t) = i Z_l delta(t)``."""
        return self.curve_length(lambda t: svd_norm(curve.Z_l @ curve.at_l(t)), 0.0, t1)

    def exponential_path_length(self, K: Callable[[float], CMatrix], dK: Callable[[float], CMatrix], T_l: CMatrix) -> float:
        """Length on ``[0, 1]`` of ``s -> exp(iK(s)) T_l`` for Hermitian ``K(s)``."""

        def speed(s: float) -> float:
            _, L = exp_frechet(1j * K(s), 1j * dK(s))
            return svd_norm(L @ T_l)

        return self.curve_length(speed, 0.0, 1.0)

    def competitor(self, curve: GeodesicCurve, t1: float, M: Any) -> Dict[str, float]:
        """
        Length of ``s -> exp(iK(s)) T_l`` with ``K(s) = s t1 Z_l + s (1 - s) M``.

        ``K(1) = t1 Z_l`` so the competitor ends where ``delta(t1)`` does; the
        endpoint residual is measured before the length.
        """
        M = hermitian_part(as_cmatrix(M, square=True))
        Z_l = curve.Z_l
        T_l = curve.base.T_l

        def K(s: float) -> CMatrix:
            return s * t1 * Z_l + s * (1.0 - s) * M

        def dK(s: float) -> CMatrix:
            return t1 * Z_l + (1.0 - 2.0 * s) * M

        # the competitor endpoint goes through the general exponential route
        end, _ = exp_frechet(1j * K(1.0), 1j * dK(1.0))
        endpoint = svd_norm(end @ T_l - curve.at_l(t1))
        length = self.exponential_path_length(K, dK, T_l)
        return {"length": length, "endpoint_residual": endpoint}

    def _random_perturbation(self, n: int, rng: np.random.Generator) -> CMatrix:
        H = hermitian_part(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        norm = svd_norm(H)
        if norm == 0.0:
            return H
        return H * (np.pi * rng.uniform(0.0, 1.0) / norm)

    def race(
        self, v: TangentVector, t1: float, trials: int, seed: int = 0
    ) -> RaceReport:
        """
        Compare ``delta`` on ``[0, t1]`` with random exponential competitors.

        Trial ``j`` draws ``M`` with ``||M|| <= pi`` from
        ``default_rng([seed, j])``, so results do not depend on scheduling.

        Raises:
            InputError: If ``t1`` is outside ``[0, pi]`` or ``trials < 0``.
        """
        if not 0.0 <= t1 <= np.pi:
            raise InputError("t1 must lie in [0, pi]", details={"t1": t1})
        if trials < 0:
            raise InputError("trials must be non-negative")
        curve = self.minimal_curve(v)
        n = curve.base.form.n
        reference = self.geodesic_length(curve, t1)

        def run(trial: int) -> Dict[str, float]:
            rng = np.random.default_rng([seed, trial])
            return self.competitor(curve, t1, self._random_perturbation(n, rng))

        if self.app.threads > 1 and trials > 1:
            with ThreadPoolExecutor(max_workers=self.app.threads) as pool:
                results = list(pool.map(run, range(trials)))
        else:
            results = [run(trial) for trial in range(trials)]

        lengths = [r["length"] for r in results]
        violations = sum(1 for length in lengths if length < t1 - self.tol.race)
        endpoint = max((r["endpoint_residual"] for r in results), default=0.0)
        if violations:
            logger.warning(f"{violations} competitors shorter than t1={t1:.6f}")
        if endpoint > self.tol.endpoint:
            logger.warning(f"Competitor endpoints miss delta(t1) by {endpoint:.3e}")
        if violations:
            message = "Shorter competitor found"
        elif endpoint > self.tol.endpoint:
            message = "Competitors do not share the endpoint"
        else:
            message = "No shorter competitor"
        return RaceReport(
            success=violations == 0 and endpoint <= self.tol.endpoint,
            message=message,
            t1=t1,
            geodesic_length=reference,
            competitor_lengths=lengths,
            min_length=min(lengths) if lengths else None,
            median_length=float(np.median(lengths)) if lengths else None,
            violations=violations,
            max_endpoint_residual=endpoint,
            seed=seed,
            trials=trials,
        )

    # Report facade used by the router and the CLI

    def curve_report(self, v: TangentVector, ts: Sequence[float], t1: Optional[float] = None) -> CurveResponse:
        try:
            curve = self.minimal_curve(v)
            samples = self.sample_curve(curve, ts)
            length = self.geodesic_length(curve, t1) if t1 is not None else None
            worst = max((s["isometry_defect"] for s in samples), default=0.0)
            ok = worst <= self.tol.section
            return CurveResponse(
                success=ok,
                message="Curve verified" if ok else "Curve leaves the isometries",
                Z=MatrixPayload.from_array(curve.Z.M),
                Z_l=MatrixPayload.from_array(curve.Z_l),
                time_scale=curve.time_scale,
                t_max=curve.t_max,
                tangent_norm=v.norm,
                extension_method=curve.extension.method.value if curve.extension else None,
                samples=[CurveSample(**s) for s in samples],
                length=length,
            )
        except AGeometryError as e:
            raise e
        except Exception as e:
            logger.error(f"Failed to build minimal curve, error: {str(e)}")
            raise ComputationError(f"minimal curve failed: {e}")
