"""
Sequence Model Service Module

This module contains the `SequenceModelService` class, the exact backend for
infinite-dimensional phenomena: weighted sequence spaces ``H`` inside ``L =
l^2``, basis maps ``e_n -> c(n) e_{sigma(n)}`` and diagnostics evaluated up to
a horizon ``N``. All verdicts are evidence at the horizon, never proofs.

For a basis map, ``||Bx||_H^2 / ||x||_H^2`` is bounded by the supremum of
``w(sigma(n)) / w(n)``; growth of that ratio across dyadic windows is the
witness of unboundedness on ``H``.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.special
from numpy.typing import NDArray

from config import AppSettings
from core.exceptions import AGeometryError, ComputationError, InputError, NotIsometric
from core.numerics import CMatrix
from features.sequence_models.repository import SequenceRepository
from features.sequence_models.schemas import (
    AdjointabilityResponse,
    BoundednessReport,
    DivergenceResponse,
    SeqWoldResponse,
    WitnessEntry,
)
from models import AForm, SeqOperator, Trend, Verdict, WeightedSpace

logger = logging.getLogger(__name__)

Index = NDArray[np.int64]

# growth must not decelerate faster than this between the last two windows
_GROWTH_PERSISTENCE = 0.8


@dataclass(frozen=True)
class Boundedness:
    bounded_evidence: bool
    sup_ratio: float
    trend: Trend
    window_sups: List[float]
    witnesses: List[Tuple[int, float]]


@dataclass(frozen=True)
class Adjointability:
    verdict: Verdict
    operator: Boundedness
    adjoint: Boundedness
    witness_map: Optional[str]


@dataclass(frozen=True)
class SeqWold:
    """Index-level Wold split of a basis isometry on ``[1, N]``."""

    horizon: int
    wandering: Index
    layers: List[Index]
    unitary: Index
    undetermined: Index

    @property
    def partition_ok(self) -> bool:
        parts = [self.wandering, self.unitary, self.undetermined, *self.layers[1:]]
        stacked = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
        return stacked.size == self.horizon and np.array_equal(
            np.sort(stacked), np.arange(1, self.horizon + 1)
        )


@dataclass(frozen=True)
class Divergence:
    partial_sums: NDArray[np.float64]
    witness_h_norm_sq: float
    closed_form: float

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.partial_sums) > 0.0))


class SequenceModelService:
    """
    Service class for weighted sequence spaces and basis-map operators.
    """

    def __init__(self, repo: SequenceRepository, app: AppSettings):
        """
        Initializes the SequenceModelService.

        Args:
            repo (SequenceRepository): Registry of named spaces and operators.
            app (AppSettings): Default horizon.
        """
        self.repo = repo
        self.app = app

    def _window(self, horizon: Optional[int]) -> Index:
        N = self.app.horizon if horizon is None else int(horizon)
        if N < 1:
            raise InputError("horizon must be positive", details={"horizon": N})
        return np.arange(1, N + 1, dtype=np.int64)

    # Isometry and boundedness

    def seq_is_l_isometry(self, op: SeqOperator, horizon: Optional[int] = None) -> bool:
        """True iff ``sigma`` is total and injective and ``|c| = 1`` on ``[1, N]``."""
        n = self._window(horizon)
        images = op.apply_sigma(n)
        if np.any(images <= 0):
            return False
        if np.unique(images).size != images.size:
            return False
        return bool(np.all(np.abs(op.apply_coeff(n)) == 1.0))

    def seq_bounded_on_H(
        self, op: SeqOperator, space: WeightedSpace, horizon: Optional[int] = None
    ) -> Boundedness:
        """
        Supremum of ``w(sigma(n)) / w(n)`` on ``[1, N]`` and its trend.

        Only complete dyadic windows ``[2^j, 2^{j+1})`` inside ``[1, N]`` are
        scanned, so a partial trailing window never decides the verdict. The
        trend is ``growing`` when the suprema over the last three windows
        strictly increase and the last increment is
        at least 0.8 times the previous one; a supremum creeping up to a
        finite limit decelerates geometrically and counts as bounded.
        Indices sent to zero do not contribute.
        """
        n = self._window(horizon)
        images = op.apply_sigma(n)
        live = images > 0
        ratios = np.zeros(n.shape, dtype=float)
        if np.any(live):
            w_img = space.w(images[live])
            ratios[live] = w_img * np.abs(op.apply_coeff(n[live])) ** 2 / space.w(n[live])

        sups: List[float] = []
        witnesses: List[Tuple[int, float]] = []
        j = 0
        while 2 ** (j + 1) - 1 <= n[-1]:
            lo, hi = 2**j, 2 ** (j + 1) - 1
            block = ratios[lo - 1 : hi]
            k = int(np.argmax(block))
            sups.append(float(block[k]))
            witnesses.append((lo + k, float(block[k])))
            j += 1

        trend = Trend.BOUNDED
        if len(sups) >= 3:
            a, b, c = sups[-3:]
            if a < b < c and (c - b) >= _GROWTH_PERSISTENCE * (b - a):
                trend = Trend.GROWING
        sup_ratio = float(np.max(ratios)) if ratios.size else 0.0
        return Boundedness(
            bounded_evidence=trend == Trend.BOUNDED,
            sup_ratio=sup_ratio,
            trend=trend,
            window_sups=sups,
            witnesses=witnesses,
        )

    # Adjoints

    def _tabulated_inverse(self, op: SeqOperator, depth: int):
        n = np.arange(1, depth + 1, dtype=np.int64)
        images = op.apply_sigma(n)
        order = np.argsort(images, kind="stable")
        sorted_images = images[order]
        preimages = n[order]

        def inverse(k: Index) -> Index:
            k = np.asarray(k, dtype=np.int64)
            pos = np.searchsorted(sorted_images, k)
            pos = np.clip(pos, 0, sorted_images.size - 1)
            hit = sorted_images[pos] == k
            return np.where(hit & (k > 0), preimages[pos], 0)

        return inverse

    def seq_adjoint(self, op: SeqOperator, depth: Optional[int] = None) -> SeqOperator:
        """
        L-adjoint ``e_k -> conj(c(sigma^{-1}(k))) e_{sigma^{-1}(k)}``, zero off the range.

        Without a closed-form inverse the preimages are tabulated on
        ``[1, depth]`` (default four horizons); preimages beyond it count as
        absent.
        """
        if op.sigma_inverse is not None and not op.overrides:
            inverse = op.sigma_inverse
        else:
            inverse = self._tabulated_inverse(op, depth or 4 * self.app.horizon)

        def coeff(k: Index) -> NDArray[np.complex128]:
            pre = np.asarray(inverse(k), dtype=np.int64)
            out = np.ones(np.shape(k), dtype=np.complex128)
            live = pre > 0
            if np.any(live):
                out[live] = np.conj(op.apply_coeff(pre[live]))
            return out

        name = op.name[:-1] if op.name.endswith("*") else f"{op.name}*"
        return SeqOperator(
            name=name,
            sigma=inverse,
            coeff=coeff,
            description=f"adjoint of {op.name}",
            sigma_inverse=op.apply_sigma,
            # the adjoint of an injective total map hits every index
            surjective=True,
        )

    def seq_adjointability(
        self, op: SeqOperator, space: WeightedSpace, horizon: Optional[int] = None
    ) -> Adjointability:
        """
        Adjointability evidence for an L-isometry acting on ``H``.

        Non-adjointable when the adjoint leaves ``H`` (growing ratio). An
        operator that itself leaves ``H`` is not an operator on ``H`` and is
        reported non-adjointable too, with the operator as witness.

        Raises:
            NotIsometric: If ``op`` is not an L-isometry on the horizon.
        """
        if not self.seq_is_l_isometry(op, horizon):
            raise NotIsometric(f"{op.name} is not an L-isometry on the horizon")
        N = int(self._window(horizon)[-1])
        own = self.seq_bounded_on_H(op, space, N)
        adj = self.seq_bounded_on_H(self.seq_adjoint(op, 4 * N), space, N)
        witness_map = None
        if adj.trend == Trend.GROWING:
            witness_map = "adjoint"
        elif own.trend == Trend.GROWING:
            witness_map = "operator"
        verdict = (
            Verdict.ADJOINTABLE_EVIDENCE if witness_map is None else Verdict.NON_ADJOINTABLE_EVIDENCE
        )
        logger.info(f"{op.name} on {space.name}: {verdict.value}")
        return Adjointability(verdict=verdict, operator=own, adjoint=adj, witness_map=witness_map)

    # Divergence witness

    def divergence_demo(self, K: int) -> Divergence:
        """
        ``||U* x||_H^2`` partial sums for ``x_k = k^{-3/2}`` on odd ``k``.

        On the Sobolev space ``U*`` sends odd ``e_k`` to ``e_{k^2}``, so the
        ``j``-th term is ``w(k^2) k^{-3} = 1 / (2j + 1)`` with ``k = 2j + 1``,
        while ``||x||_H^2 = sum k^{-2}`` stays finite.
        """
        if K < 1:
            raise InputError("K must be positive", details={"K": K})
        op = self.repo.get_operator("example_242_Ustar")
        space = self.repo.default_space("example_242_Ustar")
        k = 2 * np.arange(K, dtype=np.int64) + 1
        x_sq = k.astype(float) ** -3
        terms = space.w(op.apply_sigma(k)) * x_sq
        partial = np.cumsum(terms)
        # sum_{j<K} 1/(2j+1) = H_{2K} - H_K / 2, with H_n = psi(n + 1) + gamma
        harmonic = lambda m: float(scipy.special.digamma(m + 1) + np.euler_gamma)  # noqa: E731
        return Divergence(
            partial_sums=partial,
            witness_h_norm_sq=float(np.sum(space.w(k) * x_sq)),
            closed_form=harmonic(2 * K) - 0.5 * harmonic(K),
        )

    # Wold split

    def seq_wold(self, op: SeqOperator, horizon: Optional[int] = None) -> SeqWold:
        """
        Index-level Wold split on ``[1, N]``.

        Wandering indices have no preimage; shift layer ``k`` is the image of
        the wandering set under ``sigma^k`` (layer 0 is the wandering set).
        The rest is unitary when the map is declared surjective; otherwise an
        index whose backward orbit leaves the window lands in the
        undetermined band, and the remaining indices lie on finite cycles.

        Raises:
            NotIsometric: If ``op`` is not an L-isometry on the horizon.
        """
        if not self.seq_is_l_isometry(op, horizon):
            raise NotIsometric(f"{op.name} is not an L-isometry on the horizon")
        n = self._window(horizon)
        N = int(n[-1])
        inverse = op.sigma_inverse if op.sigma_inverse is not None and not op.overrides else (
            self._tabulated_inverse(op, 4 * N)
        )
        pre = np.asarray(inverse(n), dtype=np.int64)
        label = np.full(N + 1, -1, dtype=np.int64)  # -1 unset, >= 0 layer, -2 band

        def propagate(frontier: Index, tag: Optional[int]) -> List[Index]:
            layers = []
            depth = 0
            while frontier.size:
                label[frontier] = depth if tag is None else tag
                layers.append(frontier)
                nxt = op.apply_sigma(frontier)
                nxt = nxt[(nxt >= 1) & (nxt <= N)]
                frontier = nxt[label[nxt] == -1]
                depth += 1
            return layers

        wandering = n[pre == 0]
        layers = propagate(wandering, None)
        if op.surjective:
            undetermined = np.zeros(0, dtype=np.int64)
        else:
            band = propagate(n[(pre > N) & (label[n] == -1)], -2)
            undetermined = np.sort(np.concatenate(band)) if band else np.zeros(0, dtype=np.int64)
        unitary = n[label[n] == -1]
        if undetermined.size:
            logger.info(f"{op.name}: {undetermined.size} indices in the undetermined band at N={N}")
        return SeqWold(
            horizon=N,
            wandering=wandering,
            layers=layers,
            unitary=unitary,
            undetermined=undetermined,
        )

    # Dense bridge

    def truncate(self, op: SeqOperator, space: WeightedSpace, N: int) -> Tuple[CMatrix, AForm]:
        """
        ``N x N`` matrix of ``op`` in H-coordinates ``y_n = sqrt(w(n)) x_n``.

        In these coordinates the Euclidean norm is the H-norm and the form
        ``A = diag(1/w)`` gives the L-inner product; images beyond ``N`` are
        dropped.
        """
        n = self._window(N)
        images = op.apply_sigma(n)
        keep = (images >= 1) & (images <= N)
        M = np.zeros((N, N), dtype=np.complex128)
        cols = n[keep]
        rows = images[keep]
        M[rows - 1, cols - 1] = op.apply_coeff(cols) * np.sqrt(space.w(rows) / space.w(cols))
        return M, AForm.diagonal(1.0 / space.w(n))

    # Report facades used by the router and the CLI

    def _boundedness_report(self, b: Boundedness, limit: int = 64) -> BoundednessReport:
        return BoundednessReport(
            bounded_evidence=b.bounded_evidence,
            sup_ratio=b.sup_ratio,
            trend=b.trend.value,
            window_sups=b.window_sups,
            witnesses=[WitnessEntry(index=i, ratio=r) for i, r in b.witnesses[:limit]],
        )

    def adjointability_report(
        self, name: str, space_name: Optional[str] = None, horizon: Optional[int] = None
    ) -> AdjointabilityResponse:
        try:
            op = self.repo.get_operator(name)
            space = self.repo.get_space(space_name) if space_name else self.repo.default_space(name)
            result = self.seq_adjointability(op, space, horizon)
            return AdjointabilityResponse(
                success=True,
                message=f"{name} on {space.name}",
                operator=name,
                space=space.name,
                horizon=int(self._window(horizon)[-1]),
                verdict=result.verdict.value,
                witness_map=result.witness_map,
                operator_bound=self._boundedness_report(result.operator),
                adjoint_bound=self._boundedness_report(result.adjoint),
            )
        except AGeometryError as e:
            raise e
        except Exception as e:
            logger.error(f"Failed to evaluate adjointability of {name}, error: {str(e)}")
            raise ComputationError(f"adjointability evaluation failed: {e}")

    def wold_report(
        self, name: str, horizon: Optional[int] = None, limit: int = 32
    ) -> SeqWoldResponse:
        try:
            wold = self.seq_wold(self.repo.get_operator(name), horizon)
            cut = lambda a: [int(v) for v in a[:limit]]  # noqa: E731
            return SeqWoldResponse(
                success=wold.partition_ok,
                message="Partition verified" if wold.partition_ok else "Partition check failed",
                operator=name,
                horizon=wold.horizon,
                wandering_count=int(wold.wandering.size),
                unitary_count=int(wold.unitary.size),
                undetermined_count=int(wold.undetermined.size),
                layer_count=len(wold.layers),
                layer_sizes=[int(layer.size) for layer in wold.layers[:limit]],
                wandering=cut(wold.wandering),
                unitary=cut(wold.unitary),
                undetermined=cut(wold.undetermined),
                shift_layers=[cut(layer) for layer in wold.layers[:limit]],
            )
        except AGeometryError as e:
            raise e
        except Exception as e:
            logger.error(f"Failed to compute Wold split of {name}, error: {str(e)}")
            raise ComputationError(f"Wold split failed: {e}")

    def divergence_report(self, K: int) -> DivergenceResponse:
        demo = self.divergence_demo(K)
        checkpoints: Dict[str, float] = {}
        step = 1
        while step <= K:
            checkpoints[str(step)] = float(demo.partial_sums[step - 1])
            step *= 10
        final = float(demo.partial_sums[-1])
        return DivergenceResponse(
            success=demo.monotone,
            message="Partial sums grow without bound" if demo.monotone else "Partial sums not monotone",
            K=K,
            final_partial_sum=final,
            closed_form=demo.closed_form,
            log_estimate=0.5 * np.log(4.0 * K) + 0.5 * np.euler_gamma,
            witness_h_norm_sq=demo.witness_h_norm_sq,
            monotone=demo.monotone,
            checkpoints=checkpoints,
        )
