"""
Dense complex matrix kernels.

Every other module works on ``numpy`` complex arrays (``CMatrix``) and reaches
for the helpers below: Hermitian eigendecomposition (LAPACK or cyclic Jacobi),
operator 2-norm, matrix exponential with its Frechet derivative, least-squares
solves and Hermitian functional calculus.
"""

import logging
from typing import Callable, Optional, Tuple

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from config import get_solver_settings, get_tolerance_settings
from core.exceptions import NoConvergence, NonHermitian, ShapeMismatch

logger = logging.getLogger(__name__)

CMatrix = NDArray[np.complex128]


def as_cmatrix(data: ArrayLike, square: bool = False) -> CMatrix:
    """Coerce ``data`` to a finite 2-D complex array.

    Args:
        data (ArrayLike): Matrix-like input; 1-D input becomes a column.
        square (bool): Require a square result.

    Returns:
        CMatrix: A fresh complex128 array.

    Raises:
        ShapeMismatch: If the input is not 2-D, not square when required, or
            holds NaN/Inf entries.
    """
    M = np.array(data, dtype=np.complex128)
    if M.ndim == 1:
        M = M.reshape(-1, 1)
    if M.ndim != 2:
        raise ShapeMismatch(f"expected a matrix, got an array with {M.ndim} dims")
    if square and M.shape[0] != M.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ShapeMismatch("matrix entries must be finite")
    return M


def adjoint(M: CMatrix) -> CMatrix:
    return M.conj().T


def hermitian_part(M: CMatrix) -> CMatrix:
    return 0.5 * (M + adjoint(M))


def max_norm(M: CMatrix) -> float:
    return float(np.max(np.abs(M))) if M.size else 0.0


def svd_norm(M: ArrayLike) -> float:
    """Largest singular value of ``M`` (the operator 2-norm).

    Args:
        M (ArrayLike): Any matrix; empty matrices have norm 0.

    Returns:
        float: ``sqrt(lambda_max(M* M))``.
    """
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def hermiticity_defect(M: CMatrix) -> float:
    return max_norm(M - adjoint(M))


def is_hermitian(M: CMatrix, tol: Optional[float] = None) -> bool:
    tol = get_tolerance_settings().hermiticity if tol is None else tol
    return hermiticity_defect(M) <= tol * max(svd_norm(M), 1.0)


def _jacobi_eigh(
    M: CMatrix, tol: float, max_sweeps: int
) -> Tuple[NDArray[np.float64], CMatrix]:
    """Cyclic two-sided Jacobi rotations for a complex Hermitian matrix.

    Each rotation first removes the phase of ``a_pq`` and then applies the
    real symmetric Jacobi rotation, so ``a_pq`` is annihilated exactly.
    """
    a = M.copy()
    n = a.shape[0]
    V = np.eye(n, dtype=np.complex128)
    scale = max(np.linalg.norm(a, "fro"), np.finfo(float).tiny)

    for sweep in range(max_sweeps):
        off = float(np.linalg.norm(a - np.diag(np.diag(a)), "fro"))
        if off <= tol * scale:
            logger.debug(f"Jacobi converged after {sweep} sweeps")
            return np.real(np.diag(a)).copy(), V
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                phase = apq / r
                theta = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = 1.0 if theta == 0.0 else np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # J = diag(1, conj(phase)) followed by the real rotation
                J = np.array(
                    [[c, s], [-s * np.conj(phase), c * np.conj(phase)]],
                    dtype=np.complex128,
                )
                idx = [p, q]
                a[:, idx] = a[:, idx] @ J
                a[idx, :] = adjoint(J) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                V[:, idx] = V[:, idx] @ J

    raise NoConvergence(
        f"Jacobi eigensolver did not converge in {max_sweeps} sweeps",
        details={"off_norm": float(off), "scale": float(scale)},
    )


def herm_eig(
    M: ArrayLike, tol: Optional[float] = None, method: Optional[str] = None
) -> Tuple[NDArray[np.float64], CMatrix]:
    """Eigendecomposition of a Hermitian matrix.

    Args:
        M (ArrayLike): Square Hermitian matrix.
        tol (Optional[float]): Hermiticity tolerance relative to ``||M||``.
        method (Optional[str]): ``"lapack"`` or ``"jacobi"``; defaults to
            the configured solver.

    Returns:
        Tuple[NDArray, CMatrix]: Ascending real eigenvalues and a unitary
        matrix of eigenvectors with ``M = V diag(w) V*``.

    Raises:
        NonHermitian: If ``||M - M*||_max`` exceeds the tolerance.
        NoConvergence: If the Jacobi sweeps hit their cap.
    """
    M = as_cmatrix(M, square=True)
    solver = get_solver_settings()
    tol = get_tolerance_settings().hermiticity if tol is None else tol
    method = solver.eigen_solver if method is None else method

    defect = hermiticity_defect(M)
    norm = svd_norm(M)
    if defect > tol * max(norm, 1.0):
        raise NonHermitian(
            f"matrix is not Hermitian (defect {defect:.3e})",
            details={"defect": defect, "norm": norm},
        )
    H = hermitian_part(M)
    if H.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=np.complex128)

    if method == "jacobi":
        w, V = _jacobi_eigh(
            H,
            tol=4.0 * H.shape[0] * np.finfo(float).eps,
            max_sweeps=solver.jacobi_max_sweeps,
        )
    elif method == "lapack":
        w, V = np.linalg.eigh(H)
    else:
        raise ValueError(f"unknown eigen solver {method!r}")

    order = np.argsort(w, kind="stable")
    return np.asarray(w[order], dtype=float), np.asarray(V[:, order], dtype=np.complex128)


def herm_function(M: ArrayLike, func: Callable[[NDArray], NDArray]) -> CMatrix:
    """Apply ``func`` to the spectrum of a Hermitian matrix."""
    w, V = herm_eig(M)
    return (V * func(w)) @ adjoint(V)


def herm_sqrt(M: ArrayLike) -> CMatrix:
    return herm_function(M, lambda w: np.sqrt(np.clip(w, 0.0, None)))


def herm_inv_sqrt(M: ArrayLike) -> CMatrix:
    return herm_function(M, lambda w: 1.0 / np.sqrt(w))


def min_eig(M: ArrayLike) -> float:
    w, _ = herm_eig(M)
    return float(w[0]) if w.size else 0.0


def is_skew_hermitian(M: CMatrix) -> bool:
    return hermiticity_defect(1j * M) <= get_tolerance_settings().hermiticity * max(svd_norm(M), 1.0)


def mat_exp(M: ArrayLike) -> CMatrix:
    """Matrix exponential.

    Hermitian and skew-Hermitian inputs go through the eigenbasis, which keeps
    ``exp(iZ)`` unitary to rounding; everything else uses scaling and squaring
    with Pade approximants.

    Args:
        M (ArrayLike): Square matrix.

    Returns:
        CMatrix: ``exp(M)``.
    """
    M = as_cmatrix(M, square=True)
    if M.shape[0] == 0:
        return M.copy()
    if is_hermitian(M):
        return herm_function(M, np.exp)
    if is_skew_hermitian(M):
        H = -1j * M
        return herm_function(hermitian_part(H), lambda w: np.exp(1j * w))
    return np.asarray(scipy.linalg.expm(M), dtype=np.complex128)


def exp_frechet(M: ArrayLike, E: ArrayLike) -> Tuple[CMatrix, CMatrix]:
    """Exponential and its directional derivative via the doubled block matrix.

    ``exp([[M, E], [0, M]]) = [[exp(M), L(M, E)], [0, exp(M)]]`` where
    ``L(M, E)`` is the Frechet derivative of ``exp`` at ``M`` along ``E``.

    Args:
        M (ArrayLike): Base point, square.
        E (ArrayLike): Direction, same shape.

    Returns:
        Tuple[CMatrix, CMatrix]: ``exp(M)`` and ``L(M, E)``.
    """
    M = as_cmatrix(M, square=True)
    E = as_cmatrix(E, square=True)
    if M.shape != E.shape:
        raise ShapeMismatch(f"direction shape {E.shape} does not match {M.shape}")
    n = M.shape[0]
    block = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    block[:n, :n] = M
    block[n:, n:] = M
    block[:n, n:] = E
    big = scipy.linalg.expm(block)
    return np.asarray(big[:n, :n]), np.asarray(big[:n, n:])


def pinv_solve(
    M: ArrayLike, B: ArrayLike, rcond: Optional[float] = None
) -> Tuple[CMatrix, float]:
    """Least-squares solution ``X = M^+ B`` with a relative rank cutoff.

    Args:
        M (ArrayLike): Coefficient matrix.
        B (ArrayLike): Right-hand side with as many rows as ``M``.
        rcond (Optional[float]): Singular values below ``rcond * sigma_max``
            count as zero.

    Returns:
        Tuple[CMatrix, float]: ``X`` and the residual ``||MX - B||``.
    """
    M = as_cmatrix(M)
    B = as_cmatrix(B)
    if M.shape[0] != B.shape[0]:
        raise ShapeMismatch(f"cannot solve {M.shape} X = {B.shape}")
    rcond = get_tolerance_settings().rank_cutoff if rcond is None else rcond
    X = np.linalg.pinv(M, rcond=rcond) @ B
    return X, svd_norm(M @ X - B)


def singular_values(M: ArrayLike) -> NDArray[np.float64]:
    M = np.asarray(M)
    if M.size == 0:
        return np.zeros(0)
    return np.linalg.svd(M, compute_uv=False)


def numerical_rank(M: ArrayLike, rcond: Optional[float] = None) -> int:
    rcond = get_tolerance_settings().rank_cutoff if rcond is None else rcond
    s = singular_values(M)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rcond * s[0]))


def range_basis(M: ArrayLike, rcond: Optional[float] = None) -> Tuple[CMatrix, CMatrix]:
    """Orthonormal bases of ``R(M)`` and of its orthogonal complement."""
    M = as_cmatrix(M)
    U, _, _ = np.linalg.svd(M)
    r = numerical_rank(M, rcond)
    return U[:, :r], U[:, r:]


def identity_defect(M: CMatrix) -> float:
    return svd_norm(M - np.eye(M.shape[0]))
