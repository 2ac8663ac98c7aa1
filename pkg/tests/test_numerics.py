import numpy as np
import pytest

from core.exceptions import NonHermitian, ShapeMismatch
from core.numerics import (
    as_cmatrix,
    exp_frechet,
    herm_eig,
    herm_sqrt,
    identity_defect,
    mat_exp,
    numerical_rank,
    pinv_solve,
    svd_norm,
)
from factories import random_complex, random_hermitian


def test_svd_norm_is_largest_singular_value():
    assert svd_norm(np.diag([3.0, -4.0])) == pytest.approx(4.0)
    assert svd_norm(np.zeros((0, 0))) == 0.0


def test_as_cmatrix_rejects_bad_input():
    assert as_cmatrix([1.0, 2.0]).shape == (2, 1)
    with pytest.raises(ShapeMismatch):
        as_cmatrix([[1.0, np.nan]])
    with pytest.raises(ShapeMismatch):
        as_cmatrix(np.zeros((2, 2, 2)))
    with pytest.raises(ShapeMismatch):
        as_cmatrix(np.zeros((2, 3)), square=True)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_herm_eig_reconstructs(rng, method):
    H = random_hermitian(rng, 7)
    w, V = herm_eig(H, method=method)
    assert np.all(np.diff(w) >= 0.0)
    assert identity_defect(V.conj().T @ V) < 1e-12
    assert svd_norm((V * w) @ V.conj().T - H) < 1e-11 * svd_norm(H)


def test_jacobi_matches_lapack(rng):
    H = random_hermitian(rng, 9)
    w_lapack, _ = herm_eig(H, method="lapack")
    w_jacobi, _ = herm_eig(H, method="jacobi")
    assert np.allclose(w_lapack, w_jacobi, atol=1e-11)


def test_herm_eig_refuses_non_hermitian():
    with pytest.raises(NonHermitian):
        herm_eig([[0.0, 1.0], [0.0, 0.0]])


def test_herm_sqrt_squares_back(rng):
    Y = random_complex(rng, 5, 5)
    A = Y @ Y.conj().T
    R = herm_sqrt(A)
    assert svd_norm(R @ R - A) < 1e-10 * svd_norm(A)


def test_mat_exp_of_flip_at_pi_is_minus_identity():
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert svd_norm(mat_exp(1j * np.pi * X) + np.eye(2)) < 1e-14


def test_mat_exp_of_skew_hermitian_is_unitary(rng):
    U = mat_exp(1j * random_hermitian(rng, 6))
    assert identity_defect(U.conj().T @ U) < 1e-13


def test_exp_frechet_matches_central_difference(rng):
    M = 0.3 * random_complex(rng, 4, 4)
    E = random_complex(rng, 4, 4)
    expM, L = exp_frechet(M, E)
    h = 1e-6
    diff = (mat_exp(M + h * E) - mat_exp(M - h * E)) / (2 * h)
    assert svd_norm(expM - mat_exp(M)) < 1e-12
    assert svd_norm(L - diff) < 1e-6 * max(1.0, svd_norm(L))


def test_exp_frechet_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        exp_frechet(np.eye(2), np.eye(3))


def test_pinv_solve_and_rank(rng):
    F = random_complex(rng, 6, 2)
    M = F @ F.conj().T
    assert numerical_rank(M) == 2
    B = M @ random_complex(rng, 6, 3)
    X, residual = pinv_solve(M, B)
    assert residual < 1e-10 * svd_norm(B)
    assert svd_norm(M @ X - B) == pytest.approx(residual)


def random_unitary(rng, n):
    Q, R = np.linalg.qr(random_complex(rng, n, n))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def taylor_exp(M, terms=30):
    term = np.eye(M.shape[0], dtype=np.complex128)
    total = term.copy()
    for k in range(1, terms):
        term = term @ M / k
        total = total + term
    return total


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_herm_eig_on_random_sizes(method, seed):
    rng = np.random.default_rng([seed, 32])
    for _ in range(50):
        n = int(rng.integers(1, 33))
        H = random_hermitian(rng, n)
        w, V = herm_eig(H, method=method)
        scale = max(svd_norm(H), 1.0)
        assert np.all(np.diff(w) >= 0.0)
        assert identity_defect(V.conj().T @ V) < 1e-11
        assert svd_norm((V * w) @ V.conj().T - H) < 1e-10 * scale
        assert np.allclose(w, np.linalg.eigvalsh(H), atol=1e-10 * scale)


@pytest.mark.parametrize("shape", [(1, 1), (4, 4), (7, 3), (3, 9), (16, 16)])
def test_svd_norm_is_unitarily_invariant(rng, shape):
    rows, cols = shape
    M = random_complex(rng, rows, cols)
    U = random_unitary(rng, rows)
    V = random_unitary(rng, cols)
    assert svd_norm(U @ M @ V) == pytest.approx(svd_norm(M), rel=1e-12)
    assert svd_norm(M) == pytest.approx(np.linalg.norm(M, 2), rel=1e-12)


@pytest.mark.parametrize("kind", ["general", "hermitian", "skew_hermitian"])
@pytest.mark.parametrize("n", [1, 3, 8])
def test_mat_exp_matches_taylor_series(rng, kind, n):
    if kind == "general":
        M = random_complex(rng, n, n)
    elif kind == "hermitian":
        M = random_hermitian(rng, n)
    else:
        M = 1j * random_hermitian(rng, n)
    M = M * (float(rng.uniform(0.2, 1.0)) / max(svd_norm(M), 1e-300))
    expM = mat_exp(M)
    assert svd_norm(expM - taylor_exp(M)) < 1e-12
    assert identity_defect(expM @ mat_exp(-M)) < 1e-12


def test_pinv_solve_reports_the_residual_of_a_singular_system():
    X, residual = pinv_solve(np.diag([1.0, 0.0]), [1.0, 1.0])
    assert np.allclose(X, [[1.0], [0.0]])
    assert residual == pytest.approx(1.0)
