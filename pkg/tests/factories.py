"""Random instances shared by the test modules."""

import numpy as np

from core.numerics import adjoint, hermitian_part
from models import AForm


def random_complex(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_hermitian(rng, n):
    return hermitian_part(random_complex(rng, n, n))


def random_form(rng, n):
    Y = random_complex(rng, n, n)
    return AForm.from_matrix(Y @ adjoint(Y) / n + 0.5 * np.eye(n))


def random_projection(rng, n, rank):
    Q, _ = np.linalg.qr(random_complex(rng, n, rank))
    return Q @ adjoint(Q)
