"""
Sequence Model Repository Module

Registry of the named weighted sequence spaces and basis-map operators. Index
rules are closed-form vectorized callables over ``int64`` arrays; every
operator is paired with the space it is usually studied on.
"""

import logging
from typing import Dict, List, Tuple

import numpy as np
from numpy.typing import NDArray

from core.exceptions import UnknownBuiltin
from models import SeqOperator, WeightedSpace

logger = logging.getLogger(__name__)

Index = NDArray[np.int64]


def isqrt(m: Index) -> Index:
    """Exact integer square root of a non-negative ``int64`` array."""
    m = np.asarray(m, dtype=np.int64)
    r = np.floor(np.sqrt(m.astype(float))).astype(np.int64)
    r = np.where(r * r > m, r - 1, r)
    r = np.where((r + 1) * (r + 1) <= m, r + 1, r)
    return r


def count_odd_squares(m: Index) -> Index:
    """Number of odd squares in ``[1, m]``."""
    return (isqrt(m) + 1) // 2


def is_odd_square(m: Index) -> NDArray[np.bool_]:
    r = isqrt(m)
    return (r * r == m) & (r % 2 == 1)


def non_odd_square(k: Index) -> Index:
    """``k``-th positive integer that is not an odd square.

    Smallest fixed point of ``m = k + count_odd_squares(m)``, reached from
    below; such a fixed point is never an odd square.
    """
    k = np.asarray(k, dtype=np.int64)
    m = k.copy()
    while True:
        nxt = k + count_odd_squares(m)
        if np.array_equal(nxt, m):
            break
        m = nxt
    return np.where(is_odd_square(m), m - 1, m)


def _unit(n: Index) -> NDArray[np.complex128]:
    return np.ones(np.shape(n), dtype=np.complex128)


def _shift(n: Index) -> Index:
    return n + 1


def _unshift(k: Index) -> Index:
    return np.where(k >= 2, k - 1, 0)


def _double(n: Index) -> Index:
    return 2 * n


def _halve(k: Index) -> Index:
    return np.where(k % 2 == 0, k // 2, 0)


def _sigma_u(m: Index) -> Index:
    """``e_{n^2} -> e_n`` for odd ``n``; the ``k``-th non-odd-square goes to ``e_{2k}``."""
    r = isqrt(m)
    return np.where(is_odd_square(m), r, 2 * (m - (r + 1) // 2))


def _sigma_ustar(n: Index) -> Index:
    """``e_n -> e_{n^2}`` for odd ``n``, ``e_{2k} -> e_{c(k)}`` with ``c(k)`` the ``k``-th non-odd-square."""
    odd = n % 2 == 1
    halves = np.where(odd, 1, n // 2)
    return np.where(odd, n * n, non_odd_square(halves))


def _identity(n: Index) -> Index:
    return np.asarray(n, dtype=np.int64).copy()


# (m, c_m): c_m indices on each side of 2^m + 1/2 are reflected across it
REFLECTION_LEVELS: Tuple[Tuple[int, int], ...] = tuple((m, 16 - m) for m in range(5, 16))


def _reflect(n: Index) -> Index:
    """Involution ``k -> 2^{m+1} + 1 - k`` on ``[2^m - c_m + 1, 2^m + c_m]``, identity elsewhere."""
    n = np.asarray(n, dtype=np.int64)
    out = n.copy()
    for m, c in REFLECTION_LEVELS:
        hit = (n > 2**m - c) & (n <= 2**m + c)
        out[hit] = 2 ** (m + 1) + 1 - n[hit]
    return out


_SPACES: Dict[str, WeightedSpace] = {
    "dirichlet": WeightedSpace(
        "dirichlet", lambda n: n + 1.0, "Dirichlet-type weight w(n) = n + 1"
    ),
    "sobolev": WeightedSpace("sobolev", lambda n: n * 1.0, "Sobolev-type weight w(n) = n"),
    "unit": WeightedSpace("unit", lambda n: np.ones(np.shape(n)), "unweighted, H = L"),
}

_OPERATORS: Dict[str, Tuple[SeqOperator, str]] = {
    "dirichlet_shift": (
        SeqOperator(
            "dirichlet_shift",
            _shift,
            _unit,
            "forward shift e_n -> e_{n+1} (multiplication by z)",
            sigma_inverse=_unshift,
        ),
        "dirichlet",
    ),
    "example_242_U": (
        SeqOperator(
            "example_242_U",
            _sigma_u,
            _unit,
            "unitary basis permutation bounded on H whose adjoint is not",
            sigma_inverse=_sigma_ustar,
            surjective=True,
        ),
        "sobolev",
    ),
    "example_242_Ustar": (
        SeqOperator(
            "example_242_Ustar",
            _sigma_ustar,
            _unit,
            "inverse permutation; sends odd e_n to e_{n^2} and leaves H",
            sigma_inverse=_sigma_u,
            surjective=True,
        ),
        "sobolev",
    ),
    "double_shift": (
        SeqOperator(
            "double_shift",
            _double,
            _unit,
            "e_n -> e_{2n}",
            sigma_inverse=_halve,
        ),
        "sobolev",
    ),
    "dyadic_reflections": (
        SeqOperator(
            "dyadic_reflections",
            _reflect,
            _unit,
            "unitary involution with c_m = 16 - m reflections across each 2^m (5 <= m < 16); "
            "no declared inverse, so preimages are tabulated",
        ),
        "sobolev",
    ),
    "identity": (
        SeqOperator("identity", _identity, _unit, "identity", sigma_inverse=_identity, surjective=True),
        "unit",
    ),
}


class SequenceRepository:
    """
    Lookup of named spaces and operators.
    """

    def get_operator(self, name: str) -> SeqOperator:
        """
        Return the built-in operator called ``name``.

        Raises:
            UnknownBuiltin: If no such operator exists.
        """
        entry = _OPERATORS.get(name)
        if entry is None:
            raise UnknownBuiltin(
                f"unknown operator {name!r}", details={"available": self.operator_names()}
            )
        return entry[0]

    def get_space(self, name: str) -> WeightedSpace:
        space = _SPACES.get(name)
        if space is None:
            raise UnknownBuiltin(
                f"unknown space {name!r}", details={"available": sorted(_SPACES)}
            )
        return space

    def default_space(self, operator_name: str) -> WeightedSpace:
        self.get_operator(operator_name)
        return _SPACES[_OPERATORS[operator_name][1]]

    def operator_names(self) -> List[str]:
        return sorted(_OPERATORS)

    def space_names(self) -> List[str]:
        return sorted(_SPACES)
