import dataclasses

import numpy as np
import pytest

from core.exceptions import InputError, NotIsometric, UnknownBuiltin
from features.sequence_models.repository import (
    count_odd_squares,
    isqrt,
    non_odd_square,
)
from models import SeqOperator, Trend, Verdict

HORIZON = 4096


def swap_pairs(n):
    return np.where(n % 2 == 1, n + 1, n - 1)


def test_isqrt_is_exact():
    m = np.array([0, 1, 3, 4, 15, 16, 10**12 - 1, 10**12, 10**12 + 1], dtype=np.int64)
    assert isqrt(m).tolist() == [0, 1, 1, 2, 3, 4, 10**6 - 1, 10**6, 10**6]


def test_odd_square_counting():
    assert count_odd_squares(np.array([1, 8, 9, 24, 25])).tolist() == [1, 1, 2, 2, 3]
    assert non_odd_square(np.arange(1, 10)).tolist() == [2, 3, 4, 5, 6, 7, 8, 10, 11]


def test_example_maps_are_mutually_inverse(repo):
    U = repo.get_operator("example_242_U")
    Ustar = repo.get_operator("example_242_Ustar")
    n = np.arange(1, 2001, dtype=np.int64)
    assert np.array_equal(U.apply_sigma(Ustar.apply_sigma(n)), n)
    assert np.array_equal(Ustar.apply_sigma(U.apply_sigma(n)), n)


def test_builtins_are_l_isometries(sequence, repo):
    for name in repo.operator_names():
        assert sequence.seq_is_l_isometry(repo.get_operator(name), HORIZON), name
    collapsing = SeqOperator("collapse", lambda n: (n + 1) // 2, lambda n: np.ones(n.shape))
    assert not sequence.seq_is_l_isometry(collapsing, HORIZON)
    with pytest.raises(NotIsometric):
        sequence.seq_adjointability(collapsing, repo.get_space("unit"), HORIZON)


@pytest.mark.parametrize(
    "name, verdict, witness_map",
    [
        ("dirichlet_shift", Verdict.ADJOINTABLE_EVIDENCE, None),
        ("example_242_U", Verdict.NON_ADJOINTABLE_EVIDENCE, "adjoint"),
        ("example_242_Ustar", Verdict.NON_ADJOINTABLE_EVIDENCE, "operator"),
        ("double_shift", Verdict.ADJOINTABLE_EVIDENCE, None),
        ("identity", Verdict.ADJOINTABLE_EVIDENCE, None),
        ("dyadic_reflections", Verdict.ADJOINTABLE_EVIDENCE, None),
    ],
)
def test_adjointability_verdicts(sequence, repo, name, verdict, witness_map):
    result = sequence.seq_adjointability(repo.get_operator(name), repo.default_space(name), HORIZON)
    assert result.verdict == verdict
    assert result.witness_map == witness_map


def test_adjoint_witness_ratio_is_the_index(sequence, repo):
    result = sequence.seq_adjointability(
        repo.get_operator("example_242_U"), repo.get_space("sobolev"), HORIZON
    )
    assert result.adjoint.trend == Trend.GROWING
    odd = [(i, r) for i, r in result.adjoint.witnesses if i % 2 == 1]
    assert odd and all(r == pytest.approx(i) for i, r in odd)
    assert result.operator.sup_ratio < 2.0


@pytest.mark.parametrize("horizon", [4095, 4096, 4097, 100_000, 131_072])
@pytest.mark.parametrize(
    "name, verdict",
    [
        ("example_242_U", Verdict.NON_ADJOINTABLE_EVIDENCE),
        ("example_242_Ustar", Verdict.NON_ADJOINTABLE_EVIDENCE),
        ("dirichlet_shift", Verdict.ADJOINTABLE_EVIDENCE),
        ("double_shift", Verdict.ADJOINTABLE_EVIDENCE),
    ],
)
def test_verdict_does_not_depend_on_horizon(sequence, repo, name, verdict, horizon):
    result = sequence.seq_adjointability(repo.get_operator(name), repo.default_space(name), horizon)
    assert result.verdict == verdict


def test_trend_ignores_the_partial_window(sequence, repo):
    op = repo.get_operator("example_242_Ustar")
    space = repo.get_space("sobolev")
    full = sequence.seq_bounded_on_H(op, space, 4095)
    extended = sequence.seq_bounded_on_H(op, space, 4096)
    assert len(full.window_sups) == 12
    assert extended.window_sups == full.window_sups
    assert extended.trend == Trend.GROWING


def test_double_shift_adjoint_is_a_contraction(sequence, repo):
    result = sequence.seq_adjointability(
        repo.get_operator("double_shift"), repo.get_space("sobolev"), HORIZON
    )
    assert result.adjoint.sup_ratio <= 1.0
    assert result.operator.sup_ratio == pytest.approx(2.0)


def test_tabulated_adjoint_inverts_the_map(sequence):
    op = SeqOperator("swap", swap_pairs, lambda n: np.full(n.shape, 1j))
    adj = sequence.seq_adjoint(op, depth=200)
    n = np.arange(1, 101, dtype=np.int64)
    assert np.array_equal(adj.apply_sigma(n), swap_pairs(n))
    assert np.allclose(adj.apply_coeff(n), -1j)
    assert adj.name == "swap*"


def test_adjoint_vanishes_off_the_range(sequence, repo):
    adj = sequence.seq_adjoint(repo.get_operator("dirichlet_shift"))
    assert adj.apply_sigma(np.array([1, 2, 5])).tolist() == [0, 1, 4]


def test_divergence_small_cases(sequence):
    one = sequence.divergence_demo(1)
    assert one.partial_sums.tolist() == [1.0]
    assert one.closed_form == pytest.approx(1.0)
    demo = sequence.divergence_demo(1000)
    assert demo.monotone
    assert demo.partial_sums[-1] == pytest.approx(demo.closed_form, rel=1e-12)
    assert demo.witness_h_norm_sq < np.pi**2 / 8
    with pytest.raises(InputError):
        sequence.divergence_demo(0)


def test_divergence_at_a_million_terms(sequence):
    demo = sequence.divergence_demo(1_000_000)
    final = float(demo.partial_sums[-1])
    assert final >= 7.0
    assert final == pytest.approx(demo.closed_form, rel=1e-9)
    assert final == pytest.approx(0.5 * np.log(4.0e6) + 0.5 * np.euler_gamma, abs=1e-6)


def test_wold_of_the_shift(sequence, repo):
    wold = sequence.seq_wold(repo.get_operator("dirichlet_shift"), 64)
    assert wold.wandering.tolist() == [1]
    assert len(wold.layers) == 64
    assert wold.unitary.size == 0 and wold.undetermined.size == 0
    assert wold.partition_ok


def test_wold_of_the_double_shift(sequence, repo):
    wold = sequence.seq_wold(repo.get_operator("double_shift"), 64)
    assert np.array_equal(wold.wandering, np.arange(1, 65, 2))
    assert wold.layers[1].tolist() == list(range(2, 65, 4))
    assert wold.partition_ok


def test_wold_of_a_permutation(sequence, repo):
    wold = sequence.seq_wold(repo.get_operator("example_242_Ustar"), 64)
    assert wold.wandering.size == 0
    assert wold.unitary.size == 64


def test_undeclared_permutation_has_a_band(sequence, repo):
    op = dataclasses.replace(repo.get_operator("example_242_Ustar"), surjective=False)
    wold = sequence.seq_wold(op, 64)
    assert wold.wandering.size == 0
    assert wold.undetermined.size > 0
    assert wold.partition_ok


def test_finite_cycles_are_unitary(sequence):
    op = SeqOperator("swap", swap_pairs, lambda n: np.ones(n.shape))
    wold = sequence.seq_wold(op, 32)
    assert wold.unitary.size == 32


def test_truncation_is_an_isometry_on_kept_columns(sequence, repo):
    M, form = sequence.truncate(repo.get_operator("double_shift"), repo.get_space("sobolev"), 8)
    assert M[1, 0] == pytest.approx(np.sqrt(2.0))
    assert M[7, 3] == pytest.approx(np.sqrt(2.0))
    assert np.count_nonzero(M) == 4
    gram = M.conj().T @ form.A @ M
    assert np.allclose(np.diag(gram)[:4], np.diag(form.A)[:4])


def test_unknown_builtins(repo, sequence):
    with pytest.raises(UnknownBuiltin):
        repo.get_operator("bilateral_shift")
    with pytest.raises(UnknownBuiltin):
        sequence.adjointability_report("dirichlet_shift", "bergman")


def test_reports(sequence):
    report = sequence.adjointability_report("example_242_Ustar", horizon=HORIZON)
    assert report.verdict == "non_adjointable_evidence"
    assert report.space == "sobolev"
    wold = sequence.wold_report("double_shift", horizon=64, limit=4)
    assert wold.wandering == [1, 3, 5, 7]
    assert wold.wandering_count == 32


def test_reflections_are_their_own_inverse(repo):
    op = repo.get_operator("dyadic_reflections")
    n = np.arange(1, 70_000, dtype=np.int64)
    assert op.sigma_inverse is None
    assert np.array_equal(op.apply_sigma(op.apply_sigma(n)), n)
    assert op.apply_sigma(np.array([22, 32, 33, 43, 44])).tolist() == [43, 33, 32, 22, 44]


@pytest.mark.parametrize("m", [5, 6, 9, 12])
def test_reflection_band_shrinks_as_horizon_doubles(sequence, repo, m):
    op = repo.get_operator("dyadic_reflections")
    small = sequence.seq_wold(op, 2**m)
    large = sequence.seq_wold(op, 2 ** (m + 1))
    assert small.undetermined.tolist() == list(range(2**m - (16 - m) + 1, 2**m + 1))
    assert 0 < large.undetermined.size < small.undetermined.size
    assert small.wandering.size == 0 and large.wandering.size == 0
    assert small.partition_ok and large.partition_ok


def test_reflection_band_closes_past_the_last_level(sequence, repo):
    wold = sequence.seq_wold(repo.get_operator("dyadic_reflections"), 2**16)
    assert wold.undetermined.size == 0
    assert wold.unitary.size == 2**16
