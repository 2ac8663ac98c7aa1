import numpy as np
import pytest

from core.exceptions import (
    GramNotPD,
    Infeasible,
    InvalidInstance,
    NonHermitian,
    Singular,
    VerificationFailed,
)
from core.numerics import svd_norm
from factories import random_hermitian, random_projection
from models import ExtensionMethod, KreinInstance

FORCED_X = [[0.0, 1.0], [1.0, 0.7]]
FIRST_AXIS = [[1.0, 0.0], [0.0, 0.0]]


def test_forced_instance_has_zero_corner(krein):
    inst = KreinInstance.normalized(FORCED_X, FIRST_AXIS)
    report = krein.extend_paper(inst)
    assert report.method == ExtensionMethod.PAPER_CONSTRUCTION
    assert abs(report.Z[1, 1]) < 1e-12
    assert svd_norm(report.Z - np.array([[0.0, 1.0], [1.0, 0.0]])) < 1e-12
    assert report.escalations == 0


def test_identity_extends_to_the_projection(krein, rng):
    P = random_projection(rng, 6, 2)
    report = krein.extend_paper(KreinInstance.normalized(np.eye(6), P))
    assert svd_norm(report.Z - P) < 1e-10


def test_random_instances_verify(krein, rng):
    for _ in range(15):
        n = int(rng.integers(2, 12))
        r = int(rng.integers(1, n))
        inst = KreinInstance.normalized(random_hermitian(rng, n), random_projection(rng, n, r))
        report = krein.extend_paper(inst)
        verified = krein.verify_extension(inst, report.Z)
        assert verified["ok"], verified
        assert report.method != ExtensionMethod.DYKSTRA_FALLBACK
        if report.method == ExtensionMethod.PAPER_CONSTRUCTION:
            assert report.proof_checks["square_identity"] < 1e-9


@pytest.mark.parametrize("seed", range(4))
def test_block_completion_verifies(krein, seed):
    rng = np.random.default_rng(seed)
    for _ in range(10):
        n = int(rng.integers(2, 21))
        r = int(rng.integers(1, n))
        inst = KreinInstance.normalized(random_hermitian(rng, n), random_projection(rng, n, r))
        report = krein.extend_completion(inst)
        assert report.method == ExtensionMethod.BLOCK_COMPLETION
        assert report.constraint_residual < 1e-10
        assert krein.verify_extension(inst, report.Z)["ok"]


def test_block_completion_of_forced_instance(krein):
    inst = KreinInstance.normalized(FORCED_X, FIRST_AXIS)
    report = krein.extend_completion(inst)
    assert svd_norm(report.Z - np.array([[0.0, 1.0], [1.0, 0.0]])) < 1e-12


def test_overshooting_construction_falls_back_to_completion(krein, rng):
    inst = KreinInstance.normalized(random_hermitian(rng, 6), random_projection(rng, 6, 2))
    try:
        krein.extend_paper(inst, fallback=False)
    except (Singular, VerificationFailed):
        report = krein.extend_paper(inst)
        assert report.method == ExtensionMethod.BLOCK_COMPLETION
        assert report.m_initial == pytest.approx(krein.default_m(inst))
        assert krein.verify_extension(inst, report.Z)["ok"]
    else:
        assert krein.extend_paper(inst).method == ExtensionMethod.PAPER_CONSTRUCTION


def test_dykstra_oracle_verifies(krein):
    inst = KreinInstance.normalized(FORCED_X, FIRST_AXIS)
    report = krein.extend_dykstra(inst)
    assert report.method == ExtensionMethod.DYKSTRA_FALLBACK
    assert report.iterations > 0
    assert krein.verify_extension(inst, report.Z)["ok"]


def test_dykstra_accepts_feasible_warm_start(krein, rng):
    inst = KreinInstance.normalized(random_hermitian(rng, 5), random_projection(rng, 5, 2))
    start = krein.extend_completion(inst).Z
    report = krein.extend_dykstra(inst, start=start)
    assert report.iterations == 0
    assert krein.verify_extension(inst, report.Z)["ok"]


def test_extend_report_methods(krein):
    inst = KreinInstance.normalized(FORCED_X, FIRST_AXIS)
    paper = krein.extend_report(inst, "paper")
    oracle = krein.extend_report(inst, "dykstra")
    completion = krein.extend_report(inst, "completion")
    assert paper.success and paper.method == "paper_construction"
    assert completion.success and completion.method == "block_completion"
    assert oracle.success and oracle.method == "dykstra_fallback"
    assert oracle.constraint_residual < 1e-8


def test_instance_is_normalized():
    inst = KreinInstance.normalized(3.0 * np.array(FORCED_X), FIRST_AXIS)
    assert inst.scale == pytest.approx(3.0)
    assert svd_norm(inst.X @ inst.P) == pytest.approx(1.0)


def test_invalid_instances():
    with pytest.raises(NonHermitian):
        KreinInstance.normalized([[0.0, 1.0], [0.0, 0.0]], FIRST_AXIS)
    with pytest.raises(InvalidInstance):
        KreinInstance.normalized(FORCED_X, [[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(InvalidInstance):
        KreinInstance.normalized([[0.0, 0.0], [0.0, 1.0]], FIRST_AXIS)


def test_infeasible_instance(krein):
    inst = KreinInstance(X=2.0 * np.eye(2), P=np.array(FIRST_AXIS, dtype=complex), norm_XP=2.0)
    with pytest.raises(Infeasible):
        krein.extend_paper(inst)


def test_small_m_is_refused(krein):
    inst = KreinInstance.normalized([[0.0, 1.0], [1.0, 0.0]], FIRST_AXIS)
    with pytest.raises(GramNotPD):
        krein.extend_paper(inst, m=1.0)


def test_norm_profile_follows_grid(krein):
    inst = KreinInstance.normalized(FORCED_X, FIRST_AXIS)
    profile = krein.norm_profile(inst, [2.0, 4.0, 8.0])
    assert [row["m"] for row in profile] == [2.0, 4.0, 8.0]
    for row in profile:
        assert row["norm_Z"] == pytest.approx(1.0)
        assert row["m_norm_B"] == pytest.approx(row["m"] * row["norm_B"])
