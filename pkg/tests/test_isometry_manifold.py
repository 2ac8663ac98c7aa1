import numpy as np
import pytest

from core.exceptions import NotIsometric, ProjectionMismatch, ShapeMismatch, TooFar
from core.numerics import adjoint, identity_defect, svd_norm
from factories import random_form
from models import AForm, AIsometry, AUnitary


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def test_identity_is_isometric(isometry):
    T = AIsometry(AForm.identity(3), np.eye(3))
    report = isometry.check_report(T)
    assert report.success and report.isometric
    assert report.defect < 1e-14
    assert report.lambda_witness == pytest.approx(1.0, abs=1e-8)


def test_scaled_identity_is_not_isometric(isometry):
    report = isometry.check_report(AIsometry(AForm.identity(2), 2.0 * np.eye(2)))
    assert not report.success
    assert report.defect == pytest.approx(3.0)


def test_random_rectangular_isometry(isometry, rng):
    form = random_form(rng, 6)
    source = random_form(rng, 3)
    T = isometry.random_isometry(form, rng, source)
    check = isometry.check_isometry(T)
    assert check.isometric
    assert check.left_inverse_defect < 1e-9
    assert not T.is_square


def test_power_of_unitary_is_isometric(isometry, rng):
    G = isometry.random_a_unitary(random_form(rng, 5), rng, scale=1.3)
    check = isometry.check_isometry(G, power=3)
    assert check.isometric
    assert check.power_defect < 1e-9


def test_power_needs_square(isometry, rng):
    T = isometry.random_isometry(random_form(rng, 4), rng, random_form(rng, 2))
    with pytest.raises(ShapeMismatch):
        isometry.check_isometry(T, power=2)


def test_section_of_a_rotation_is_the_rotation(isometry):
    form = AForm.identity(2)
    source = AForm.identity(1)
    theta = 0.3
    T0 = AIsometry(form, [[1.0], [0.0]], source)
    T = AIsometry(form, rotation(theta)[:, :1], source)
    result = isometry.isometry_section(T0, T)
    assert svd_norm(result.G.T - rotation(theta)) < 1e-12
    assert result.reconstruction_residual < 1e-12
    assert result.projection_distance == pytest.approx(np.sin(theta))


def test_section_at_base_point_is_identity(isometry, rng):
    T0 = isometry.random_isometry(random_form(rng, 5), rng, random_form(rng, 2))
    result = isometry.isometry_section(T0, T0)
    assert identity_defect(result.G.T) < 1e-9
    assert result.sufficient_radius == 0.0


def test_random_sections(isometry, rng):
    for n, k in ((3, 1), (5, 2), (6, 6)):
        form = random_form(rng, n)
        T0 = isometry.random_isometry(form, rng, random_form(rng, k) if k < n else None)
        G = isometry.random_a_unitary(form, rng, scale=0.3)
        T = AIsometry(form, G.T @ T0.T, None if T0.is_square else T0.source)
        result = isometry.isometry_section(T0, T)
        assert result.reconstruction_residual < 1e-8
        assert result.unitary_defect < 1e-8


def test_orthogonal_final_projections_are_too_far(isometry):
    form = AForm.identity(2)
    source = AForm.identity(1)
    T0 = AIsometry(form, [[1.0], [0.0]], source)
    T = AIsometry(form, [[0.0], [1.0]], source)
    with pytest.raises(TooFar):
        isometry.isometry_section(T0, T)


def test_section_refuses_non_isometries(isometry):
    form = AForm.identity(2)
    with pytest.raises(NotIsometric):
        isometry.isometry_section(AIsometry(form, np.eye(2)), AIsometry(form, 2.0 * np.eye(2)))


def test_conjugator_reconstructs(isometry, rng):
    form = random_form(rng, 5)
    source = random_form(rng, 2)
    T1 = isometry.random_isometry(form, rng, source)
    G = isometry.random_a_unitary(form, rng, scale=0.4)
    T2 = AIsometry(form, G.T @ T1.T, source)
    H = isometry.projection_section(isometry.final_projection(T1), isometry.final_projection(T2))
    result = isometry.conjugator(T1, T2, H)
    assert result.reconstruction_residual < 1e-8
    assert result.unitary_defect < 1e-8
    report = isometry.conjugator_report(T1, T2)
    assert report.success


def test_conjugator_needs_matching_projections(isometry, rng):
    form = random_form(rng, 4)
    source = random_form(rng, 1)
    T1 = isometry.random_isometry(form, rng, source)
    T2 = isometry.random_isometry(form, rng, source)
    with pytest.raises(ProjectionMismatch):
        isometry.conjugator(T1, T2, AUnitary(form, np.eye(4)))


def test_orbit_projection_check(isometry, rng):
    form = random_form(rng, 4)
    T1 = isometry.random_isometry(form, rng, random_form(rng, 2))
    G = isometry.random_a_unitary(form, rng)
    T2 = AIsometry(form, G.T @ T1.T, T1.source)
    check = isometry.orbit_projection_check(G, T1, T2)
    assert check["holds"]
    assert check["projection_residual"] < 1e-8


def test_dense_wold_is_trivial(isometry, rng):
    G = isometry.random_a_unitary(random_form(rng, 7), rng, scale=2.0)
    assert isometry.dense_wold(G) == {"unitary_dim": 7, "shift_dim": 0, "wandering_dim": 0}
    T = isometry.random_isometry(random_form(rng, 3), rng, random_form(rng, 2))
    with pytest.raises(ShapeMismatch):
        isometry.dense_wold(T)


def test_adjointability_conditions_agree(isometry, rng):
    form = random_form(rng, 5)
    T = isometry.random_isometry(form, rng, random_form(rng, 3))
    eq = isometry.adjointability_equivalence(T)
    assert eq.all_agree and eq.adjoint_exists
    assert eq.half_power_witness == pytest.approx(1.0, abs=1e-7)
    assert eq.details["model_residual"] < 1e-10
    assert eq.details["lambda_gap"] >= -1e-12


def test_model_witness_is_the_conjugated_sharp_adjoint(isometry, rng):
    T = isometry.random_isometry(random_form(rng, 4), rng, random_form(rng, 2))
    sharp = T.form.sharp(T.T, T.source)
    conjugated = T.source.sqrtA @ sharp @ T.form.invSqrtA
    assert svd_norm(conjugated - adjoint(T.T_l)) < 1e-10
    eq = isometry.adjointability_equivalence(T)
    assert eq.l_adjoint_preserves_model and eq.lambda_finite


def test_group_operations(isometry, rng):
    form = random_form(rng, 4)
    G = isometry.random_a_unitary(form, rng)
    H = isometry.random_a_unitary(form, rng)
    assert identity_defect(isometry.compose(G, isometry.invert(G)).T) < 1e-10
    assert svd_norm(isometry.sharp(G).T - G.inverse) < 1e-10
    GH = isometry.compose(G, H)
    assert isometry.unitary_defect(GH) < 1e-10
    assert svd_norm(GH.inverse @ GH.T - np.eye(4)) < 1e-10
