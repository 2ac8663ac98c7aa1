import numpy as np
import pytest

from config import SolverSettings
from core.exceptions import InputError, NoConvergence, NotTangent, ShapeMismatch
from core.numerics import adjoint, svd_norm
from factories import random_form, random_hermitian
from features.geodesics.services import GeodesicService
from models import AForm, AIsometry, ExtensionMethod

FLIP = np.array([[0.0, 1.0], [1.0, 0.0]])


@pytest.fixture
def base(isometry, rng):
    return isometry.random_isometry(random_form(rng, 5), rng, random_form(rng, 2))


def test_lift_reproduces_velocity(geodesics, base, rng):
    v = geodesics.tangent_from_hermitian(base, random_hermitian(rng, 5))
    V_l = base.form.to_l(v.V, base.source)
    assert svd_norm(1j * v.X_l @ base.T_l - V_l) < 1e-10 * svd_norm(V_l)
    assert svd_norm(v.X_l - adjoint(v.X_l)) < 1e-12


def test_non_tangent_velocity_is_refused(geodesics):
    T = AIsometry(AForm.identity(2), np.eye(2))
    with pytest.raises(NotTangent):
        geodesics.make_tangent(T, np.eye(2))
    with pytest.raises(ShapeMismatch):
        geodesics.make_tangent(T, np.eye(3))


def test_flip_reaches_minus_identity_at_pi(geodesics):
    T = AIsometry(AForm.identity(2), np.eye(2))
    curve = geodesics.minimal_curve(geodesics.tangent_from_hermitian(T, FLIP))
    assert svd_norm(curve.at(np.pi) + np.eye(2)) < 1e-12
    assert curve.extension is None


def test_minimal_curve_stays_on_isometries(geodesics, base, rng):
    v = geodesics.tangent_from_hermitian(base, random_hermitian(rng, 5))
    curve = geodesics.minimal_curve(v)
    assert svd_norm(curve.Z_l) == pytest.approx(1.0, abs=1e-6)
    assert curve.time_scale == pytest.approx(1.0 / v.norm)
    for sample in geodesics.sample_curve(curve, np.linspace(-np.pi, np.pi, 9)):
        assert sample["isometry_defect"] < 1e-8
        assert sample["speed"] == pytest.approx(1.0, abs=1e-6)


def test_curve_starts_with_normalized_velocity(geodesics, base, rng):
    v = geodesics.tangent_from_hermitian(base, random_hermitian(rng, 5))
    curve = geodesics.minimal_curve(v)
    start_velocity = 1j * curve.Z_l @ base.T_l
    V_l = base.form.to_l(v.V, base.source)
    assert svd_norm(start_velocity - V_l / v.norm) < 1e-8


def test_zero_tangent_gives_constant_curve(geodesics, base):
    v = geodesics.tangent_from_hermitian(base, np.zeros((5, 5)))
    curve = geodesics.minimal_curve(v)
    assert curve.time_scale == 0.0
    assert svd_norm(curve.at(1.0) - base.T) < 1e-12


def test_geodesic_length_equals_time(geodesics, base, rng):
    curve = geodesics.minimal_curve(geodesics.tangent_from_hermitian(base, random_hermitian(rng, 5)))
    for t1 in (0.5, 2.0, np.pi):
        assert geodesics.geodesic_length(curve, t1) == pytest.approx(t1, abs=1e-6)


def test_curve_length_of_constant_speed(geodesics):
    assert geodesics.curve_length(lambda s: 2.0, 0.0, 1.5) == pytest.approx(3.0)
    assert geodesics.curve_length(lambda s: 2.0, 1.0, 1.0) == 0.0


def test_curve_length_gives_up(tolerances, app_settings, krein):
    service = GeodesicService(tolerances, SolverSettings(quadrature_max_level=3), app_settings, krein)
    with pytest.raises(NoConvergence):
        service.curve_length(np.cos, 0.0, 1.0)


def test_unperturbed_competitor_is_the_geodesic(geodesics, base, rng):
    curve = geodesics.minimal_curve(geodesics.tangent_from_hermitian(base, random_hermitian(rng, 5)))
    result = geodesics.competitor(curve, 1.0, np.zeros((5, 5)))
    assert result["endpoint_residual"] < 1e-9
    assert result["length"] == pytest.approx(1.0, abs=1e-6)


def test_race_has_no_shorter_competitor(geodesics, base, rng):
    v = geodesics.tangent_from_hermitian(base, random_hermitian(rng, 5))
    report = geodesics.race(v, 2.0, trials=4, seed=11)
    assert report.success and report.violations == 0
    assert report.max_endpoint_residual < 1e-9
    assert report.min_length >= 2.0 - 1e-6
    again = geodesics.race(v, 2.0, trials=4, seed=11)
    assert again.competitor_lengths == report.competitor_lengths


def test_race_rejects_long_times(geodesics, base, rng):
    v = geodesics.tangent_from_hermitian(base, random_hermitian(rng, 5))
    with pytest.raises(InputError):
        geodesics.race(v, 4.0, trials=1)


def test_curve_report_on_square_base(geodesics, isometry, rng):
    G = isometry.random_a_unitary(random_form(rng, 3), rng)
    v = geodesics.tangent_from_hermitian(G, random_hermitian(rng, 3))
    report = geodesics.curve_report(v, [0.0, 1.0], t1=1.0)
    assert report.success
    assert report.extension_method is None
    assert report.length == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("n,k", [(4, 1), (4, 3), (6, 2), (8, 5)])
def test_rectangular_base_curves_are_minimal(geodesics, isometry, n, k):
    rng = np.random.default_rng(100 * n + k)
    base = isometry.random_isometry(random_form(rng, n), rng, random_form(rng, k))
    v = geodesics.tangent_from_hermitian(base, random_hermitian(rng, n))
    curve = geodesics.minimal_curve(v)
    assert curve.extension is not None
    assert curve.extension.method != ExtensionMethod.DYKSTRA_FALLBACK
    for sample in geodesics.sample_curve(curve, np.linspace(0.0, np.pi, 5)):
        assert sample["isometry_defect"] < 1e-8
        assert sample["speed"] == pytest.approx(1.0, abs=1e-6)
    assert geodesics.geodesic_length(curve, 2.5) == pytest.approx(2.5, abs=1e-6)
    report = geodesics.race(v, 2.5, trials=3, seed=n)
    assert report.success and report.violations == 0


def test_race_fails_when_competitors_miss_the_endpoint(geodesics, base, rng, monkeypatch):
    v = geodesics.tangent_from_hermitian(base, random_hermitian(rng, 5))
    competitor = geodesics.competitor

    def shifted_endpoint(curve, t1, M):
        result = competitor(curve, t1, M)
        return {**result, "endpoint_residual": result["endpoint_residual"] + 1e-6}

    monkeypatch.setattr(geodesics, "competitor", shifted_endpoint)
    report = geodesics.race(v, 2.0, trials=2, seed=5)
    assert report.violations == 0
    assert report.max_endpoint_residual > 1e-9
    assert not report.success
    assert report.message == "Competitors do not share the endpoint"
