"""Shared fixtures: seeded generators, settings and one instance of every service."""

import numpy as np
import pytest

from config import AppSettings, SolverSettings, ToleranceSettings
from features.a_space.services import ASpaceService
from features.geodesics.services import GeodesicService
from features.isometry_manifold.services import IsometryManifoldService
from features.krein_extension.services import KreinExtensionService
from features.sequence_models.repository import SequenceRepository
from features.sequence_models.services import SequenceModelService
from features.suite.services import AcceptanceSuiteService


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def tolerances():
    return ToleranceSettings()


@pytest.fixture
def solver():
    return SolverSettings()


@pytest.fixture
def app_settings():
    return AppSettings(horizon=4096, trials=8, threads=1, seed=3)


@pytest.fixture
def a_space(tolerances, solver):
    return ASpaceService(tolerances, solver)


@pytest.fixture
def isometry(tolerances, solver, a_space):
    return IsometryManifoldService(tolerances, solver, a_space)


@pytest.fixture
def krein(tolerances, solver):
    return KreinExtensionService(tolerances, solver)


@pytest.fixture
def geodesics(tolerances, solver, app_settings, krein):
    return GeodesicService(tolerances, solver, app_settings, krein)


@pytest.fixture
def repo():
    return SequenceRepository()


@pytest.fixture
def sequence(repo, app_settings):
    return SequenceModelService(repo, app_settings)


@pytest.fixture
def suite(tolerances, app_settings, a_space, isometry, krein, geodesics, sequence):
    return AcceptanceSuiteService(
        tolerances, app_settings, a_space, isometry, krein, geodesics, sequence
    )
