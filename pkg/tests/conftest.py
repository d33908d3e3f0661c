"""
Pytest configuration and fixtures for the bgk-spectra tests
"""
import os
import sys

import pytest

# Add the project root to the Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from models.enums import DifferenceScheme
from operators.controller import OperatorController
from operators.operator_schemas import GridSpec
from potential.controller import PotentialController
from potential.potential_schemas import PotentialSpec


def make_grid(spec, catalog, h, N, K, scheme=DifferenceScheme.fourier):
    """Grid on the default confinement box of the potential"""
    x_min, x_max = OperatorController().default_domain(spec, catalog, h)
    return GridSpec(x_min=x_min, x_max=x_max, N=N, K=K, h=h, scheme=scheme)


def make_bundle(spec, catalog, h, N, K, scheme=DifferenceScheme.fourier):
    return OperatorController().assemble(spec, make_grid(spec, catalog, h, N, K, scheme))


# Potential specs
@pytest.fixture(scope="session")
def harmonic_spec():
    """V = x^2/2"""
    return PotentialSpec.preset('harmonic')


@pytest.fixture(scope="session")
def double_well_spec():
    """V = (x^2 - 1)^2/4"""
    return PotentialSpec.preset('double_well')


@pytest.fixture(scope="session")
def tilted_spec():
    """Double well with the left minimum lowered by the 0.2 x tilt"""
    return PotentialSpec.preset('tilted_double_well')


# Critical point catalogs
@pytest.fixture(scope="session")
def harmonic_catalog(harmonic_spec):
    return PotentialController().find_critical_points(harmonic_spec)


@pytest.fixture(scope="session")
def double_well_catalog(double_well_spec):
    return PotentialController().find_critical_points(double_well_spec)


@pytest.fixture(scope="session")
def tilted_catalog(tilted_spec):
    return PotentialController().find_critical_points(tilted_spec)


# Assembled operators at reduced desk scale
@pytest.fixture(scope="session")
def harmonic_bundle(harmonic_spec, harmonic_catalog):
    """Harmonic well, h = 0.2, N = 48, K = 8"""
    return make_bundle(harmonic_spec, harmonic_catalog, 0.2, 48, 8)


@pytest.fixture(scope="session")
def double_well_bundle(double_well_spec, double_well_catalog):
    """Symmetric double well, h = 0.1, N = 96, K = 12"""
    return make_bundle(double_well_spec, double_well_catalog, 0.1, 96, 12)


@pytest.fixture(scope="session")
def small_double_well_bundle(double_well_spec, double_well_catalog):
    """Symmetric double well, h = 0.1, N = 64, K = 10, small enough for dense certificates"""
    return make_bundle(double_well_spec, double_well_catalog, 0.1, 64, 10)


@pytest.fixture(scope="session")
def tilted_bundle(tilted_spec, tilted_catalog):
    """Tilted double well, h = 0.1, N = 64, K = 10"""
    return make_bundle(tilted_spec, tilted_catalog, 0.1, 64, 10)


@pytest.fixture
def output_dir(tmp_path):
    """Temporary report directory"""
    target = tmp_path / "results"
    return str(target)
