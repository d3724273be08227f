import pytest

from boundarylab.density import build_density
from boundarylab.words import GroupModel


@pytest.fixture(scope="session")
def unit_model():
    return GroupModel(2, (1.0, 1.0))


@pytest.fixture(scope="session")
def weighted_model():
    return GroupModel(2, (1.0, 2.0))


@pytest.fixture(scope="session")
def unit_density(unit_model):
    return build_density(unit_model)


@pytest.fixture(scope="session")
def weighted_density(weighted_model):
    return build_density(weighted_model)
