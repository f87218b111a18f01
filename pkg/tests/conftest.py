import pytest

from kaoneraser import PhysicalConstants, build_amplitude_model


@pytest.fixture(scope="session")
def k():
    return PhysicalConstants()


@pytest.fixture(scope="session")
def model(k):
    return build_amplitude_model(k)
