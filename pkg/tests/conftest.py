import pytest

from hyperkub.oracle import pocket_orbits


@pytest.fixture(scope="session")
def pocket():
    return pocket_orbits()
