import pytest

from chromalg.derivation import derive_presentation, sigma_n_presentation
from chromalg.poly import GF, QQ, Generator, PolyRing


@pytest.fixture(scope="session")
def b1_312():
    """B_1 for p=3, i=1, n=2: the smallest interesting tower stage."""
    pres, state = derive_presentation(3, 1, 2, 1)
    return pres, state


@pytest.fixture(scope="session")
def sigma_312():
    """K(1)_*E(1) derivation with two stages at p=3."""
    return sigma_n_presentation(3, 1, 2)


@pytest.fixture(scope="session")
def derivation_313_m2():
    return derive_presentation(3, 1, 3, 2)


@pytest.fixture
def small_ring():
    return PolyRing(GF(3), [
        Generator("t", 4),
        Generator("w", 16, invertible=True),
        Generator("v", 4, invertible=True),
    ])


@pytest.fixture
def rational_ring():
    return PolyRing(QQ, [Generator("a", 2), Generator("b", 4)])
