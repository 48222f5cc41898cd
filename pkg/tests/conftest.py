import pytest

from pseudocharacters.conjugacy import build_rho_2n, rho_prime


@pytest.fixture(scope="session")
def rho6():
    return build_rho_2n(3)


@pytest.fixture(scope="session")
def rho6_prime(rho6):
    return rho_prime(rho6)
