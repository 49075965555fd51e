import pytest

from meanmult import hecke, primes


@pytest.fixture(scope="session")
def ps_1e6():
    return primes.get_prime_set(10**6)


@pytest.fixture(scope="session")
def tau_1e4():
    return hecke.eta24_expand(10**4)


@pytest.fixture(scope="session")
def tau_1e5():
    return hecke.eta24_expand(10**5)


@pytest.fixture(scope="session")
def tau_1e6():
    # ~10 s of exact series arithmetic; shared by the large-scale tests
    return hecke.eta24_expand(10**6)


@pytest.fixture(scope="session")
def tau_nc_1e6(tau_1e6):
    return hecke.normalize(tau_1e6)
