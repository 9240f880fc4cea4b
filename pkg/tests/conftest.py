import pytest

from privsum.groups import MockPairing, find_test_subgroup, instantiate_backend

# Large enough that n * beta stays below the order in every test config.
BIG_INSECURE_PRIME = (1 << 31) - 1


@pytest.fixture(scope="session")
def tiny_group():
    """Order-101 subgroup of Z_607^*; small enough for exhaustive oracles."""
    return instantiate_backend("test-subgroup", insecure=True)


@pytest.fixture(scope="session")
def big_group():
    """Insecure subgroup of 31-bit prime order, for wider dlog ranges."""
    return find_test_subgroup(BIG_INSECURE_PRIME)


@pytest.fixture(scope="session")
def mock_pairing():
    return MockPairing(BIG_INSECURE_PRIME, insecure=True)


@pytest.fixture(scope="session")
def tiny_pairing():
    return MockPairing(101, insecure=True)


@pytest.fixture(scope="session")
def prod_pairing():
    return instantiate_backend("production-pairing")
