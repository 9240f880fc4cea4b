"""Prime-order group backends behind a single factory.

Production backends (a 254-bit pairing-friendly curve) and insecure test
backends (small-field subgroup, mock additive pairing) share one API so
protocol code never branches on the backend.
"""

from __future__ import annotations

from functools import lru_cache

from .base import (
    BackendError,
    Group,
    InvalidElementError,
    OpCounter,
    PairingGroup,
    check_prime,
)
from .insecure import MockPairing, SubgroupBackend, find_test_subgroup

__all__ = [
    "BackendError",
    "Group",
    "InvalidElementError",
    "MockPairing",
    "OpCounter",
    "PairingGroup",
    "SubgroupBackend",
    "check_prime",
    "find_test_subgroup",
    "instantiate_backend",
]

# Default parameters for the small test subgroup: the order-101 subgroup of
# Z_607^* (3 is a primitive root mod 607, 3^6 = 122 has order 101).
TEST_SUBGROUP_Q = 607
TEST_SUBGROUP_P = 101
TEST_SUBGROUP_G = 122

MOCK_PAIRING_P = 101


@lru_cache(maxsize=None)
def _production_pairing():
    from .bn254 import BN254Pairing

    return BN254Pairing()


def instantiate_backend(spec: str, *, insecure: bool = False, **params):
    """Build a group or pairing descriptor by name.

    ``spec`` is one of:

    * ``"production-curve"``   -> the curve group G1 (for kdk1 / pcl)
    * ``"production-pairing"`` -> the full pairing backend (for kdk-multi)
    * ``"test-subgroup"``      -> small multiplicative subgroup; params
      ``q``, ``p``, ``g`` (defaults q=607, p=101, g=122); needs insecure=True
    * ``"mock-pairing"``       -> additive mod-p pairing; param ``p``
      (default 101); needs insecure=True
    """
    if spec == "production-curve":
        return _production_pairing().g1
    if spec == "production-pairing":
        return _production_pairing()
    if spec == "test-subgroup":
        return SubgroupBackend(
            params.get("q", TEST_SUBGROUP_Q),
            params.get("p", TEST_SUBGROUP_P),
            params.get("g", TEST_SUBGROUP_G),
            insecure=insecure,
        )
    if spec == "mock-pairing":
        return MockPairing(params.get("p", MOCK_PAIRING_P), insecure=insecure)
    raise BackendError(f"unknown backend spec {spec!r}")
