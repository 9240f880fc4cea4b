"""Insecure deterministic backends for testing.

Two backends whose groups are small enough that exhaustive oracles
(brute-force discrete log, full rank computation) run in milliseconds:

* ``SubgroupBackend`` -- the order-p multiplicative subgroup of the integers
  mod a prime q with p | q - 1.
* ``MockPairing`` -- three copies of the additive group of integers mod p
  with pairing(a, b) = a * b mod p.  Bilinearity is just integer
  multiplication, so every pairing identity is checkable by hand.

Both are constructor-gated: callers must pass ``insecure=True``.
"""

from __future__ import annotations

import hashlib

from .base import BackendError, Group, InvalidElementError, OpCounter, PairingGroup, check_prime


def _require_insecure_flag(insecure: bool, name: str) -> None:
    if not insecure:
        raise BackendError(
            f"{name} offers no cryptographic security; construct with insecure=True"
        )


class SubgroupBackend(Group):
    """Order-p multiplicative subgroup of Z_q^* (test backend, insecure)."""

    kind = "small-field-subgroup"
    insecure = True

    def __init__(self, q: int, p: int, g: int, *, insecure: bool = False):
        _require_insecure_flag(insecure, "SubgroupBackend")
        check_prime(q, "q")
        check_prime(p, "p")
        if (q - 1) % p != 0:
            raise BackendError(f"p = {p} does not divide q - 1 = {q - 1}")
        g %= q
        if g <= 1 or pow(g, p, q) != 1:
            raise BackendError(f"generator {g} does not have order {p} mod {q}")
        self.q = q
        self.order = p
        self.generator = g
        self.identity = 1
        self._width = (q.bit_length() + 7) // 8

    def mul(self, a, b, counter: OpCounter | None = None):
        if counter is not None:
            counter.multiplications += 1
        return a * b % self.q

    def exp(self, base, scalar, counter: OpCounter | None = None):
        if counter is not None:
            counter.exponentiations += 1
        return pow(base, scalar % self.order, self.q)

    def neg(self, a, counter: OpCounter | None = None):
        if counter is not None:
            counter.inversions += 1
        return pow(a, self.q - 2, self.q)

    def encode(self, a) -> bytes:
        return int(a).to_bytes(self._width, "big")

    def decode(self, data: bytes):
        if len(data) != self._width:
            raise InvalidElementError(f"expected {self._width} bytes, got {len(data)}")
        a = int.from_bytes(data, "big")
        if not 1 <= a < self.q or pow(a, self.order, self.q) != 1:
            raise InvalidElementError(f"{a} is not in the order-{self.order} subgroup")
        return a


class _AdditiveModP(Group):
    """Additive group of integers mod p, written through the generic API."""

    insecure = True

    def __init__(self, p: int, kind: str, generator: int = 1):
        check_prime(p, "p")
        self.order = p
        self.kind = kind
        self.generator = generator % p
        self.identity = 0
        self._width = (p.bit_length() + 7) // 8

    def mul(self, a, b, counter: OpCounter | None = None):
        if counter is not None:
            counter.multiplications += 1
        return (a + b) % self.order

    def exp(self, base, scalar, counter: OpCounter | None = None):
        if counter is not None:
            counter.exponentiations += 1
        return base * (scalar % self.order) % self.order

    def neg(self, a, counter: OpCounter | None = None):
        if counter is not None:
            counter.inversions += 1
        return (-a) % self.order

    def encode(self, a) -> bytes:
        return int(a).to_bytes(self._width, "big")

    def decode(self, data: bytes):
        if len(data) != self._width:
            raise InvalidElementError(f"expected {self._width} bytes, got {len(data)}")
        a = int.from_bytes(data, "big")
        if a >= self.order:
            raise InvalidElementError(f"{a} is not reduced mod {self.order}")
        return a


class MockPairing(PairingGroup):
    """Degenerate pairing over Z_p with e(a, b) = a * b mod p (insecure)."""

    kind = "mock-pairing"
    insecure = True

    def __init__(self, p: int, *, insecure: bool = False):
        _require_insecure_flag(insecure, "MockPairing")
        self.order = p
        self.g1 = _AdditiveModP(p, "mock-additive")
        self.g2 = _AdditiveModP(p, "mock-additive")
        # gt generator = pairing(1, 1) = 1
        self.gt = _AdditiveModP(p, "mock-additive")

    def pair(self, a, b, counter: OpCounter | None = None):
        if counter is not None:
            counter.pairings += 1
        return a * b % self.order

    def hash_to_g2(self, round_index: int):
        if round_index < 1:
            raise ValueError("round index must be >= 1")
        ctr = 0
        while True:
            digest = hashlib.shake_256(
                b"privsum/mock-h2" + round_index.to_bytes(8, "big") + ctr.to_bytes(4, "big")
            ).digest(2 * ((self.order.bit_length() + 7) // 8) + 16)
            r = int.from_bytes(digest, "big") % self.order
            if r != 0:
                return r
            ctr += 1


def find_test_subgroup(p: int, *, insecure: bool = True) -> SubgroupBackend:
    """Deterministically build a subgroup backend of the given prime order.

    Searches the smallest k with q = k*p + 1 prime, then takes h^((q-1)/p)
    for the smallest h that lands outside the trivial subgroup.  Useful for
    Pollard tests that need a moderately large (but still insecure) order.
    """
    import gmpy2

    check_prime(p, "p")
    k = 2
    while True:
        q = k * p + 1
        if gmpy2.is_prime(q):
            for h in range(2, 1000):
                g = pow(h, (q - 1) // p, q)
                if g != 1:
                    return SubgroupBackend(q, p, g, insecure=insecure)
        k += 1
