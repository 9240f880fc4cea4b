"""Abstract prime-order group and bilinear-pairing interfaces.

All protocol code talks to groups through :class:`Group` and
:class:`PairingGroup` so that the same party/aggregator logic runs on the
production curve backend and on the small insecure test backends.

Group elements are immutable, hashable values in a canonical form chosen by
each backend (ints for the modular backends, coordinate tuples for curve
points and extension-field elements).  Scalars are canonically reduced mod
the group order at the API boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict


class BackendError(ValueError):
    """Invalid backend parameters (non-prime order, bad generator, ...)."""


class InvalidElementError(ValueError):
    """An encoding or value that is not a valid element of the group."""


@dataclass
class OpCounter:
    """Tally of group operations inside one measurement scope.

    One counter per simulated party; never shared between workers.  Counts
    only grow; call :meth:`reset` between measured scopes.
    """

    exponentiations: int = 0
    multiplications: int = 0
    pairings: int = 0
    inversions: int = 0

    def reset(self) -> None:
        self.exponentiations = 0
        self.multiplications = 0
        self.pairings = 0
        self.inversions = 0

    def as_dict(self) -> dict:
        return asdict(self)

    def add(self, other: "OpCounter") -> None:
        self.exponentiations += other.exponentiations
        self.multiplications += other.multiplications
        self.pairings += other.pairings
        self.inversions += other.inversions


class Group:
    """A cyclic group of prime order with a distinguished generator.

    Subclasses set ``kind``, ``order``, ``generator``, ``identity`` and
    implement the element operations.  The descriptor itself is immutable
    after construction and safe to share across workers.
    """

    kind: str
    order: int
    generator: object
    identity: object
    insecure: bool = False

    # -- element operations -------------------------------------------------

    def mul(self, a, b, counter: OpCounter | None = None):
        """Group operation.  Increments ``counter.multiplications``."""
        raise NotImplementedError

    def exp(self, base, scalar: int, counter: OpCounter | None = None):
        """``base`` combined with itself ``scalar`` times (scalar mod order).

        Increments ``counter.exponentiations``.
        """
        raise NotImplementedError

    def neg(self, a, counter: OpCounter | None = None):
        """Inverse element (negation in additive notation).

        Increments ``counter.inversions``.
        """
        raise NotImplementedError

    def eq(self, a, b) -> bool:
        return a == b

    def is_identity(self, a) -> bool:
        return self.eq(a, self.identity)

    # -- canonical encoding -------------------------------------------------

    def encode(self, a) -> bytes:
        """Fixed-width big-endian canonical encoding, bit-stable across runs."""
        raise NotImplementedError

    def decode(self, data: bytes):
        """Inverse of :meth:`encode`; rejects invalid encodings."""
        raise NotImplementedError

    def validate(self, a) -> None:
        """Raise :class:`InvalidElementError` if ``a`` is not a group element."""
        self.decode(self.encode(a))

    def random_element(self, rng):
        """Uniform non-identity element, driven by ``rng.randrange``."""
        return self.exp(self.generator, rng.randrange(1, self.order))


class PairingGroup:
    """Three prime-order groups of common order plus a bilinear map.

    ``gt.generator`` is fixed to ``pair(p1, q2)`` so that the aggregation
    code can treat GT like any other cyclic group.
    """

    kind: str
    order: int
    g1: Group
    g2: Group
    gt: Group
    insecure: bool = False

    @property
    def p1(self):
        return self.g1.generator

    @property
    def q2(self):
        return self.g2.generator

    @property
    def gt_gen(self):
        return self.gt.generator

    def pair(self, a, b, counter: OpCounter | None = None):
        """Bilinear map G1 x G2 -> GT.  Increments ``counter.pairings``."""
        raise NotImplementedError

    def hash_to_g2(self, round_index: int):
        """Deterministic hash of a round counter to an order-p G2 element.

        Try-and-increment over SHAKE-256 of the big-endian round counter,
        cofactor-cleared where the backend needs it.  Swappable construction;
        nothing downstream depends on more than determinism and full order.
        """
        raise NotImplementedError


def check_prime(n: int, name: str = "modulus") -> None:
    """Reject composite or tiny moduli at backend construction time."""
    import gmpy2

    if n < 2 or not gmpy2.is_prime(int(n)):
        raise BackendError(f"{name} = {n} is not prime")
