"""Party state machines and aggregation for the three summation protocols.

Variants:

* ``kdk1`` -- single-round masking with the fixed +1/-1 matrix in a DDH
  group; one code path with pcl (the fixed matrix is just the ``kdk-sign``
  topology).
* ``kdkm`` -- multi-round via a bilinear pairing: round randomness comes
  from hashing the round counter into G2, masks from pairing it against the
  other parties' G1 keys.  Keys at lower indices are negated once at setup
  so rounds stay inversion-free.
* ``pcl``  -- multi-round via per-round pseudorandom skew-symmetric
  exponent matrices; round count bounded by floor((n - t) / 2).

Everything a party broadcasts is a :class:`Contribution`; the aggregator
multiplies them and recovers the sum with Pollard's lambda over [0, n*beta].
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .dlog import DlogRange, pollard_lambda
from .groups import Group, OpCounter, PairingGroup
from .matrixgen import TopologyPlan, chi_row, derive_seed

VARIANTS = ("kdk1", "kdkm", "pcl")

# Keeps dlog recovery of the aggregate tractable.
MAX_MESSAGE_SPACE = 1 << 48


class ProtocolError(ValueError):
    pass


class RoundBoundError(ProtocolError):
    """Requested rounds exceed what the variant supports securely."""


class AggregationError(ProtocolError):
    """Aggregate dlog not found: corrupted or out-of-range contribution."""


@dataclass
class ProtocolParams:
    """Validated run parameters shared by all parties and the aggregator."""

    variant: str
    backend: object  # Group for kdk1/pcl, PairingGroup for kdkm
    n: int
    beta: int
    max_rounds: int = 1
    tolerance: int = 0
    topology: TopologyPlan | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ProtocolError(f"unknown variant {self.variant!r}")
        if self.n < 1:
            raise ProtocolError("need at least one party")
        if self.beta < 0:
            raise ProtocolError("beta must be non-negative")
        if self.n * self.beta >= MAX_MESSAGE_SPACE:
            raise ProtocolError("n*beta exceeds the 2^48 recovery limit")
        if not 0 <= self.tolerance < self.n:
            raise ProtocolError("tolerance must satisfy 0 <= t < n")
        if self.variant == "kdkm":
            if not isinstance(self.backend, PairingGroup):
                raise ProtocolError("kdkm requires a pairing backend")
        elif not isinstance(self.backend, Group):
            raise ProtocolError(f"{self.variant} requires a plain group backend")
        if self.n * self.beta >= self.order:
            raise ProtocolError("n*beta must be below the group order")
        if self.variant == "kdk1" and self.max_rounds != 1:
            raise RoundBoundError("kdk1 supports a single round per key setup")
        if self.variant == "pcl" and self.n > 1:  # n=1 has nothing to mask
            bound = (self.n - self.tolerance) // 2
            if self.max_rounds > bound:
                raise RoundBoundError(
                    f"pcl with n={self.n}, t={self.tolerance} supports at most "
                    f"{bound} rounds; got {self.max_rounds}"
                )
        if self.max_rounds < 1:
            raise ProtocolError("need at least one round")
        if self.topology is None:
            default = "kdk-sign" if self.variant in ("kdk1", "kdkm") else "full"
            self.topology = TopologyPlan(n=self.n, strategy=default)
        if self.topology.n != self.n:
            raise ProtocolError("topology plan is for a different party count")
        # KDK keeps +/-1 coefficients even under sparse topologies unless the
        # caller explicitly opts into Z_p coefficients.
        if (
            self.variant in ("kdk1", "kdkm")
            and self.topology.strategy != "kdk-sign"
            and self.topology.sign_coefficients is None
        ):
            self.topology = dataclasses.replace(self.topology, sign_coefficients=True)

    @property
    def order(self) -> int:
        return self.backend.order

    @property
    def key_group(self) -> Group:
        """Group the public keys live in (G1 for the pairing variant)."""
        return self.backend.g1 if self.variant == "kdkm" else self.backend

    @property
    def aggregation_group(self) -> Group:
        """Group the broadcast contributions live in (GT for kdkm)."""
        return self.backend.gt if self.variant == "kdkm" else self.backend

    def dlog_range(self) -> DlogRange:
        return DlogRange(0, self.n * self.beta)


@dataclass
class PartyState:
    index: int
    secret: int
    params: ProtocolParams
    counter: OpCounter = field(default_factory=OpCounter)
    public_keys: list | None = None  # 1-based: public_keys[i], [0] unused
    negated_keys: list | None = None  # kdkm: -U_j cached for j < index
    seed: int | None = None
    next_round: int = 1

    @property
    def ready(self) -> bool:
        return self.public_keys is not None


@dataclass(frozen=True)
class Contribution:
    variant: str
    round: int
    party: int
    value: object

    def payload_hex(self, params: ProtocolParams) -> str:
        return params.aggregation_group.encode(self.value).hex()


@dataclass(frozen=True)
class AggregateResult:
    round: int
    sigma: int


def setup_party(params: ProtocolParams, index: int, rng, *, secret: int | None = None):
    """Sample a secret exponent and publish the public key.

    Returns ``(partial_state, public_key)``; the state is unusable until
    :func:`finalize_setup` has seen everyone's key.  ``secret`` can be
    forced for tests.
    """
    if not 1 <= index <= params.n:
        raise ProtocolError(f"party index {index} out of range 1..{params.n}")
    if secret is None:
        secret = rng.randrange(1, params.order)
    secret %= params.order
    if secret == 0:
        raise ProtocolError("secret exponent must be nonzero")
    state = PartyState(index=index, secret=secret, params=params)
    group = params.key_group
    public = group.exp(group.generator, secret, state.counter)
    return state, public


def finalize_setup(state: PartyState, public_keys) -> PartyState:
    """Install the full ordered key list; derive the matrix seed; for kdkm
    pre-negate keys at lower indices so rounds need no GT inversions."""
    params = state.params
    if len(public_keys) != params.n:
        raise ProtocolError(f"expected {params.n} public keys, got {len(public_keys)}")
    group = params.key_group
    for key in public_keys:
        group.validate(key)
    expected = group.exp(group.generator, state.secret)
    if not group.eq(public_keys[state.index - 1], expected):
        raise ProtocolError("own public key missing from the key list")
    state.public_keys = [None] + list(public_keys)
    state.seed = derive_seed(group, public_keys)
    if params.variant == "kdkm":
        state.negated_keys = [None] * (params.n + 1)
        for j in range(1, state.index):
            state.negated_keys[j] = group.neg(state.public_keys[j], state.counter)
    return state


def compute_contribution(state: PartyState, round_k: int, message: int) -> Contribution:
    """One party's broadcast value v_i for the round.

    kdk1/pcl: v = prod_j u_j^(x_i * A_ij) * g^m  (the secret is folded into
    the exponents, so the round costs non-holes + 1 exponentiations).
    kdkm:     v = (prod_j e(+/-U_j, Q_k))^(x_i) * g_T^m.
    """
    params = state.params
    if not state.ready:
        raise ProtocolError("finalize_setup has not run")
    if not 0 <= message <= params.beta:
        raise ProtocolError(f"message {message} outside [0, {params.beta}]")
    if round_k != state.next_round:
        raise ProtocolError(
            f"round {round_k} out of order (expected {state.next_round})"
        )
    if params.variant != "kdkm" and round_k > params.max_rounds:
        raise RoundBoundError(f"round {round_k} exceeds the {params.max_rounds}-round bound")

    p = params.order
    row = chi_row(params.topology, state.seed, round_k, state.index, p)
    counter = state.counter

    if params.variant == "kdkm":
        backend: PairingGroup = params.backend
        gt = backend.gt
        q_k = backend.hash_to_g2(round_k)
        w = None
        for j, c in row.entries:
            if c == 1:
                base = state.public_keys[j]
            elif c == p - 1:
                base = state.negated_keys[j]
                if base is None:  # sparse topology can put -1 above the diagonal
                    base = backend.g1.neg(state.public_keys[j], counter)
                    state.negated_keys[j] = base
            else:
                base = backend.g1.exp(state.public_keys[j], c, counter)
            term = backend.pair(base, q_k, counter)
            w = term if w is None else gt.mul(w, term, counter)
        value = gt.exp(gt.generator, message, counter)
        if w is not None:
            value = gt.mul(gt.exp(w, state.secret, counter), value, counter)
    else:
        group: Group = params.backend
        value = group.exp(group.generator, message, counter)
        for j, c in row.entries:
            term = group.exp(state.public_keys[j], c * state.secret % p, counter)
            value = group.mul(value, term, counter)

    state.next_round = round_k + 1
    return Contribution(
        variant=params.variant, round=round_k, party=state.index, value=value
    )


def aggregate(params: ProtocolParams, contributions, *, dlog_seed: int = 0,
              counter: OpCounter | None = None) -> AggregateResult:
    """Multiply the round's contributions and recover the sum by dlog.

    Anyone holding the transcript can run this; it validates completeness
    (exactly one contribution per party, single round) instead of trusting
    the broadcast bus.
    """
    contributions = list(contributions)
    if len(contributions) != params.n:
        raise ProtocolError(f"expected {params.n} contributions, got {len(contributions)}")
    rounds = {c.round for c in contributions}
    if len(rounds) != 1:
        raise ProtocolError(f"contributions span rounds {sorted(rounds)}")
    parties = sorted(c.party for c in contributions)
    if parties != list(range(1, params.n + 1)):
        raise ProtocolError(f"missing or duplicate parties: {parties}")
    for c in contributions:
        if c.variant != params.variant:
            raise ProtocolError(f"variant mismatch: {c.variant} != {params.variant}")

    group = params.aggregation_group
    z = contributions[0].value
    for c in contributions[1:]:
        z = group.mul(z, c.value, counter)
    sigma = pollard_lambda(group, z, params.dlog_range(), seed=dlog_seed,
                           counter=counter)
    if sigma is None:
        raise AggregationError(
            f"round {rounds.pop()}: aggregate dlog not found in [0, {params.n * params.beta}]"
        )
    return AggregateResult(round=contributions[0].round, sigma=sigma)
