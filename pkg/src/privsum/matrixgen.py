"""Deterministic derivation of per-round masking matrices.

Every party derives its own row of a skew-symmetric exponent matrix from a
shared seed, so no interaction is needed:

* ``full`` / ``nearest-neighbor`` / ``holes`` strategies give pseudorandom
  coefficients in Z_p (the multi-round matrix scheme),
* ``kdk-sign`` gives the fixed +1/-1 upper/lower-triangle matrix (and the
  fixed matrix stays the same in every round),
* ``explicit`` takes a caller-supplied adjacency pattern (used by the
  partition-attack tests to build deliberately under-connected topologies).

Party and column indices are 1-based everywhere in this module's public
API; boolean adjacency patterns are numpy arrays indexed [i-1, j-1].
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field

import numpy as np

_SEED_BYTES = 32

STRATEGIES = ("full", "kdk-sign", "holes", "nearest-neighbor", "explicit")


class InfeasibleTopology(ValueError):
    """Topology parameters that cannot produce a valid pattern."""


@dataclass(frozen=True)
class TopologyPlan:
    """How each round's exponent matrix (and its sparsity) is derived.

    ``sign_coefficients`` overrides the per-strategy default coefficient
    range: the kdk-sign strategy uses +/-1, everything else pseudorandom
    Z_p coefficients.  ``seekers_only`` switches the hole sampler to draw
    targets only from declared seekers instead of all later parties.
    """

    n: int
    strategy: str = "full"
    alpha: int = 0
    seekers: tuple | None = None
    degree: int = 0
    seekers_only: bool = False
    sign_coefficients: bool | None = None
    pattern: tuple | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.n < 1:
            raise ValueError("need at least one party")
        if self.strategy == "holes":
            if self.seekers is None:
                object.__setattr__(self, "seekers", tuple([True] * self.n))
            if len(self.seekers) != self.n:
                raise ValueError("seekers vector must have length n")
            if not 0 <= self.alpha < self.n - 1:
                raise InfeasibleTopology(f"alpha = {self.alpha} must satisfy 0 <= alpha < n - 1")
        if self.strategy == "nearest-neighbor":
            if self.degree % 2 != 0:
                raise InfeasibleTopology(
                    f"nearest-neighbor degree {self.degree} is odd; round up to "
                    f"{self.degree + 1} to keep the pattern symmetric"
                )
            if not 2 <= self.degree < self.n:
                raise InfeasibleTopology("nearest-neighbor degree must satisfy 2 <= m < n")
        if self.strategy == "explicit":
            if self.pattern is None:
                raise ValueError("explicit strategy requires a pattern")
            arr = np.asarray(self.pattern, dtype=bool)
            if arr.shape != (self.n, self.n):
                raise ValueError("explicit pattern must be n x n")
            if not np.array_equal(arr, arr.T) or arr.diagonal().any():
                raise ValueError("explicit pattern must be symmetric with empty diagonal")

    @property
    def uses_sign_coefficients(self) -> bool:
        if self.sign_coefficients is not None:
            return self.sign_coefficients
        return self.strategy == "kdk-sign"


@dataclass(frozen=True)
class MatrixRow:
    """One party's row of the round matrix; zeros (holes) are omitted."""

    round: int
    party: int
    entries: tuple  # ((j, coefficient), ...) sorted by j, no zeros, no j == party

    def to_json(self) -> str:
        return json.dumps(
            {
                "round": self.round,
                "party": self.party,
                "entries": [[j, str(c)] for j, c in self.entries],
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "MatrixRow":
        obj = json.loads(text)
        return cls(
            round=obj["round"],
            party=obj["party"],
            entries=tuple((int(j), int(c)) for j, c in obj["entries"]),
        )


def _shake(*parts: bytes) -> "hashlib._Hash":
    h = hashlib.shake_256()
    for part in parts:
        h.update(part)
    return h


def _seed_bytes(seed: int) -> bytes:
    return int(seed).to_bytes(_SEED_BYTES, "big")


def derive_seed(group, public_keys) -> int:
    """Shared seed: hash of the concatenated key encodings, reduced mod p.

    Order-sensitive by construction; all parties holding the same ordered
    key list compute the same value.
    """
    if not public_keys:
        raise ValueError("empty public key list")
    h = _shake(b"privsum/seed-v1")
    for key in public_keys:
        h.update(group.encode(key))
    return int.from_bytes(h.digest(_SEED_BYTES + 16), "big") % group.order


def coefficient(seed: int, round_k: int, i: int, j: int, p: int) -> int:
    """Pseudorandom nonzero upper-triangle coefficient A^(k)_{i,j}, i < j.

    A zero hash output is resampled with an appended retry counter so that
    a zero entry always means a hole, never hash luck.
    """
    if not i < j:
        raise ValueError("coefficient is defined for the orientation i < j")
    retry = 0
    prefix = (
        _seed_bytes(seed)
        + round_k.to_bytes(8, "big")
        + i.to_bytes(4, "big")
        + j.to_bytes(4, "big")
    )
    width = (p.bit_length() + 7) // 8 + 16
    while True:
        c = int.from_bytes(
            _shake(b"privsum/chi-v1", prefix, retry.to_bytes(4, "big")).digest(width),
            "big",
        ) % p
        if c != 0:
            return c
        retry += 1


def full_pattern(n: int) -> np.ndarray:
    pat = np.ones((n, n), dtype=bool)
    np.fill_diagonal(pat, False)
    return pat


def nearest_neighbor_pattern(n: int, m: int) -> np.ndarray:
    """Circulant pattern: party i linked to the m circularly nearest parties.

    Circular distance min(|j - i|, n - |j - i|); even m means m/2 neighbors
    on each side, which keeps the pattern symmetric.
    """
    if m % 2 != 0:
        raise InfeasibleTopology(f"degree {m} is odd; round up to {m + 1}")
    if not 2 <= m < n:
        raise InfeasibleTopology("degree must satisfy 2 <= m < n")
    pat = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for d in range(1, m // 2 + 1):
            pat[i, (i + d) % n] = True
            pat[i, (i - d) % n] = True
    return pat


def place_holes(plan: TopologyPlan, seed: int, round_k: int):
    """Hole-placement pass: per-seeker pseudorandom forward hole targets.

    Walks parties in index order keeping a per-party budget W (initially
    alpha); each seeker samples W[i] later parties as hole partners and
    decrements their budgets, so a hole at (i, j) forces the hole at (j, i).
    Returns ``(pattern, shortfall)``; ``shortfall`` flags late seekers that
    ran out of forward positions (the sample is clamped, determinism kept).
    """
    if plan.strategy != "holes":
        raise ValueError("place_holes requires a holes-strategy plan")
    n = plan.n
    pat = full_pattern(n)
    budget = [plan.alpha] * (n + 1)  # 1-based
    shortfall = False
    for i in range(1, n + 1):
        if not plan.seekers[i - 1]:
            continue
        want = max(budget[i], 0)
        if want == 0:
            continue
        candidates = [
            j for j in range(i + 1, n + 1)
            if not plan.seekers_only or plan.seekers[j - 1]
        ]
        if want > len(candidates):
            shortfall = True
            want = len(candidates)
        rng = random.Random(
            int.from_bytes(
                _shake(
                    b"privsum/holes-v1",
                    _seed_bytes(seed),
                    round_k.to_bytes(8, "big"),
                    i.to_bytes(4, "big"),
                ).digest(16),
                "big",
            )
        )
        for j in sorted(rng.sample(candidates, want)):
            pat[i - 1, j - 1] = False
            pat[j - 1, i - 1] = False
            budget[j] -= 1
    return pat, shortfall


def pattern_for(plan: TopologyPlan, seed: int, round_k: int) -> np.ndarray:
    """Adjacency pattern of the round's masking graph (True = non-hole)."""
    if plan.strategy in ("full", "kdk-sign"):
        return full_pattern(plan.n)
    if plan.strategy == "nearest-neighbor":
        return nearest_neighbor_pattern(plan.n, plan.degree)
    if plan.strategy == "holes":
        return place_holes(plan, seed, round_k)[0]
    return np.asarray(plan.pattern, dtype=bool)


def chi_row(plan: TopologyPlan, seed: int, round_k: int, party_i: int, p: int) -> MatrixRow:
    """Row ``party_i`` of the round-``round_k`` skew-symmetric matrix.

    Canonical orientation: the hash is evaluated only for i < j and the
    lower triangle is its negation, so skew-symmetry holds exactly.  Sign
    mode (the fixed KDK matrix) ignores the round number entirely.
    """
    if not 1 <= party_i <= plan.n:
        raise ValueError(f"party index {party_i} out of range 1..{plan.n}")
    if round_k < 1:
        raise ValueError("round must be >= 1")
    sign_mode = plan.uses_sign_coefficients
    pattern_round = 0 if sign_mode else round_k
    pat = pattern_for(plan, seed, pattern_round)
    entries = []
    for j in range(1, plan.n + 1):
        if j == party_i or not pat[party_i - 1, j - 1]:
            continue
        if sign_mode:
            c = 1 if j > party_i else p - 1
        elif party_i < j:
            c = coefficient(seed, round_k, party_i, j, p)
        else:
            c = (-coefficient(seed, round_k, j, party_i, p)) % p
        entries.append((j, c))
    return MatrixRow(round=round_k, party=party_i, entries=tuple(entries))


def assemble_matrix(plan: TopologyPlan, seed: int, round_k: int, p: int):
    """Full n x n matrix as nested lists (testing/analysis; parties never
    materialize more than their own row)."""
    n = plan.n
    mat = [[0] * n for _ in range(n)]
    for i in range(1, n + 1):
        for j, c in chi_row(plan, seed, round_k, i, p).entries:
            mat[i - 1][j - 1] = c
    return mat


def pattern_to_json(pattern: np.ndarray) -> str:
    n = pattern.shape[0]
    edges = [
        [i + 1, j + 1]
        for i in range(n)
        for j in range(i + 1, n)
        if pattern[i, j]
    ]
    return json.dumps({"n": n, "edges": edges}, sort_keys=True)


def pattern_from_json(text: str) -> np.ndarray:
    obj = json.loads(text)
    pat = np.zeros((obj["n"], obj["n"]), dtype=bool)
    for i, j in obj["edges"]:
        pat[i - 1, j - 1] = True
        pat[j - 1, i - 1] = True
    return pat
