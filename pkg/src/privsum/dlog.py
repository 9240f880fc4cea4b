"""Bounded discrete-log recovery.

``pollard_lambda`` recovers the aggregate exponent from a known interval in
O(sqrt(width)) group operations and works over any backend through the
generic group API.  ``dlog_oracle`` (baby-step/giant-step with a linear-scan
fallback) is the exact reference the probabilistic algorithm is tested
against; keep the two independent.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from math import isqrt

from .groups import Group, OpCounter

ORACLE_MAX_WIDTH = 1 << 26
LINEAR_SCAN_MAX_WIDTH = 1 << 16
DEFAULT_ATTEMPTS = 8


class RangeTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class DlogRange:
    """Interval [lo, hi] known to contain the exponent (e.g. [0, n*beta])."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo < 0 or self.hi < self.lo:
            raise ValueError(f"bad dlog range [{self.lo}, {self.hi}]")

    @property
    def width(self) -> int:
        return self.hi - self.lo


def _jump_table(group: Group, width: int, seed: int, attempt: int,
                counter: OpCounter | None):
    """Pseudorandom jump distances with mean ~ sqrt(width)/2, plus their
    precomputed group elements."""
    count = (max(width, 1).bit_length() + 1) // 2 + 2
    cap = max(isqrt(width), 1)
    dists = []
    for s in range(count):
        digest = hashlib.shake_256(
            b"privsum/kangaroo-v1"
            + seed.to_bytes(16, "big", signed=False)
            + attempt.to_bytes(4, "big")
            + s.to_bytes(4, "big")
        ).digest(16)
        dists.append(1 + int.from_bytes(digest, "big") % cap)
    elems = [group.exp(group.generator, d, counter) for d in dists]
    return dists, elems


def pollard_lambda(group: Group, target, rng: DlogRange, *, seed: int = 0,
                   counter: OpCounter | None = None,
                   attempts: int = DEFAULT_ATTEMPTS,
                   budget: int | None = None) -> int | None:
    """Pollard's lambda (kangaroo) over [rng.lo, rng.hi].

    Single tame/wild walk with a trap at the tame endpoint; on a miss the
    walk restarts with a fresh jump table.  Returns None once ``attempts``
    restarts have exhausted their op budgets, which signals an exponent
    outside the range (or a corrupted target).
    """
    if rng.width >= group.order:
        raise ValueError("range width must be below the group order")
    width = rng.width
    attempt_budget = budget if budget is not None else 100 * isqrt(width + 1) + 100
    g = group.generator

    for attempt in range(attempts):
        dists, elems = _jump_table(group, width, seed, attempt, counter)
        njumps = len(dists)

        def jump_index(x) -> int:
            # Hash the full encoding: raw low bytes correlate with the jump
            # distances on structured groups (e.g. additive mod p), which
            # locks the walk into short residue cycles.
            digest = hashlib.blake2b(group.encode(x), digest_size=8).digest()
            return int.from_bytes(digest, "big") % njumps

        # tame kangaroo: start at g^hi, walk ~sqrt(width) steps, set the trap
        pos = group.exp(g, rng.hi, counter)
        dist = 0
        for _ in range(isqrt(width) + 1):
            s = jump_index(pos)
            pos = group.mul(pos, elems[s], counter)
            dist += dists[s]
        trap = pos

        # wild kangaroo: start at the target, same walk, until it passes the
        # trap or lands in it
        wpos = target
        wdist = 0
        limit = width + dist
        ops = 0
        while wdist <= limit and ops <= attempt_budget:
            if group.eq(wpos, trap):
                # exponents agree only mod the group order, so reduce the
                # candidate into [lo, hi] (width < order: unique representative)
                cand = rng.lo + (rng.hi + dist - wdist - rng.lo) % group.order
                if cand <= rng.hi and group.eq(
                        group.exp(g, cand, counter), target):
                    return cand
                break
            s = jump_index(wpos)
            wpos = group.mul(wpos, elems[s], counter)
            wdist += dists[s]
            ops += 1
    return None


def dlog_oracle(group: Group, target, rng: DlogRange,
                counter: OpCounter | None = None) -> int | None:
    """Exact bounded dlog: linear scan for small ranges, else BSGS.

    Guard-railed at width 2^26 to keep memory and runtime sane; this is a
    testing oracle, not a production path.
    """
    if rng.width > ORACLE_MAX_WIDTH:
        raise RangeTooLarge(f"oracle width limit is 2^26, got {rng.width}")
    g = group.generator

    if rng.width <= LINEAR_SCAN_MAX_WIDTH:
        cur = group.exp(g, rng.lo, counter)
        for e in range(rng.lo, rng.hi + 1):
            if group.eq(cur, target):
                return e
            cur = group.mul(cur, g, counter)
        return None

    # baby-step/giant-step on target * g^(-lo)
    shifted = group.mul(target, group.exp(g, -rng.lo % group.order, counter), counter)
    m = isqrt(rng.width) + 1
    table = {}
    cur = group.identity
    for j in range(m):
        table.setdefault(group.encode(cur), j)
        cur = group.mul(cur, g, counter)
    giant = group.exp(g, -m % group.order, counter)
    cur = shifted
    for i in range(m + 1):
        j = table.get(group.encode(cur))
        if j is not None and i * m + j <= rng.width:
            return rng.lo + i * m + j
        cur = group.mul(cur, giant, counter)
    return None
