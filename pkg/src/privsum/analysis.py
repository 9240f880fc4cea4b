"""Closed-form bounds, linear-algebra leakage checks, and the partition attack.

Three independent views of the same security question:

* counting bounds (how many rounds / holes the parameters allow),
* the rank of the coalition-visible coefficient matrix (does the system of
  round equations pin down honest cross-terms),
* a concrete partition attack that actually recovers per-component partial
  sums from a transcript when the honest masking graph is disconnected.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations
from math import isqrt

import networkx as nx
import numpy as np

from .dlog import DlogRange, pollard_lambda
from .matrixgen import assemble_matrix
from .protocol import ProtocolParams

EXHAUSTIVE_CUT_MAX_N = 12


# ---------------------------------------------------------------------------
# counting bounds


@dataclass(frozen=True)
class RoundBoundsReport:
    """Multi-round matrix scheme: what the tolerance budget buys."""

    n: int
    tolerance: int
    max_rounds: int
    rounds: int | None = None
    feasible: bool | None = None
    min_nonholes_per_row: int | None = None
    exps_per_round: int | None = None

    def to_json(self) -> str:
        return json.dumps({k: v for k, v in self.__dict__.items() if v is not None},
                          sort_keys=True)


@dataclass(frozen=True)
class HoleBoundsReport:
    """Single-round sign-matrix scheme with holes.

    ``max_alpha_literal`` keeps the uncorrected form floor(tau*n - n - ...)
    for transparency; it is negative for every valid parameter choice, and
    ``max_alpha`` is the sign-corrected floor((1-tau)*n - (1+sqrt(8n-7))/2).
    """

    n: int
    tau: float
    nonholes_extra: int
    max_alpha: int
    max_alpha_literal: int
    load_fraction: float
    load_fraction_smooth: float
    holes_possible: bool

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)


def round_bounds(n: int, tolerance: int, rounds: int | None = None) -> RoundBoundsReport:
    """Maximum secure round count floor((n - t) / 2), plus per-round row
    requirements (2*rounds + t non-holes, hence 2*rounds + t + 1 exps)."""
    if n < 2:
        raise ValueError("need at least two parties")
    if not 0 <= tolerance < n:
        raise ValueError("tolerance must satisfy 0 <= t < n")
    max_rounds = (n - tolerance) // 2
    if rounds is None:
        return RoundBoundsReport(n=n, tolerance=tolerance, max_rounds=max_rounds)
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    # A full row (n - 1 non-holes) is always sufficient, so the sparse-row
    # requirement 2*rounds + t is capped there; the cap only binds at the
    # round bound itself when n - t is even.
    nonholes = min(2 * rounds + tolerance, n - 1)
    return RoundBoundsReport(
        n=n,
        tolerance=tolerance,
        max_rounds=max_rounds,
        rounds=rounds,
        feasible=rounds <= max_rounds,
        min_nonholes_per_row=nonholes,
        exps_per_round=nonholes + 1,
    )


def _ceil_half_one_plus_sqrt(x: int) -> int:
    """ceil((1 + sqrt(x)) / 2) with exact integer arithmetic."""
    s = isqrt(x)
    if s * s == x:
        return (s + 2) // 2
    # sqrt(x) lies strictly between s and s + 1
    return (s + 1) // 2 + 1


def hole_bounds(n: int, tau: float) -> HoleBoundsReport:
    """Hole budget for the single-round sign-matrix scheme.

    Each party must keep at least ceil((1 + sqrt(8n - 7)) / 2) non-hole
    positions beyond the tau*n tolerated dropouts, so the per-party load
    fraction is tau + extra / n and the hole budget is
    floor((1 - tau)*n - (1 + sqrt(8n - 7)) / 2).
    """
    if n < 2:
        raise ValueError("need at least two parties")
    if not 0.0 <= tau < 1.0:
        raise ValueError("tau must lie in [0, 1)")
    extra = _ceil_half_one_plus_sqrt(8 * n - 7)
    half_sqrt = (1 + math.sqrt(8 * n - 7)) / 2
    max_alpha = math.floor((1 - tau) * n - half_sqrt)
    max_alpha_literal = math.floor((tau - 1) * n - half_sqrt)
    # load_fraction uses the integer non-hole count a real deployment would
    # carry, so it jitters by up to 1/n around the smooth bound; the smooth
    # form is the one that is strictly decreasing and converges to tau.
    # Both are clamped at 1: the scheme never does more work than its
    # hole-free original.
    return HoleBoundsReport(
        n=n,
        tau=tau,
        nonholes_extra=extra,
        max_alpha=max_alpha,
        max_alpha_literal=max_alpha_literal,
        load_fraction=min(1.0, tau + extra / n),
        load_fraction_smooth=min(1.0, tau + half_sqrt / n),
        holes_possible=max_alpha > 0,
    )


# ---------------------------------------------------------------------------
# masking-graph connectivity


def _components(pattern: np.ndarray, vertices) -> list:
    """Connected components of the induced subgraph, as sorted 1-based lists."""
    vertices = set(vertices)
    seen, comps = set(), []
    for start in sorted(vertices):
        if start in seen:
            continue
        comp, stack = [], [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in vertices:
                if u not in seen and pattern[v - 1, u - 1]:
                    seen.add(u)
                    stack.append(u)
        comps.append(sorted(comp))
    return comps


def _check_pattern(pattern: np.ndarray) -> np.ndarray:
    pattern = np.asarray(pattern, dtype=bool)
    if pattern.ndim != 2 or pattern.shape[0] != pattern.shape[1]:
        raise ValueError("pattern must be a square matrix")
    if not np.array_equal(pattern, pattern.T) or pattern.diagonal().any():
        raise ValueError("pattern must be symmetric with an empty diagonal")
    return pattern


def vertex_connectivity(pattern: np.ndarray) -> int:
    """Minimum vertex cut of the masking graph (max-flow based)."""
    pattern = _check_pattern(pattern)
    n = pattern.shape[0]
    if n == 1:
        return 0
    graph = nx.from_numpy_array(pattern.astype(np.uint8))
    if not nx.is_connected(graph):
        return 0
    return nx.node_connectivity(graph)


def vertex_connectivity_exhaustive(pattern: np.ndarray) -> int:
    """Reference oracle: try every vertex subset as a cut, smallest first.

    Exponential, guard-railed at n = 12; exists purely to cross-check the
    max-flow implementation on small graphs.
    """
    pattern = _check_pattern(pattern)
    n = pattern.shape[0]
    if n > EXHAUSTIVE_CUT_MAX_N:
        raise ValueError(f"exhaustive cut search capped at n = {EXHAUSTIVE_CUT_MAX_N}")
    if n == 1:
        return 0
    vertices = list(range(1, n + 1))
    for size in range(n - 1):
        for cut in combinations(vertices, size):
            rest = [v for v in vertices if v not in cut]
            if len(rest) >= 2 and len(_components(pattern, rest)) > 1:
                return size
    return n - 1  # complete graph: no cut disconnects it


# ---------------------------------------------------------------------------
# coefficient-matrix rank


def rank_mod_p(rows, p: int) -> int:
    """Rank over Z_p by Gaussian elimination (rows are equal-length lists)."""
    rows = [[x % p for x in row] for row in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], p - 2, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col]
                rows[r] = [(a - f * b) % p for a, b in zip(rows[r], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


@dataclass(frozen=True)
class RankReport:
    n: int
    rounds: int
    coalition: tuple
    rows: int
    columns: int
    rank: int

    @property
    def deficiency(self) -> int:
        """Equations that added no rank (0 means every row is independent)."""
        return self.rows - self.rank

    @property
    def full_rank(self) -> bool:
        return self.deficiency == 0

    def to_json(self) -> str:
        obj = dict(self.__dict__, coalition=list(self.coalition),
                   deficiency=self.deficiency, full_rank=self.full_rank)
        return json.dumps(obj, sort_keys=True)


def coefficient_rank(matrices, p: int, coalition=()) -> RankReport:
    """Rank of the stacked per-round equation system visible to a coalition.

    Row i of round k contributes the linear equation
    ``sum_j A^(k)_ij * (x_i x_j) = known exponent``; the unknowns are the
    cross-terms x_i x_j the coalition cannot compute itself, i.e. every
    unordered pair except those with both endpoints inside the coalition.
    Per round the n equations sum to zero (skew-symmetry), so only the
    first n - 1 rows of each round are stacked.  Full rank rounds*(n-1)
    means every round adds independent masking; a deficient system is the
    algebraic signature of leaked partial information.
    """
    matrices = [np.asarray(m, dtype=object) for m in matrices]
    if not matrices:
        raise ValueError("need at least one round matrix")
    n = matrices[0].shape[0]
    coalition = tuple(sorted(set(coalition)))
    for m in matrices:
        if m.shape != (n, n):
            raise ValueError("all round matrices must be n x n")
    if any(not 1 <= c <= n for c in coalition):
        raise ValueError("coalition indices must lie in 1..n")

    bad = set(coalition)
    columns = [
        (a, b)
        for a in range(1, n + 1)
        for b in range(a + 1, n + 1)
        if not (a in bad and b in bad)
    ]
    col_index = {pair: t for t, pair in enumerate(columns)}
    rows = []
    for mat in matrices:
        for i in range(1, n):
            row = [0] * len(columns)
            for j in range(1, n + 1):
                c = int(mat[i - 1, j - 1]) % p
                if c == 0 or j == i:
                    continue
                t = col_index.get((min(i, j), max(i, j)))
                if t is not None:
                    row[t] = (row[t] + c) % p
            rows.append(row)
    return RankReport(
        n=n,
        rounds=len(matrices),
        coalition=coalition,
        rows=len(rows),
        columns=len(columns),
        rank=rank_mod_p(rows, p),
    )


# ---------------------------------------------------------------------------
# partition attack


@dataclass(frozen=True)
class AttackReport:
    """Outcome of a coalition's attempt to split the honest parties.

    ``recovered`` holds one entry per component (None when the bounded dlog
    failed); ``success`` means the coalition actually learned something,
    i.e. more than one component and every component sum recovered
    (verified against ``true_sums`` when the caller supplies ground truth).
    """

    round: int
    coalition: tuple
    components: tuple
    recovered: tuple
    true_sums: tuple | None
    success: bool

    def to_json(self) -> str:
        return json.dumps(
            {
                "round": self.round,
                "coalition": list(self.coalition),
                "components": [list(c) for c in self.components],
                "recovered": list(self.recovered),
                "true_sums": None if self.true_sums is None else list(self.true_sums),
                "success": self.success,
            },
            sort_keys=True,
        )


def partition_attack(params: ProtocolParams, public_keys, contributions,
                     coalition, coalition_secrets, *, true_messages=None,
                     dlog_seed: int = 0) -> AttackReport:
    """Recover per-component partial sums from one round's broadcast values.

    The coalition removes itself from the masking graph; if the honest
    parties split into several components, the cross-terms between honest
    components cancel within each component, and the coalition can strip
    its own cross-terms (it knows its secrets), leaving
    ``prod_{i in C} v_i = g^(sum of C's messages)`` per component C.

    ``coalition_secrets`` maps coalition index -> secret exponent.
    ``true_messages`` (1-based list/dict of plaintexts, test only) upgrades
    ``success`` from "dlog converged" to "verified correct".
    """
    coalition = tuple(sorted(set(coalition)))
    if set(coalition_secrets) != set(coalition):
        raise ValueError("need exactly the coalition members' secrets")
    contributions = {c.party: c for c in contributions}
    rounds = {c.round for c in contributions.values()}
    if len(rounds) != 1:
        raise ValueError("contributions must come from a single round")
    round_k = rounds.pop()
    n, p = params.n, params.order

    from .matrixgen import derive_seed

    seed = derive_seed(params.key_group, public_keys)
    matrix = np.asarray(assemble_matrix(params.topology, seed, round_k, p), dtype=object)
    pattern = matrix != 0

    honest = [i for i in range(1, n + 1) if i not in coalition]
    comps = _components(pattern, honest)
    if len(comps) <= 1:
        return AttackReport(round=round_k, coalition=coalition,
                            components=tuple(tuple(c) for c in comps),
                            recovered=(), true_sums=None, success=False)

    group = params.aggregation_group
    if params.variant == "kdkm":
        q_k = params.backend.hash_to_g2(round_k)
        bases = {i: params.backend.pair(public_keys[i - 1], q_k) for i in honest}
    else:
        bases = {i: public_keys[i - 1] for i in honest}

    recovered = []
    for comp in comps:
        z = group.identity
        for i in comp:
            z = group.mul(z, contributions[i].value)
        # strip g^(A_ij * x_i * x_j) for coalition neighbors j of each i in C
        for i in comp:
            strip = 0
            for j in coalition:
                a_ij = int(matrix[i - 1, j - 1]) % p
                if a_ij:
                    strip = (strip + a_ij * coalition_secrets[j]) % p
            if strip:
                z = group.mul(z, group.exp(bases[i], -strip % p, None))
        recovered.append(
            pollard_lambda(group, z, DlogRange(0, len(comp) * params.beta),
                           seed=dlog_seed)
        )

    success = len(comps) > 1 and all(r is not None for r in recovered)
    true_sums = None
    if true_messages is not None:
        get = true_messages.get if isinstance(true_messages, dict) \
            else lambda i: true_messages[i - 1]
        true_sums = tuple(sum(get(i) for i in comp) for comp in comps)
        success = success and tuple(recovered) == true_sums
    return AttackReport(
        round=round_k,
        coalition=coalition,
        components=tuple(tuple(c) for c in comps),
        recovered=tuple(recovered),
        true_sums=true_sums,
        success=success,
    )
