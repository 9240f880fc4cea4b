"""End-to-end simulation over an in-process broadcast bus, plus benchmarks.

``run_simulation`` drives full protocol executions (setup, rounds,
aggregation) from a :class:`SimulationConfig`, checks every recovered sum
against the plaintexts, and emits a JSON report plus a JSON-lines
transcript.  Everything is deterministic in the config seed, so identical
configs give byte-identical artifacts.

``bench_round`` and ``bench_dlog`` time single-party round computation and
bounded dlog recovery on the production backends; records carry both wall
time and exact operation counts so mean/stddev and scaling ratios are
recomputable from the raw CSV.
"""

from __future__ import annotations

import csv
import json
import random
import statistics
import time
from dataclasses import asdict, dataclass
from functools import lru_cache

from .dlog import DlogRange, pollard_lambda
from .groups import MockPairing, OpCounter, find_test_subgroup, instantiate_backend
from .matrixgen import TopologyPlan
from .protocol import (
    Contribution,
    ProtocolParams,
    aggregate,
    compute_contribution,
    finalize_setup,
    setup_party,
)

# Order of the insecure backends used by the harness.  Large enough that
# n * beta stays far below the order for every supported config, small
# enough that nothing about it is accidentally secure.
INSECURE_ORDER = (1 << 31) - 1

BACKEND_CHOICES = ("prod", "test", "mock")
CSV_COLUMNS = ("experiment", "n_or_bits", "trial", "ms", "exps", "muls", "pairings")
DEFAULT_WARMUP = 3


class SimulationMismatch(RuntimeError):
    """A recovered round sum deviated from the plaintext truth."""


@dataclass(frozen=True)
class SimulationConfig:
    """Everything a simulation run depends on; serializes to/from JSON."""

    protocol: str
    backend: str
    n: int
    beta: int
    rounds: int = 1
    tolerance: int = 0
    topology: str = "full"  # full | holes:<alpha> | nn:<degree>
    seed: int = 0
    trials: int = 1

    def __post_init__(self):
        if self.backend not in BACKEND_CHOICES:
            raise ValueError(f"backend must be one of {BACKEND_CHOICES}")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        self.topology_plan()  # fail fast on a bad topology string

    def topology_plan(self) -> TopologyPlan:
        spec = self.topology
        if spec == "full":
            strategy = "kdk-sign" if self.protocol in ("kdk1", "kdkm") else "full"
            return TopologyPlan(n=self.n, strategy=strategy)
        kind, sep, arg = spec.partition(":")
        if kind == "holes" and sep:
            return TopologyPlan(n=self.n, strategy="holes", alpha=int(arg))
        if kind == "nn" and sep:
            return TopologyPlan(n=self.n, strategy="nearest-neighbor", degree=int(arg))
        raise ValueError(f"unknown topology spec {spec!r} (full | holes:A | nn:M)")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "SimulationConfig":
        return cls(**obj)


@lru_cache(maxsize=None)
def _insecure_group():
    return find_test_subgroup(INSECURE_ORDER)


@lru_cache(maxsize=None)
def _insecure_pairing():
    return MockPairing(INSECURE_ORDER, insecure=True)


def resolve_backend(protocol: str, backend: str):
    """Map a backend selector to a concrete group or pairing descriptor.

    The pairing variant has no small-subgroup analogue, so both insecure
    selectors resolve to the additive mock pairing for it.
    """
    if protocol == "kdkm":
        if backend == "prod":
            return instantiate_backend("production-pairing")
        return _insecure_pairing()
    if backend == "prod":
        return instantiate_backend("production-curve")
    if backend == "test":
        return _insecure_group()
    return _insecure_pairing().g1


def build_params(config: SimulationConfig) -> ProtocolParams:
    return ProtocolParams(
        variant=config.protocol,
        backend=resolve_backend(config.protocol, config.backend),
        n=config.n,
        beta=config.beta,
        max_rounds=config.rounds,
        tolerance=config.tolerance,
        topology=config.topology_plan(),
    )


@dataclass
class RoundRun:
    round: int
    messages: list
    contributions: list
    sigma: int

    @property
    def true_sum(self) -> int:
        return sum(self.messages)

    @property
    def match(self) -> bool:
        return self.sigma == self.true_sum


@dataclass
class TrialRun:
    trial: int
    states: list
    public_keys: list
    rounds: list  # of RoundRun


def _trial_rng(config: SimulationConfig, trial: int) -> random.Random:
    return random.Random(f"privsum/sim/{config.seed}/{trial}")


def _dlog_seed(config: SimulationConfig, trial: int, round_k: int) -> int:
    return (config.seed * 1_000_003 + trial) * 1_000_003 + round_k


def run_trial(params: ProtocolParams, config: SimulationConfig, trial: int) -> TrialRun:
    rng = _trial_rng(config, trial)
    states, pubs = [], []
    for i in range(1, params.n + 1):
        state, pub = setup_party(params, i, rng)
        states.append(state)
        pubs.append(pub)
    for state in states:
        finalize_setup(state, pubs)
    rounds = []
    for k in range(1, config.rounds + 1):
        messages = [rng.randint(0, params.beta) for _ in states]
        contribs = [
            compute_contribution(state, k, m) for state, m in zip(states, messages)
        ]
        result = aggregate(params, contribs, dlog_seed=_dlog_seed(config, trial, k))
        rounds.append(RoundRun(round=k, messages=messages,
                               contributions=contribs, sigma=result.sigma))
    return TrialRun(trial=trial, states=states, public_keys=pubs, rounds=rounds)


def transcript_lines(params: ProtocolParams, trials) -> list:
    """JSON-lines broadcast transcript: setup keys, then round payloads,
    ordered by (trial, round, party)."""
    lines = []
    key_group = params.key_group
    for run in trials:
        for i, pub in enumerate(run.public_keys, start=1):
            lines.append(json.dumps(
                {"phase": "setup", "round": 0, "party": i,
                 "payload": key_group.encode(pub).hex(), "trial": run.trial},
                sort_keys=True))
        for rr in run.rounds:
            for c in rr.contributions:
                lines.append(json.dumps(
                    {"phase": "round", "round": c.round, "party": c.party,
                     "payload": c.payload_hex(params), "trial": run.trial},
                    sort_keys=True))
    return lines


@dataclass
class SimulationResult:
    config: SimulationConfig
    params: ProtocolParams
    trials: list  # of TrialRun

    @property
    def all_match(self) -> bool:
        return all(rr.match for run in self.trials for rr in run.rounds)

    def report(self) -> dict:
        per_party = [OpCounter() for _ in range(self.config.n)]
        for run in self.trials:
            for state, bucket in zip(run.states, per_party):
                bucket.add(state.counter)
        total = OpCounter()
        for bucket in per_party:
            total.add(bucket)
        return {
            "config": self.config.to_dict(),
            "results": [
                {"trial": run.trial, "round": rr.round, "sigma": rr.sigma,
                 "true_sum": rr.true_sum, "match": rr.match}
                for run in self.trials for rr in run.rounds
            ],
            "op_counts": {
                "per_party": [c.as_dict() for c in per_party],
                "total": total.as_dict(),
            },
            "all_match": self.all_match,
        }

    def report_json(self) -> str:
        return json.dumps(self.report(), sort_keys=True, indent=2) + "\n"

    def transcript_text(self) -> str:
        return "\n".join(transcript_lines(self.params, self.trials)) + "\n"


def run_simulation(config: SimulationConfig, *, check: bool = True) -> SimulationResult:
    """Run every trial and round of the config; raise on any sum mismatch."""
    params = build_params(config)
    trials = [run_trial(params, config, t) for t in range(config.trials)]
    result = SimulationResult(config=config, params=params, trials=trials)
    if check:
        for run in trials:
            for rr in run.rounds:
                if not rr.match:
                    raise SimulationMismatch(
                        f"trial {run.trial} round {rr.round}: recovered "
                        f"{rr.sigma}, plaintext sum {rr.true_sum}"
                    )
    return result


def replay_transcript(config: SimulationConfig, transcript_text: str, report: dict) -> bool:
    """Re-aggregate saved broadcast payloads and compare sigmas to the report."""
    params = build_params(config)
    group = params.aggregation_group
    by_key: dict = {}
    for line in transcript_text.splitlines():
        rec = json.loads(line)
        if rec["phase"] != "round":
            continue
        by_key.setdefault((rec["trial"], rec["round"]), []).append(
            Contribution(variant=params.variant, round=rec["round"],
                         party=rec["party"],
                         value=group.decode(bytes.fromhex(rec["payload"])))
        )
    expected = {(r["trial"], r["round"]): r["sigma"] for r in report["results"]}
    if set(by_key) != set(expected):
        return False
    for (trial, round_k), contribs in by_key.items():
        result = aggregate(params, contribs,
                           dlog_seed=_dlog_seed(config, trial, round_k))
        if result.sigma != expected[(trial, round_k)]:
            return False
    return True


# ---------------------------------------------------------------------------
# benchmarks


@dataclass(frozen=True)
class BenchRecord:
    experiment: str
    n_or_bits: int
    trial: int
    ms: float
    exps: int
    muls: int
    pairings: int
    ok: bool = True  # recovery succeeded (dlog experiments only); not in CSV

    def csv_row(self) -> tuple:
        return (self.experiment, self.n_or_bits, self.trial,
                f"{self.ms:.6f}", self.exps, self.muls, self.pairings)


def write_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow(rec.csv_row())


def summarize(records) -> dict:
    """Per (experiment, n_or_bits): mean/stddev/median ms, mean op counts,
    recovery rate.  Mirrors a mean-with-stddev results table."""
    groups: dict = {}
    for rec in records:
        groups.setdefault((rec.experiment, rec.n_or_bits), []).append(rec)
    out = {}
    for (exp, nb), recs in sorted(groups.items()):
        times = [r.ms for r in recs]
        out[f"{exp}/{nb}"] = {
            "experiment": exp,
            "n_or_bits": nb,
            "reps": len(recs),
            "mean_ms": statistics.fmean(times),
            "stdev_ms": statistics.stdev(times) if len(times) > 1 else 0.0,
            "median_ms": statistics.median(times),
            "mean_exps": statistics.fmean(r.exps for r in recs),
            "mean_muls": statistics.fmean(r.muls for r in recs),
            "mean_pairings": statistics.fmean(r.pairings for r in recs),
            "recovery_rate": statistics.fmean(1.0 if r.ok else 0.0 for r in recs),
        }
    return out


def _require_production(backend: str) -> None:
    if backend != "prod":
        raise ValueError("benchmarks run on the production backends only; "
                         "timings on insecure backends support no claims")


def bench_round(protocol: str, n_values, reps: int, *, backend: str = "prod",
                tolerance: int = 0, topology: str = "full", seed: int = 0,
                warmup: int = DEFAULT_WARMUP) -> list:
    """Time one party's round computation, a fresh random party per rep.

    Setup (key generation and exchange) happens once per n outside the
    timed region; ``warmup`` extra reps are run and discarded first.
    """
    _require_production(backend)
    records = []
    rng = random.Random(f"privsum/bench-round/{seed}")
    for n in n_values:
        config = SimulationConfig(protocol=protocol, backend=backend, n=n,
                                  beta=1000, rounds=1, tolerance=tolerance,
                                  topology=topology, seed=seed)
        params = build_params(config)
        setup_rng = random.Random(f"privsum/bench-setup/{seed}/{n}")
        states, pubs = [], []
        for i in range(1, n + 1):
            state, pub = setup_party(params, i, setup_rng)
            states.append(state)
            pubs.append(pub)
        for state in states:
            finalize_setup(state, pubs)
        for rep in range(-warmup, reps):
            state = states[rng.randrange(n)]
            state.next_round = 1  # benchmark-only reuse of one setup
            state.counter = OpCounter()
            message = rng.randint(0, params.beta)
            start = time.perf_counter()
            compute_contribution(state, 1, message)
            elapsed_ms = (time.perf_counter() - start) * 1000.0
            if rep < 0:
                continue
            c = state.counter
            records.append(BenchRecord(
                experiment=f"round-{protocol}", n_or_bits=n, trial=rep,
                ms=elapsed_ms, exps=c.exponentiations, muls=c.multiplications,
                pairings=c.pairings))
    return records


def bench_dlog(bits_values, reps: int, *, seed: int = 0,
               warmup: int = DEFAULT_WARMUP) -> list:
    """Time bounded dlog recovery in the curve group and the pairing target.

    Per rep: sample m from [2^(b-2), 2^b], recover it from a range of
    [0, 2^b] with Pollard's lambda, record wall time and op counts.  A
    failed recovery is recorded (ok=False), not fatal.
    """
    for b in bits_values:
        if not 2 <= b <= 34:
            raise ValueError("bits must lie in [2, 34]")
    pairing = instantiate_backend("production-pairing")
    series = [("dlog-curve", pairing.g1), ("dlog-gt", pairing.gt)]
    records = []
    for b in bits_values:
        rng = random.Random(f"privsum/bench-dlog/{seed}/{b}")
        drange = DlogRange(0, 1 << b)
        for name, group in series:
            for rep in range(-warmup, reps):
                m = rng.randint(1 << (b - 2), 1 << b)
                target = group.exp(group.generator, m)
                counter = OpCounter()
                start = time.perf_counter()
                got = pollard_lambda(group, target, drange,
                                     seed=seed * 65537 + rep + warmup,
                                     counter=counter)
                elapsed_ms = (time.perf_counter() - start) * 1000.0
                if rep < 0:
                    continue
                records.append(BenchRecord(
                    experiment=name, n_or_bits=b, trial=rep, ms=elapsed_ms,
                    exps=counter.exponentiations, muls=counter.multiplications,
                    pairings=counter.pairings, ok=got == m))
    return records
