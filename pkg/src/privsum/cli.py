"""Command-line front end.

Subcommands: ``simulate``, ``bounds``, ``attack``, ``bench round``,
``bench dlog``.  Every flag has a config-file equivalent: pass
``--config file.json`` with keys named after the flags (underscores for
dashes); explicit flags override file values.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analysis import hole_bounds, partition_attack, round_bounds
from .harness import (
    SimulationConfig,
    SimulationMismatch,
    bench_dlog,
    bench_round,
    run_simulation,
    summarize,
    write_csv,
)


def _merge(args: argparse.Namespace, keys, defaults: dict) -> dict:
    """Config-file values fill in flags the user did not pass."""
    from_file = {}
    if getattr(args, "config", None):
        from_file = json.loads(Path(args.config).read_text())
        unknown = set(from_file) - set(keys)
        if unknown:
            raise SystemExit(f"unknown config keys: {sorted(unknown)}")
    merged = dict(defaults)
    merged.update({k: v for k, v in from_file.items() if v is not None})
    merged.update({k: getattr(args, k) for k in keys if getattr(args, k) is not None})
    return merged


def _int_list(text: str) -> list:
    return [int(x) for x in text.split(",") if x]


def _cmd_simulate(args) -> int:
    keys = ("protocol", "backend", "n", "beta", "rounds", "tolerance",
            "topology", "seed", "trials")
    opts = _merge(args, keys, {"backend": "test", "rounds": 1, "tolerance": 0,
                               "topology": "full", "seed": 0, "trials": 1})
    for required in ("protocol", "n", "beta"):
        if opts.get(required) is None:
            raise SystemExit(f"simulate: missing --{required}")
    config = SimulationConfig(**opts)
    try:
        result = run_simulation(config)
    except SimulationMismatch as exc:
        print(f"simulation mismatch: {exc}", file=sys.stderr)
        return 1
    report = result.report_json()
    if args.out:
        out = Path(args.out)
        out.write_text(report)
        transcript = out.with_suffix(".transcript.jsonl")
        transcript.write_text(result.transcript_text())
        print(f"report: {out}\ntranscript: {transcript}")
    else:
        print(report, end="")
    return 0


def _cmd_bounds(args) -> int:
    keys = ("protocol", "n", "t", "tau", "rounds")
    opts = _merge(args, keys, {})
    protocol, n = opts.get("protocol"), opts.get("n")
    if protocol is None or n is None:
        raise SystemExit("bounds: --protocol and --n are required")
    t, tau = opts.get("t"), opts.get("tau")
    if (t is None) == (tau is None):
        raise SystemExit("bounds: pass exactly one of --t / --tau")
    if protocol == "pcl":
        tolerance = t if t is not None else round(tau * n)
        report = round_bounds(n, tolerance, opts.get("rounds"))
    elif protocol == "kdkm":
        report = hole_bounds(n, tau if tau is not None else t / n)
    else:
        raise SystemExit(f"bounds: unknown protocol {protocol!r}")
    print(report.to_json())
    return 0


def _cmd_attack(args) -> int:
    if not args.config:
        raise SystemExit("attack: --config sim.json is required")
    config = SimulationConfig.from_dict(json.loads(Path(args.config).read_text()))
    coalition = _int_list(args.coalition)
    if not coalition:
        raise SystemExit("attack: --coalition must name at least one party")
    result = run_simulation(config)
    run = result.trials[0]
    round_run = run.rounds[-1]
    secrets = {i: run.states[i - 1].secret for i in coalition}
    report = partition_attack(
        result.params, run.public_keys, round_run.contributions,
        coalition, secrets, true_messages=round_run.messages,
    )
    print(report.to_json())
    return 0


def _cmd_bench_round(args) -> int:
    keys = ("protocol", "n", "reps", "tolerance", "topology", "seed", "warmup")
    opts = _merge(args, keys, {"reps": 100, "tolerance": 0, "topology": "full",
                               "seed": 0, "warmup": 3})
    if opts.get("protocol") is None or opts.get("n") is None:
        raise SystemExit("bench round: --protocol and --n are required")
    n_values = opts["n"] if isinstance(opts["n"], list) else _int_list(str(opts["n"]))
    records = bench_round(opts["protocol"], n_values, opts["reps"],
                          tolerance=opts["tolerance"], topology=opts["topology"],
                          seed=opts["seed"], warmup=opts["warmup"])
    return _emit_bench(records, args.out)


def _cmd_bench_dlog(args) -> int:
    keys = ("bits", "reps", "seed", "warmup")
    opts = _merge(args, keys, {"reps": 10, "seed": 0, "warmup": 3})
    if opts.get("bits") is None:
        raise SystemExit("bench dlog: --bits is required")
    bits = opts["bits"] if isinstance(opts["bits"], list) else _int_list(str(opts["bits"]))
    records = bench_dlog(bits, opts["reps"], seed=opts["seed"],
                         warmup=opts["warmup"])
    return _emit_bench(records, args.out)


def _emit_bench(records, out) -> int:
    if out:
        write_csv(records, out)
        print(f"csv: {out}")
    print(json.dumps(summarize(records), sort_keys=True, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="privsum",
        description="Private-summation protocols: simulate, bound, attack, benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run end-to-end protocol simulations")
    sim.add_argument("--protocol", choices=("kdk1", "kdkm", "pcl"))
    sim.add_argument("--backend", choices=("prod", "test", "mock"))
    sim.add_argument("--n", type=int)
    sim.add_argument("--beta", type=int)
    sim.add_argument("--rounds", type=int)
    sim.add_argument("--tolerance", type=int)
    sim.add_argument("--topology", help="full | holes:A | nn:M")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--trials", type=int)
    sim.add_argument("--config", help="JSON file with flag-named keys")
    sim.add_argument("--out", help="report path; transcript goes beside it")
    sim.set_defaults(func=_cmd_simulate)

    bnd = sub.add_parser("bounds", help="closed-form round/hole bounds")
    bnd.add_argument("--protocol", choices=("pcl", "kdkm"))
    bnd.add_argument("--n", type=int)
    bnd.add_argument("--t", type=int)
    bnd.add_argument("--tau", type=float)
    bnd.add_argument("--rounds", type=int)
    bnd.add_argument("--config", help="JSON file with flag-named keys")
    bnd.set_defaults(func=_cmd_bounds)

    atk = sub.add_parser("attack", help="partition attack against a simulated run")
    atk.add_argument("--config", required=True, help="SimulationConfig JSON file")
    atk.add_argument("--coalition", required=True, help="comma-separated party indices")
    atk.set_defaults(func=_cmd_attack)

    bench = sub.add_parser("bench", help="timing benchmarks (production backends)")
    bsub = bench.add_subparsers(dest="bench_command", required=True)

    br = bsub.add_parser("round", help="per-party round computation time")
    br.add_argument("--protocol", choices=("kdk1", "kdkm", "pcl"))
    br.add_argument("--n", type=_int_list, help="comma-separated party counts")
    br.add_argument("--reps", type=int)
    br.add_argument("--tolerance", type=int)
    br.add_argument("--topology")
    br.add_argument("--seed", type=int)
    br.add_argument("--warmup", type=int)
    br.add_argument("--config", help="JSON file with flag-named keys")
    br.add_argument("--out", help="CSV output path")
    br.set_defaults(func=_cmd_bench_round)

    bd = bsub.add_parser("dlog", help="bounded discrete-log recovery time")
    bd.add_argument("--bits", type=_int_list, help="comma-separated range widths")
    bd.add_argument("--reps", type=int)
    bd.add_argument("--seed", type=int)
    bd.add_argument("--warmup", type=int)
    bd.add_argument("--config", help="JSON file with flag-named keys")
    bd.add_argument("--out", help="CSV output path")
    bd.set_defaults(func=_cmd_bench_dlog)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
