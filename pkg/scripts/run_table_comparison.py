#!/usr/bin/env python3
"""Per-round cost comparison of the pairing and matrix protocols.

Times one party's round computation on the production curve across a
range of party counts and writes the raw records to CSV plus a summary
table (mean/stddev ms, mean op counts) to stdout.

Usage:
    python scripts/run_table_comparison.py [--n 10,50,100] [--reps 30]
        [--out results/table_comparison.csv]
"""

import argparse
import json
from pathlib import Path

from privsum.harness import bench_round, summarize, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", default="10,50,100",
                    help="comma-separated party counts")
    ap.add_argument("--reps", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path,
                    default=Path("results/table_comparison.csv"))
    args = ap.parse_args()
    n_values = [int(v) for v in args.n.split(",")]

    records = []
    for protocol in ("kdkm", "pcl"):
        print(f"timing {protocol} rounds at n = {n_values} ...", flush=True)
        records += bench_round(protocol, n_values, args.reps, seed=args.seed)

    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(records, args.out)
    summary = summarize(records)
    print(json.dumps(summary, indent=2))

    print(f"\n{'n':>6}  {'kdkm ms':>12}  {'pcl ms':>12}  {'ratio':>7}")
    for n in n_values:
        km = summary[f"round-kdkm/{n}"]["mean_ms"]
        pc = summary[f"round-pcl/{n}"]["mean_ms"]
        print(f"{n:>6}  {km:>12.2f}  {pc:>12.2f}  {km / pc:>6.1f}x")
    print(f"\nraw records: {args.out}")


if __name__ == "__main__":
    main()
