#!/usr/bin/env python3
"""Bounded-dlog recovery cost versus range width.

Runs Pollard's lambda in the curve group and the pairing target group
over ranges [0, 2^b] for a sweep of b, writing raw records to CSV and a
median-time table to stdout.  Expected shape: time grows roughly 2^(b/2)
per series, and the target-group series sits well above the curve one.

Usage:
    python scripts/run_dlog_scaling.py [--bits 5,10,15,20,25,30] [--reps 20]
        [--out results/dlog_scaling.csv]
"""

import argparse
import statistics
from pathlib import Path

from privsum.harness import bench_dlog, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bits", default="5,10,15,20,25,30")
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("results/dlog_scaling.csv"))
    args = ap.parse_args()
    bits = [int(v) for v in args.bits.split(",")]

    records = []
    for b in bits:
        print(f"timing recovery over [0, 2^{b}] ...", flush=True)
        records += bench_dlog([b], args.reps, seed=args.seed)

    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(records, args.out)

    print(f"\n{'bits':>5}  {'curve ms (median)':>18}  {'gt ms (median)':>15}")
    for b in bits:
        med = {}
        for series in ("dlog-curve", "dlog-gt"):
            vals = [r.ms for r in records
                    if r.experiment == series and r.n_or_bits == b]
            med[series] = statistics.median(vals)
        print(f"{b:>5}  {med['dlog-curve']:>18.2f}  {med['dlog-gt']:>15.2f}")
    print(f"\nraw records: {args.out}")


if __name__ == "__main__":
    main()
