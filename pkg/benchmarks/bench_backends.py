#!/usr/bin/env python3
"""Compare the compiled AM kernel against the NumPy fallback.

Times the three workloads where the sweep loop dominates: the brute-force
oracle's many tiny runs, a mid-size refinement, and a deflation-style pass.
Writes one CSV row per (workload, backend) and prints the speedups.

Usage: python benchmarks/bench_backends.py [--out backends.csv] [--repeats 3]
"""

import argparse
import csv
import sys
import time

import numpy as np

from sparse_rank1 import SparsityBudget, random_feasible
from sparse_rank1._backend import available_backends


def workload_oracle_style(am_loop):
    # 500 AM runs on 2x2x2 subtensors, the oracle's inner shape
    rng = np.random.default_rng(1)
    shape, r = (2, 2, 2), (2, 2, 2)
    flat = rng.standard_normal(8)
    inits = [list(random_feasible(shape, SparsityBudget(r), s)) for s in range(20)]
    for i in range(500):
        am_loop(flat, shape, r, inits[i % 20], 1e-5, 2000)


def workload_refine(am_loop):
    # one long refinement on a 30^3 tensor
    rng = np.random.default_rng(2)
    shape, r = (30, 30, 30), (9, 9, 9)
    flat = rng.standard_normal(27000)
    init = list(random_feasible(shape, SparsityBudget(r), 0))
    am_loop(flat, shape, r, init, 1e-7, 500)


def workload_deflation_style(am_loop):
    # 60 medium runs on the clustering pipeline's stacked shape
    rng = np.random.default_rng(3)
    shape, r = (20, 20, 20), (7, 7, 20)
    inits = [list(random_feasible(shape, SparsityBudget(r), s)) for s in range(6)]
    for i in range(60):
        flat = rng.standard_normal(8000)
        am_loop(flat, shape, r, inits[i % 6], 1e-5, 200)


WORKLOADS = {
    "oracle-style": workload_oracle_style,
    "refine-30cubed": workload_refine,
    "deflation-style": workload_deflation_style,
}


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=None, help="optional CSV output path")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args(argv)

    backends = available_backends()
    if "c" not in backends:
        print("warning: compiled kernel not built; timing fallback only",
              file=sys.stderr)

    rows = []
    for name, fn in WORKLOADS.items():
        times = {}
        for backend, am_loop in backends.items():
            fn(am_loop)  # warm-up
            best = min(
                _timed(fn, am_loop) for _ in range(args.repeats)
            )
            times[backend] = best
            rows.append({"workload": name, "backend": backend, "seconds": best})
        line = f"{name:18s} " + "  ".join(
            f"{b}={t:.4f}s" for b, t in sorted(times.items())
        )
        if "c" in times and "python" in times:
            line += f"  speedup={times['python'] / times['c']:.1f}x"
        print(line)

    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write("# kind=backend-bench version=1\n")
            writer = csv.DictWriter(fh, fieldnames=["workload", "backend", "seconds"])
            writer.writeheader()
            writer.writerows(rows)
        print(f"wrote {args.out}")
    return 0


def _timed(fn, am_loop):
    start = time.perf_counter()
    fn(am_loop)
    return time.perf_counter() - start


if __name__ == "__main__":
    sys.exit(main())
