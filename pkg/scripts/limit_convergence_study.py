#!/usr/bin/env python3
"""Convergence of the scaled endpoint marginals toward their limit laws.

For a dense logarithmic grid of step counts, measures the KS distance of
y/sqrt(N) to a standard normal sample and of x/N^(1/4) to the
sqrt(A|Z2|)Z1 limit sampler, and writes one CSV row per grid point.
Useful for plotting convergence rates; the gated two-point check lives in
the `limits` subcommand.

Usage:
    python scripts/limit_convergence_study.py [--paths 3000] [--out limits.csv]
"""

import argparse
import math

import numpy as np

from combwalk import validate_config
from combwalk.lattice import direct_endpoints
from combwalk.limit_stats import LimitOracle, ks_two_sample
from combwalk.rng import SeedSpec


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--paths", type=int, default=3000)
    parser.add_argument("--oracle-count", type=int, default=200_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--decades", default="3,6")
    parser.add_argument("--points", type=int, default=7)
    parser.add_argument("--out", default="limits.csv")
    args = parser.parse_args()

    lo, hi = (int(tok) for tok in args.decades.split(","))
    grid = sorted({int(round(10**e)) for e in np.linspace(lo, hi, args.points)})
    config = validate_config([(0, 0.25)])
    oracle = LimitOracle.for_config(config)
    seed = SeedSpec(args.seed)
    ref_v = oracle.vertical(args.oracle_count, seed)
    ref_h = oracle.horizontal(args.oracle_count, seed)

    rows = ["n,ks_vertical,ks_horizontal"]
    print(f"{'n':>9} {'ks_v':>8} {'ks_h':>8}")
    for i, n in enumerate(grid):
        xy = direct_endpoints(config, n, seed.offset(i * args.paths), args.paths)
        ks_v = ks_two_sample(xy[:, 1] / math.sqrt(n), ref_v)
        ks_h = ks_two_sample(xy[:, 0] / n**0.25, ref_h)
        print(f"{n:>9} {ks_v:8.4f} {ks_h:8.4f}")
        rows.append(f"{n},{ks_v:.17g},{ks_h:.17g}")

    with open(args.out, "w") as fh:
        fh.write("\n".join(rows) + "\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
