#!/usr/bin/env python3
"""Run every gated CLI check at acceptance-grade sizes into a report dir.

Usage:
    python scripts/verify_all.py [--out reports] [--seed 0] [--fast]

`--fast` shrinks the campaigns ~100x for a smoke run.  Exit code is 0 iff
every gated check passed.  Reports land as JSON/CSV files named after
their subcommand.
"""

import argparse
import sys
import time
from pathlib import Path

from combwalk import cli

REPO = Path(__file__).resolve().parents[1]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="reports")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--fast", action="store_true")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    comb = str(REPO / "configs" / "comb.cfg")
    seed = str(args.seed)

    if args.fast:
        compare_paths, couple_grid, couple_paths = "10000", "1000,10000,100000", "10"
        tail_reps = "1000"
        scaling_grid, scaling_paths = "100,1000,10000,100000", "200"
        # all three points sit in the visibly-converging regime so the
        # decreasing check stays meaningful at smoke-run power
        limits_grid, limits_paths = "64,512,8192", "1500"
        lil_nmax = "100000"
        lt_grid, lt_paths = "10000,100000,1000000", "20"
        inv_steps, inv_paths = "100000", "1000"
    else:
        compare_paths, couple_grid, couple_paths = "100000", "10000,100000,1000000", "20"
        tail_reps = "10000"
        scaling_grid, scaling_paths = "1000,10000,100000,1000000", "2000"
        limits_grid, limits_paths = "1000,30000,1000000", "5000"
        lil_nmax = "10000000"
        lt_grid, lt_paths = "10000,100000,1000000", "50"
        inv_steps, inv_paths = "1000000", "5000"

    jobs = [
        ("exact", ["exact", "--config", comb, "--steps", "12",
                   "--out", str(out / "exact.csv")]),
        ("compare", ["compare", "--config", comb, "--steps", "12",
                     "--paths", compare_paths, "--seed", seed,
                     "--out", str(out / "compare.json")]),
        ("couple-check", ["couple-check", "--config", comb,
                          "--n-grid", couple_grid, "--paths-per-n", couple_paths,
                          "--seed", seed, "--out", str(out / "couple_check.json")]),
        ("tail-check", ["tail-check", "--reps", tail_reps, "--seed", seed,
                        "--out", str(out / "tail_check.json")]),
        ("scaling-y", ["scaling", "--config", comb, "--coordinate", "y",
                       "--n-grid", scaling_grid, "--paths-per-n", scaling_paths,
                       "--seed", seed, "--out", str(out / "scaling_y.json")]),
        ("scaling-x", ["scaling", "--config", comb, "--coordinate", "x",
                       "--n-grid", scaling_grid, "--paths-per-n", scaling_paths,
                       "--seed", seed, "--out", str(out / "scaling_x.json")]),
        ("limits", ["limits", "--config", comb, "--n-grid", limits_grid,
                    "--paths", limits_paths, "--seed", "1",
                    "--out", str(out / "limits.json")]),
        ("lil", ["lil", "--config", comb, "--n-max", lil_nmax, "--seed", seed,
                 "--out", str(out / "lil.csv")]),
        ("localtime-check", ["localtime-check", "--n-grid", lt_grid,
                             "--paths", lt_paths, "--exponent", "0.35",
                             "--seed", seed, "--out", str(out / "localtime_check.json")]),
        ("invariance", ["invariance",
                        "--config-a", comb,
                        "--config-b", str(REPO / "configs" / "shifted_comb.cfg"),
                        "--steps", inv_steps, "--paths", inv_paths, "--seed", "1",
                        "--out", str(out / "invariance.json")]),
    ]

    shifted = REPO / "configs" / "shifted_comb.cfg"
    if not shifted.exists():
        shifted.write_text("# comb shifted off the origin\nline m=5 p=0.25\n")

    worst = 0
    for name, argv in jobs:
        t0 = time.time()
        code = cli.run(argv)
        status = {0: "PASS", 2: "FAIL"}.get(code, "ERROR")
        print(f"[{time.time()-t0:7.1f}s] {name:16s} {status} (exit {code})")
        worst = max(worst, code)
    print(f"reports in {out}/")
    return 0 if worst == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
