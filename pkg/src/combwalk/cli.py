"""Command-line front end: campaign execution and machine-readable reports.

Subcommands cover every check in the toolkit.  All randomness derives from
``--seed`` / ``--stream`` through the package's splittable streams, so a
given argv produces byte-identical CSV/JSON payloads on any machine and
with any ``--threads`` setting.  Reports carry no timestamps; pass
``--meta-out`` to write wall-clock metadata to a separate file.

Exit codes: 0 success, 1 input or validation error, 2 a gated check failed.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from . import coupling, geom_bound, limit_stats
from .errors import CombWalkError
from .lattice import KCombConfig, exact_distribution, simulate_direct, validate_config
from .rng import SeedSpec

DEFAULT_SLOPE_BAND = (0.15, 0.35)
SCALING_BANDS = {"y": (0.5, 0.02), "x": (0.25, 0.03)}  # (exponent, tolerance)


class CliInputError(Exception):
    """Bad argv or config file; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); the contract is exit(1)
        raise CliInputError(message)


# ---------------------------------------------------------------------------
# config file grammar: one `line m=<int> p=<decimal>` per lattice line,
# blank lines and `# comment` lines ignored.


def parse_config_text(text: str, origin: str = "<config>") -> KCombConfig:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if tokens[0] != "line":
            raise CliInputError(f"{origin}:{lineno}: expected 'line m=<int> p=<decimal>'")
        fields = {}
        for tok in tokens[1:]:
            if "=" not in tok:
                raise CliInputError(f"{origin}:{lineno}: malformed token {tok!r}")
            key, _, value = tok.partition("=")
            if key in fields:
                raise CliInputError(f"{origin}:{lineno}: duplicate key {key!r}")
            fields[key] = value
        if set(fields) != {"m", "p"}:
            raise CliInputError(f"{origin}:{lineno}: need exactly the keys m and p")
        try:
            m = int(fields["m"])
            p = float(fields["p"])
        except ValueError as exc:
            raise CliInputError(f"{origin}:{lineno}: {exc}") from exc
        pairs.append((m, p))
    try:
        return validate_config(pairs)
    except CombWalkError as exc:
        raise CliInputError(f"{origin}: {exc}") from exc


def format_config_text(config: KCombConfig) -> str:
    lines = [f"line m={ln.m} p={_fmt(ln.p)}" for ln in config.lines]
    return "\n".join(lines) + "\n"


def load_config(path: str) -> KCombConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliInputError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, origin=path)


# ---------------------------------------------------------------------------
# report plumbing


def _fmt(value: float) -> str:
    """Decimal form with 17 significant digits (round-trip safe)."""
    return format(float(value), ".17g")


def _config_payload(config: KCombConfig) -> dict:
    return {
        "k": config.k,
        "lines": [
            {"m": ln.m, "p": float(ln.p), "alpha": float(ln.alpha)}
            for ln in config.lines
        ],
    }


def _seed_payload(seed: SeedSpec) -> dict:
    return {"master_seed": seed.master_seed, "stream_index": seed.stream_index}


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _emit_json(args, payload: dict) -> None:
    payload = dict(payload)
    payload["version"] = __version__
    text = json.dumps(_jsonify(payload), sort_keys=True, indent=2) + "\n"
    _write_text(args.out, text)


def _csv_lines(meta: dict, header: str, rows) -> str:
    out = [f"# {key}: {value}" for key, value in sorted(meta.items())]
    out.append(header)
    out.extend(rows)
    return "\n".join(out) + "\n"


def _meta_sidecar(args, started: float) -> None:
    if getattr(args, "meta_out", None):
        meta = {
            "argv_command": args.command,
            "runtime_seconds": time.time() - started,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        }
        Path(args.meta_out).write_text(
            json.dumps(meta, sort_keys=True, indent=2) + "\n"
        )


def _set_threads(args) -> int:
    import numba

    available = numba.config.NUMBA_NUM_THREADS
    requested = getattr(args, "threads", None)
    threads = available if requested is None else max(1, min(int(requested), available))
    numba.set_num_threads(threads)
    return threads


def _parse_grid(text: str) -> list[int]:
    try:
        grid = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise CliInputError(f"malformed integer grid {text!r}") from exc
    if not grid:
        raise CliInputError("grid is empty")
    return grid


def _parse_float_grid(text: str) -> list[float]:
    try:
        grid = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise CliInputError(f"malformed float grid {text!r}") from exc
    if not grid:
        raise CliInputError("grid is empty")
    return grid


# ---------------------------------------------------------------------------
# subcommands


def _cmd_simulate(args) -> int:
    config = load_config(args.config)
    seed = SeedSpec(args.seed, args.stream)
    meta = {
        "command": "simulate",
        "config": format_config_text(config).strip().replace("\n", "; "),
        "paths": args.paths,
        "record": args.record,
        "sampler": args.sampler,
        "seed": args.seed,
        "steps": args.steps,
        "stream": args.stream,
        "version": __version__,
    }
    rows = []
    if args.record == "endpoint":
        if args.sampler == "direct":
            from .lattice import direct_endpoints

            xy = direct_endpoints(config, args.steps, seed, args.paths)
        else:
            xy = coupling.coupled_endpoints(config, args.steps, seed, args.paths).endpoints
        rows = [f"{i},{int(x)},{int(y)}" for i, (x, y) in enumerate(xy)]
        text = _csv_lines(meta, "path_index,x,y", rows)
    else:
        for i in range(args.paths):
            path_seed = seed.offset(i)
            if args.sampler == "direct":
                traj = simulate_direct(config, args.steps, path_seed, "full")
            else:
                traj, _ = coupling.simulate_coupled(config, args.steps, path_seed, "full")
            for step, (x, y) in zip(traj.steps, traj.positions):
                rows.append(f"{i},{int(step)},{int(x)},{int(y)}")
        text = _csv_lines(meta, "path_index,step,x,y", rows)
    _write_text(args.out, text)
    return 0


def _cmd_exact(args) -> int:
    config = load_config(args.config)
    table = exact_distribution(config, args.steps)
    meta = {
        "command": "exact",
        "config": format_config_text(config).strip().replace("\n", "; "),
        "steps": args.steps,
        "version": __version__,
    }
    rows = [
        f"{pos.x},{pos.y},{_fmt(prob)}"
        for pos, prob in sorted(table.entries.items())
    ]
    _write_text(args.out, _csv_lines(meta, "x,y,probability", rows))
    return 0


def _cmd_compare(args) -> int:
    config = load_config(args.config)
    seed = SeedSpec(args.seed, args.stream)
    _set_threads(args)
    result = limit_stats.compare_samplers_to_exact(
        config, args.steps, seed, args.paths, quantile=args.quantile
    )
    payload = {
        "command": "compare",
        "config": _config_payload(config),
        "seed": _seed_payload(seed),
        "parameters": {"steps": args.steps, "paths": args.paths, "quantile": args.quantile},
        "reference": {
            "distribution": "chi-square",
            "quantile": args.quantile,
            "null": "samplers agree in law with the exact table",
        },
        "check": {
            "chi2_direct": result.chi2_direct,
            "chi2_coupled": result.chi2_coupled,
            "dof": result.dof,
            "threshold": result.threshold,
        },
        "pass": result.passed,
    }
    _emit_json(args, payload)
    return 0 if result.passed else 2


def _cmd_couple_check(args) -> int:
    config = load_config(args.config)
    seed = SeedSpec(args.seed, args.stream)
    _set_threads(args)
    grid = _parse_grid(args.n_grid)
    report = coupling.coupling_error_growth(config, grid, args.paths_per_n, seed)
    lo, hi = DEFAULT_SLOPE_BAND
    passed = lo <= report.slope <= hi
    payload = {
        "command": "couple-check",
        "config": _config_payload(config),
        "seed": _seed_payload(seed),
        "parameters": {"n_grid": grid, "paths_per_n": args.paths_per_n},
        "reference": {
            "nominal_exponent": 0.25,
            "slope_band": [lo, hi],
            "statistic": "max over steps of |horizontal count - expected horizontal|",
        },
        "check": {
            "mean_max_error": list(report.mean_max_error),
            "slope": report.slope,
            "slope_stderr": report.slope_stderr,
            "mean_horizontal": list(report.mean_horizontal),
            "horizontal_slope": report.horizontal_slope,
            "mean_occupation_error": (
                list(report.mean_occupation_error)
                if report.mean_occupation_error is not None
                else None
            ),
            "occupation_slope": report.occupation_slope,
        },
        "pass": passed,
    }
    _emit_json(args, payload)
    return 0 if passed else 2


def _cmd_tail_check(args) -> int:
    seed = SeedSpec(args.seed, args.stream)
    _set_threads(args)
    alphas = _parse_float_grid(args.alphas)
    ns = _parse_grid(args.ns)
    cs = _parse_float_grid(args.cs)
    reports = geom_bound.tail_check(alphas, ns, cs, reps=args.reps, seed=seed)
    passed = all(r.all_dominated and r.mean_ok for r in reports)
    payload = {
        "command": "tail-check",
        "seed": _seed_payload(seed),
        "parameters": {"alphas": alphas, "ns": ns, "cs": cs, "reps": args.reps},
        "reference": {
            "bound": "2*exp(-lambda^2*alpha^2/(4*(1-alpha)*n))",
            "criterion": "empirical tail <= bound + 3 standard errors",
        },
        "check": {
            "cells": [
                {
                    "alpha": r.alpha,
                    "n": r.n,
                    "lambda_grid": list(r.lambda_grid),
                    "bound_values": list(r.bound_values),
                    "empirical_tails": list(r.empirical_tails),
                    "std_errors": list(r.std_errors),
                    "flagged": list(r.flagged),
                    "dominated": list(r.dominated),
                    "mean_centered_sum": r.mean_centered_sum,
                    "mean_tolerance": r.mean_tolerance,
                }
                for r in reports
            ]
        },
        "pass": passed,
    }
    _emit_json(args, payload)
    return 0 if passed else 2


def _cmd_scaling(args) -> int:
    config = load_config(args.config)
    seed = SeedSpec(args.seed, args.stream)
    _set_threads(args)
    grid = _parse_grid(args.n_grid)
    report = limit_stats.scaling_exponent(
        config, grid, args.paths_per_n, args.coordinate, seed
    )
    expected, tolerance = SCALING_BANDS[args.coordinate]
    passed = abs(report.slope - expected) <= tolerance
    payload = {
        "command": "scaling",
        "config": _config_payload(config),
        "seed": _seed_payload(seed),
        "parameters": {
            "coordinate": args.coordinate,
            "n_grid": grid,
            "paths_per_n": args.paths_per_n,
        },
        "reference": {"expected_exponent": expected, "tolerance": tolerance},
        "check": {
            "mean_abs": list(report.mean_abs),
            "slope": report.slope,
            "slope_stderr": report.slope_stderr,
        },
        "pass": passed,
    }
    _emit_json(args, payload)
    return 0 if passed else 2


def _cmd_limits(args) -> int:
    config = load_config(args.config)
    seed = SeedSpec(args.seed, args.stream)
    _set_threads(args)
    grid = _parse_grid(args.n_grid)
    report = limit_stats.limit_distribution_check(
        config,
        grid,
        args.paths,
        seed,
        oracle_count=args.oracle_count,
        y_threshold=args.y_threshold,
        x_threshold=args.x_threshold,
    )
    payload = {
        "command": "limits",
        "config": _config_payload(config),
        "seed": _seed_payload(seed),
        "parameters": {
            "n_grid": grid,
            "paths": args.paths,
            "oracle_count": args.oracle_count,
        },
        "reference": {
            "vertical_limit": "standard normal",
            "horizontal_limit": "sqrt(run_weight*|Z2|)*Z1",
            "run_weight": report.run_weight,
            "y_threshold": args.y_threshold,
            "x_threshold": args.x_threshold,
        },
        "check": {
            "ks_vertical": list(report.ks_vertical),
            "ks_horizontal": list(report.ks_horizontal),
            "vertical_decreasing": report.vertical_decreasing,
            "horizontal_decreasing": report.horizontal_decreasing,
        },
        "pass": report.passed,
    }
    _emit_json(args, payload)
    return 0 if report.passed else 2


def _cmd_lil(args) -> int:
    config = load_config(args.config)
    seed = SeedSpec(args.seed, args.stream)
    _set_threads(args)
    series = limit_stats.lil_series(config, args.n_max, seed, growth=args.growth)
    meta = {
        "chung_liminf_reference": _fmt(series.references["chung_liminf"]),
        "command": "lil",
        "config": format_config_text(config).strip().replace("\n", "; "),
        "growth": args.growth,
        "n_max": args.n_max,
        "seed": args.seed,
        "skipped_below_16": ",".join(str(v) for v in series.skipped) or "none",
        "stream": args.stream,
        "version": __version__,
        "x_limsup_reference": _fmt(series.references["x_limsup"]),
        "y_limsup_reference": _fmt(series.references["y_limsup"]),
    }
    rows = [
        f"{n},{_fmt(y)},{_fmt(x)},{_fmt(c)}"
        for n, y, x, c in zip(
            series.checkpoints, series.y_stat, series.x_stat, series.chung_stat
        )
    ]
    _write_text(args.out, _csv_lines(meta, "N,y_stat,x_stat,chung_stat", rows))
    return 0


def _cmd_localtime_check(args) -> int:
    from . import localtime

    seed = SeedSpec(args.seed, args.stream)
    _set_threads(args)
    grid = _parse_grid(args.n_grid)

    conservation_ok = True
    for i in range(args.conservation_paths):
        path = localtime.srw_path(args.conservation_steps, seed.offset(i))
        table = localtime.local_time_table(path)
        if table.total() != args.conservation_steps:
            conservation_ok = False
            break

    block = args.conservation_paths
    medians = localtime.uniformity_decay(
        grid, args.paths, seed.offset(block), exponent=args.exponent
    )
    decreasing = all(b < a for a, b in zip(medians, medians[1:]))

    block += len(grid) * args.paths
    kesten = localtime.kesten_ensemble(grid[-1], args.paths, seed.offset(block))

    passed = conservation_ok and decreasing
    payload = {
        "command": "localtime-check",
        "seed": _seed_payload(seed),
        "parameters": {
            "n_grid": grid,
            "paths": args.paths,
            "conservation_paths": args.conservation_paths,
            "conservation_steps": args.conservation_steps,
            "uniformity_exponent": args.exponent,
        },
        "reference": {
            "kesten_normalizer": "sqrt(2*n*loglog(n))",
            "kesten_limsup": 1.0,
            "uniformity_growth": "strictly slower than n^0.3",
        },
        "check": {
            "conservation_ok": conservation_ok,
            "uniformity_medians": medians,
            "uniformity_decreasing": decreasing,
            "kesten_at_max_n": {
                "median": float(np.median(kesten)),
                "max": float(np.max(kesten)),
            },
        },
        "pass": passed,
    }
    _emit_json(args, payload)
    return 0 if passed else 2


def _cmd_invariance(args) -> int:
    config_a = load_config(args.config_a)
    config_b = load_config(args.config_b)
    seed = SeedSpec(args.seed, args.stream)
    _set_threads(args)
    report = limit_stats.position_invariance_test(
        config_a, config_b, args.steps, args.paths, seed, level=args.level
    )
    payload = {
        "command": "invariance",
        "config_a": _config_payload(config_a),
        "config_b": _config_payload(config_b),
        "seed": _seed_payload(seed),
        "parameters": {"steps": args.steps, "paths": args.paths, "level": args.level},
        "reference": {
            "statistic": "two-sample KS on x / N^(1/4)",
            "claim": "the limit law depends on lines only through their parameters",
        },
        "check": {"ks": report.ks, "critical": report.critical},
        "pass": report.passed,
    }
    _emit_json(args, payload)
    return 0 if report.passed else 2


# ---------------------------------------------------------------------------
# parser


def _add_common(sub, config=True):
    if config:
        sub.add_argument("--config", required=True, help="lattice config file")
    sub.add_argument("--seed", type=int, default=0, help="master seed")
    sub.add_argument("--stream", type=int, default=0, help="base stream index")
    sub.add_argument("--threads", type=int, default=None, help="worker threads")
    sub.add_argument("--out", default="-", help="output path ('-' for stdout)")
    sub.add_argument("--meta-out", default=None, help="write wall-clock metadata here")


def build_parser() -> _Parser:
    parser = _Parser(prog="combwalk", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("simulate", help="sample paths to CSV")
    _add_common(p)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--paths", type=int, default=1)
    p.add_argument("--sampler", choices=("direct", "coupled"), default="direct")
    p.add_argument("--record", choices=("endpoint", "full"), default="endpoint")
    p.set_defaults(func=_cmd_simulate)

    p = subs.add_parser("exact", help="exact finite-step distribution to CSV")
    _add_common(p)
    p.add_argument("--steps", type=int, required=True)
    p.set_defaults(func=_cmd_exact)

    p = subs.add_parser("compare", help="chi-square of both samplers vs exact law")
    _add_common(p)
    p.add_argument("--steps", type=int, default=12)
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--quantile", type=float, default=0.999)
    p.set_defaults(func=_cmd_compare)

    p = subs.add_parser("couple-check", help="coupling error growth slope")
    _add_common(p)
    p.add_argument("--n-grid", default="10000,100000,1000000")
    p.add_argument("--paths-per-n", type=int, default=20)
    p.set_defaults(func=_cmd_couple_check)

    p = subs.add_parser("tail-check", help="geometric maximal tail bound grid")
    _add_common(p, config=False)
    p.add_argument("--alphas", default="0.2,0.5,0.8")
    p.add_argument("--ns", default="1000,10000,100000")
    p.add_argument("--cs", default="1,2,3,4")
    p.add_argument("--reps", type=int, default=10_000)
    p.set_defaults(func=_cmd_tail_check)

    p = subs.add_parser("scaling", help="endpoint growth exponent regression")
    _add_common(p)
    p.add_argument("--coordinate", choices=("x", "y"), required=True)
    p.add_argument("--n-grid", default="1000,10000,100000,1000000")
    p.add_argument("--paths-per-n", type=int, default=2000)
    p.set_defaults(func=_cmd_scaling)

    p = subs.add_parser("limits", help="KS against the marginal limit laws")
    _add_common(p)
    p.add_argument("--n-grid", default="1000,30000,1000000")
    p.add_argument("--paths", type=int, default=5000)
    p.add_argument("--oracle-count", type=int, default=200_000)
    p.add_argument("--y-threshold", type=float, default=0.03)
    p.add_argument("--x-threshold", type=float, default=0.05)
    p.set_defaults(func=_cmd_limits)

    p = subs.add_parser("lil", help="iterated-logarithm statistic series to CSV")
    _add_common(p)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--growth", type=float, default=1.5)
    p.set_defaults(func=_cmd_lil)

    p = subs.add_parser("localtime-check", help="local-time statistics checks")
    _add_common(p, config=False)
    p.add_argument("--n-grid", default="10000,100000,1000000")
    p.add_argument("--paths", type=int, default=50)
    p.add_argument("--conservation-paths", type=int, default=1000)
    p.add_argument("--conservation-steps", type=int, default=1000)
    p.add_argument("--exponent", type=float, default=0.3)
    p.set_defaults(func=_cmd_localtime_check)

    p = subs.add_parser("invariance", help="two-configuration position invariance")
    _add_common(p, config=False)
    p.add_argument("--config-a", required=True)
    p.add_argument("--config-b", required=True)
    p.add_argument("--steps", type=int, default=1_000_000)
    p.add_argument("--paths", type=int, default=5000)
    p.add_argument("--level", type=float, default=0.99)
    p.set_defaults(func=_cmd_invariance)

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    started = time.time()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        code = args.func(args)
        _meta_sidecar(args, started)
        return code
    except CliInputError as exc:
        print(f"combwalk: error: {exc}", file=sys.stderr)
        return 1
    except (CombWalkError, ValueError, OSError) as exc:
        print(f"combwalk: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
