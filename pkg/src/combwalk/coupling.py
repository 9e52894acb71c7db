"""Equivalent construction: two independent walks spliced by geometric runs.

The comb walk is rebuilt from one-dimensional ingredients: an internal
vertical simple symmetric walk supplies moves between lines; every arrival
at a configured line consumes the next geometric variate of that line's
private sequence and delivers that many horizontal steps from an
independent horizontal walk.  The decomposition records the bookkeeping
needed to watch the coupling error: the gap between the horizontal step
count and the occupation-weighted expectation that credits each line
visit with that line's expected run length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from ._fit import fit_loglog
from .errors import InsufficientGrid, InvalidProbability, ShapeMismatch
from .lattice import KCombConfig, RecordMode, Trajectory, _normalize_record_mode
from .rng import (
    ROLE_HORIZONTAL,
    ROLE_LEVEL_BASE,
    ROLE_VERTICAL,
    SeedSpec,
    Xoshiro256pp,
)

__all__ = [
    "SeedSpec",
    "GeomRun",
    "CoupledDecomposition",
    "CoupledBatch",
    "ErrorGrowthReport",
    "sample_geometric",
    "simulate_coupled",
    "coupled_endpoints",
    "aggregate_run_weight",
    "expected_horizontal_steps",
    "coupling_error_growth",
]


def sample_geometric(alpha: float, u: float) -> int:
    """Geometric variate with P(k) = alpha * (1 - alpha)^k, k = 0, 1, 2, ...

    Inversion: k = floor(log(u) / log(1 - alpha)) for u in (0, 1]; u near 1
    maps to 0.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidProbability(f"alpha must lie strictly in (0, 1), got {alpha}")
    if not 0.0 < u <= 1.0:
        raise ValueError(f"u must lie in (0, 1], got {u}")
    return int(math.floor(math.log(u) / math.log1p(-alpha)))


def aggregate_run_weight(config: KCombConfig) -> float:
    """Sum over lines of the expected geometric run length (1 - a_j) / a_j.

    This is the only way the line parameters enter the walk's horizontal
    limit behavior; for the classical comb (one line, p = 1/4) it equals 1.
    """
    return float(np.sum(config.run_weights))


def expected_horizontal_steps(level_visits: Sequence[int], config: KCombConfig) -> float:
    """Occupation-weighted expected horizontal step count.

    ``level_visits[j]`` is the number of vertical-walk visits to line j;
    each visit contributes that line's expected run length.
    """
    visits = np.asarray(level_visits, dtype=np.float64)
    if visits.shape != (config.k,):
        raise ShapeMismatch(
            f"expected {config.k} per-line counts, got shape {visits.shape}"
        )
    if np.any(visits < 0):
        raise ValueError("visit counts must be nonnegative")
    return float(visits @ config.run_weights)


@dataclass(frozen=True)
class GeomRun:
    """One consumed geometric variate: drawn value, delivered steps, cut flag."""

    level_index: int
    drawn: int
    consumed: int
    truncated: bool


@dataclass(frozen=True)
class CoupledDecomposition:
    """Per-path accounting of the spliced construction.

    ``level_visits`` counts vertical-walk visits per line (the visit at
    time zero, when the start lies on a line, is excluded by convention;
    the run it triggers still appears in the ledger).  ``max_error`` is
    the running maximum over all steps of the absolute gap between the
    horizontal count and ``expected_horizontal``.  The optional series
    arrays (present when the simulation tracked them) are indexed by
    total step count 0..N.
    """

    n_steps: int
    horizontal_steps: int
    vertical_steps: int
    level_visits: np.ndarray
    expected_horizontal: float
    max_error: float
    truncated_extra: int
    geom_ledger: tuple[tuple[GeomRun, ...], ...]
    horizontal_series: np.ndarray | None = None
    vertical_series: np.ndarray | None = None
    expected_horizontal_series: np.ndarray | None = None
    error_running_max: np.ndarray | None = None
    level_visit_series: np.ndarray | None = None

    def recompute_expected_horizontal(self, config: KCombConfig) -> float:
        return expected_horizontal_steps(self.level_visits, config)

    def ledger_consumed_total(self) -> int:
        return sum(run.consumed for per_level in self.geom_ledger for run in per_level)


def simulate_coupled(
    config: KCombConfig,
    n_steps: int,
    seed: SeedSpec,
    record_mode: RecordMode = "endpoint",
    track_series: bool = False,
) -> tuple[Trajectory, CoupledDecomposition]:
    """Run the spliced construction for exactly n_steps.

    Pure-Python reference implementation with the full geometric-run
    ledger; consumes the same streams in the same order as the compiled
    batch kernel, so endpoints agree bit for bit.  A horizontal run still
    in progress when the step budget runs out is truncated and flagged.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    record_steps = _normalize_record_mode(record_mode, n_steps)
    k = config.k
    gen_h = Xoshiro256pp(seed, ROLE_HORIZONTAL)
    gen_v = Xoshiro256pp(seed, ROLE_VERTICAL)
    gen_g = [Xoshiro256pp(seed, ROLE_LEVEL_BASE + j) for j in range(k)]
    levels = config.levels
    alphas = config.alphas
    weights = config.run_weights

    x = y = 0
    h = v = total = 0
    d2 = 0.0
    max_err = 0.0
    truncated_extra = 0
    visits = np.zeros(k, dtype=np.int64)
    ledger: list[list[GeomRun]] = [[] for _ in range(k)]

    positions = np.zeros((record_steps.size, 2), dtype=np.int64)
    rec_ptr = 0
    if track_series:
        h_series = np.zeros(n_steps + 1, dtype=np.int64)
        v_series = np.zeros(n_steps + 1, dtype=np.int64)
        d2_series = np.zeros(n_steps + 1)
        err_series = np.zeros(n_steps + 1)
        visit_series = np.zeros((n_steps + 1, k), dtype=np.int64)
    else:
        h_series = v_series = d2_series = err_series = visit_series = None

    def level_index(yy: int) -> int:
        for j in range(k):
            if yy == levels[j]:
                return j
        return -1

    def after_step() -> None:
        nonlocal max_err, rec_ptr
        err = abs(h - d2)
        if err > max_err:
            max_err = err
        if track_series:
            h_series[total] = h
            v_series[total] = v
            d2_series[total] = d2
            err_series[total] = max_err
            visit_series[total] = visits
        while rec_ptr < record_steps.size and record_steps[rec_ptr] == total:
            positions[rec_ptr, 0] = x
            positions[rec_ptr, 1] = y
            rec_ptr += 1

    after_step()  # step 0
    j = level_index(y)
    while True:
        if j >= 0 and total < n_steps:
            u = gen_g[j].uniform_open()
            g = sample_geometric(alphas[j], u)
            r = min(g, n_steps - total)
            if r < g:
                truncated_extra = g - r
            ledger[j].append(GeomRun(j, g, r, r < g))
            for _ in range(r):
                if gen_h.uniform() < 0.5:
                    x += 1
                else:
                    x -= 1
                h += 1
                total += 1
                after_step()
        if total >= n_steps:
            break
        j = -1
        while total < n_steps:
            if gen_v.uniform() < 0.5:
                y += 1
            else:
                y -= 1
            v += 1
            total += 1
            j = level_index(y)
            if j >= 0:
                visits[j] += 1
                d2 += weights[j]
            after_step()
            if j >= 0:
                break

    trajectory = Trajectory(config, n_steps, seed, record_mode, record_steps, positions)
    decomposition = CoupledDecomposition(
        n_steps=n_steps,
        horizontal_steps=h,
        vertical_steps=v,
        level_visits=visits,
        expected_horizontal=d2,
        max_error=max_err,
        truncated_extra=truncated_extra,
        geom_ledger=tuple(tuple(per) for per in ledger),
        horizontal_series=h_series,
        vertical_series=v_series,
        expected_horizontal_series=d2_series,
        error_running_max=err_series,
        level_visit_series=visit_series,
    )
    return trajectory, decomposition


@dataclass(frozen=True)
class CoupledBatch:
    """Endpoint ensemble of the spliced construction with final accounting."""

    n_steps: int
    endpoints: np.ndarray  # (P, 2)
    horizontal: np.ndarray
    vertical: np.ndarray
    level_visits: np.ndarray  # (P, K)
    expected_horizontal: np.ndarray
    max_error: np.ndarray
    truncated_extra: np.ndarray


def coupled_endpoints(
    config: KCombConfig, n_steps: int, seed: SeedSpec, n_paths: int
) -> CoupledBatch:
    """Compiled endpoint ensemble; path i uses stream seed.stream_index + i."""
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    if n_paths < 1:
        raise ValueError("n_paths must be positive")
    xy, hv, visits, d2, max_err, extra = _kernels.coupled_endpoint_batch(
        config.levels,
        config.alphas,
        np.int64(n_steps),
        np.uint64(seed.master_seed),
        np.uint64(seed.stream_index),
        np.int64(n_paths),
    )
    return CoupledBatch(
        n_steps=n_steps,
        endpoints=xy,
        horizontal=hv[:, 0],
        vertical=hv[:, 1],
        level_visits=visits,
        expected_horizontal=d2,
        max_error=max_err,
        truncated_extra=extra,
    )


@dataclass(frozen=True)
class ErrorGrowthReport:
    """Growth of the coupling error across a step-count grid.

    ``slope`` is the least-squares slope of log(mean max error) against
    log N; the construction predicts an exponent near 1/4.  The report
    also carries the growth of the raw horizontal step count (predicted
    exponent 1/2) and, when a line sits at height zero, of the distance
    between H_N and the aggregate run weight times that line's visit
    count (again near 1/4).
    """

    n_grid: tuple[int, ...]
    paths_per_n: int
    mean_max_error: tuple[float, ...]
    slope: float
    slope_stderr: float
    mean_horizontal: tuple[float, ...]
    horizontal_slope: float
    mean_occupation_error: tuple[float, ...] | None
    occupation_slope: float | None


def coupling_error_growth(
    config: KCombConfig,
    n_grid: Sequence[int],
    paths_per_n: int,
    seed: SeedSpec,
) -> ErrorGrowthReport:
    """Measure the growth of the per-path maximal coupling error over N.

    Requires at least three grid points spanning at least two decades.
    """
    grid = [int(n) for n in n_grid]
    if len(grid) < 3:
        raise InsufficientGrid("need at least three grid points")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InsufficientGrid("grid must be strictly increasing")
    if grid[0] <= 0 or grid[-1] < 100 * grid[0]:
        raise InsufficientGrid("grid must span at least two decades")
    if paths_per_n < 1:
        raise ValueError("paths_per_n must be positive")

    zero_j = None
    for j, ln in enumerate(config.lines):
        if ln.m == 0:
            zero_j = j
            break
    a_weight = aggregate_run_weight(config)

    mean_err = []
    mean_h = []
    mean_occ = []
    for i, n in enumerate(grid):
        batch = coupled_endpoints(config, n, seed.offset(i * paths_per_n), paths_per_n)
        mean_err.append(float(batch.max_error.mean()))
        mean_h.append(float(batch.horizontal.mean()))
        if zero_j is not None:
            occ = np.abs(batch.horizontal - a_weight * batch.level_visits[:, zero_j])
            mean_occ.append(float(occ.mean()))

    err_fit = fit_loglog(grid, mean_err)
    h_fit = fit_loglog(grid, mean_h)
    occ_fit = fit_loglog(grid, mean_occ) if zero_j is not None else None
    return ErrorGrowthReport(
        n_grid=tuple(grid),
        paths_per_n=paths_per_n,
        mean_max_error=tuple(mean_err),
        slope=err_fit.slope,
        slope_stderr=err_fit.slope_stderr,
        mean_horizontal=tuple(mean_h),
        horizontal_slope=h_fit.slope,
        mean_occupation_error=tuple(mean_occ) if zero_j is not None else None,
        occupation_slope=occ_fit.slope if occ_fit is not None else None,
    )
