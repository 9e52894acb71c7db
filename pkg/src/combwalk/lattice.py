"""K-comb lattice configuration, direct Markov stepper, exact distributions.

The lattice is Z^2 with horizontal movement permitted only on K configured
horizontal lines.  Off a line the walk moves up or down with probability
1/2 each; on the line at height m_j it moves up/down with probability p_j
each and right/left with probability 1/2 - p_j each.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np

from . import _kernels
from .errors import (
    DuplicateLevel,
    EmptyConfig,
    InvalidProbability,
    TooLargeForExact,
)
from .rng import SeedSpec

EXACT_STEP_LIMIT = 64


class Position(NamedTuple):
    x: int
    y: int


@dataclass(frozen=True)
class LineSpec:
    """One horizontal line: vertical coordinate m and stickiness p in (0, 1/2)."""

    m: int
    p: float

    @property
    def alpha(self) -> float:
        """Total probability of leaving the line vertically (alpha = 2p)."""
        return 2.0 * self.p


@dataclass(frozen=True)
class KCombConfig:
    """Validated lattice specification: lines sorted by level, K = len(lines)."""

    lines: tuple[LineSpec, ...]

    @property
    def k(self) -> int:
        return len(self.lines)

    @cached_property
    def levels(self) -> np.ndarray:
        return np.array([ln.m for ln in self.lines], dtype=np.int64)

    @cached_property
    def ps(self) -> np.ndarray:
        return np.array([ln.p for ln in self.lines], dtype=np.float64)

    @cached_property
    def alphas(self) -> np.ndarray:
        return np.array([ln.alpha for ln in self.lines], dtype=np.float64)

    @cached_property
    def run_weights(self) -> np.ndarray:
        """Per-line expected geometric run length (1 - alpha_j) / alpha_j."""
        a = self.alphas
        return (1.0 - a) / a

    @cached_property
    def _p_by_level(self) -> dict[int, float]:
        return {ln.m: ln.p for ln in self.lines}

    def line_p(self, y: int) -> float | None:
        """p_j if y is a configured level, else None."""
        return self._p_by_level.get(y)


def validate_config(raw: Iterable[tuple[int, float]]) -> KCombConfig:
    """Build a sorted, validated lattice configuration from (m, p) pairs.

    Raises EmptyConfig, DuplicateLevel or InvalidProbability.
    """
    pairs = list(raw)
    if not pairs:
        raise EmptyConfig("at least one horizontal line is required")
    seen: set[int] = set()
    lines = []
    for m, p in pairs:
        m_int = int(m)
        if m_int != m:
            raise ValueError(f"line level must be an integer, got {m!r}")
        p = float(p)
        if not 0.0 < p < 0.5:
            raise InvalidProbability(f"p must lie strictly in (0, 1/2), got {p}")
        if m_int in seen:
            raise DuplicateLevel(f"duplicate line level m={m_int}")
        seen.add(m_int)
        lines.append(LineSpec(m_int, p))
    lines.sort(key=lambda ln: ln.m)
    return KCombConfig(tuple(lines))


RecordMode = Union[str, Sequence[int]]


def _normalize_record_mode(record_mode: RecordMode, n_steps: int) -> np.ndarray:
    if isinstance(record_mode, str):
        if record_mode == "endpoint":
            return np.array([n_steps], dtype=np.int64)
        if record_mode == "full":
            return np.arange(n_steps + 1, dtype=np.int64)
        raise ValueError(f"unknown record mode {record_mode!r}")
    steps = np.unique(np.asarray(list(record_mode), dtype=np.int64))
    if steps.size == 0:
        raise ValueError("checkpoint list is empty")
    if steps[0] < 0 or steps[-1] > n_steps:
        raise ValueError("checkpoints must lie in [0, n_steps]")
    return steps


@dataclass(frozen=True)
class Trajectory:
    """A realized walk: positions recorded at `steps`, reproducible from `seed`."""

    config: KCombConfig
    n_steps: int
    seed: SeedSpec
    record_mode: RecordMode
    steps: np.ndarray
    positions: np.ndarray  # shape (len(steps), 2)

    @property
    def endpoint(self) -> Position:
        if self.steps[-1] != self.n_steps:
            raise ValueError("final step was not recorded")
        return Position(int(self.positions[-1, 0]), int(self.positions[-1, 1]))


def step_direct(pos: Position, config: KCombConfig, u: float) -> Position:
    """One transition of the walk driven by a single uniform variate.

    Off a line, u < 1/2 moves up and u >= 1/2 moves down.  On the line at
    m_j the unit interval splits into [0,p), [p,2p), [2p,1/2+p), [1/2+p,1)
    mapping to up, down, right, left in that fixed order.
    """
    x, y = pos
    p = config.line_p(y)
    if p is None:
        return Position(x, y + 1) if u < 0.5 else Position(x, y - 1)
    if u < p:
        return Position(x, y + 1)
    if u < 2.0 * p:
        return Position(x, y - 1)
    if u < 0.5 + p:
        return Position(x + 1, y)
    return Position(x - 1, y)


def simulate_direct(
    config: KCombConfig,
    n_steps: int,
    seed: SeedSpec,
    record_mode: RecordMode = "endpoint",
) -> Trajectory:
    """Run the direct stepper for exactly n_steps, one uniform per step.

    Deterministic given (config, n_steps, seed, record_mode); the recorded
    positions are a subsample of the same underlying path regardless of
    record mode.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    steps = _normalize_record_mode(record_mode, n_steps)
    if isinstance(record_mode, str) and record_mode == "full":
        positions = _kernels.direct_full(
            config.levels,
            config.ps,
            np.int64(n_steps),
            np.uint64(seed.master_seed),
            np.uint64(seed.stream_index),
        )
    else:
        xy, _ = _kernels.direct_checkpoints_batch(
            config.levels,
            config.ps,
            steps,
            np.uint64(seed.master_seed),
            np.uint64(seed.stream_index),
            np.int64(1),
        )
        positions = xy[0]
    return Trajectory(config, n_steps, seed, record_mode, steps, positions)


def direct_endpoints(config: KCombConfig, n_steps: int, seed: SeedSpec, n_paths: int) -> np.ndarray:
    """Endpoint ensemble of the direct sampler: int64 array (n_paths, 2).

    Path i consumes the stream (seed.master_seed, seed.stream_index + i).
    """
    xy, _ = direct_checkpoint_ensemble(config, [n_steps], seed, n_paths)
    return xy[:, 0, :]


def direct_checkpoint_ensemble(
    config: KCombConfig,
    checkpoints: Sequence[int],
    seed: SeedSpec,
    n_paths: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Ensemble recorded at sorted step counts.

    Returns (xy, max_abs_y) with shapes (n_paths, C, 2) and (n_paths, C);
    max_abs_y[i, c] is max_{k <= checkpoints[c]} |y_i(k)|.
    """
    chk = np.unique(np.asarray(list(checkpoints), dtype=np.int64))
    if chk.size == 0 or chk[0] < 0:
        raise ValueError("checkpoints must be nonnegative")
    if n_paths < 1:
        raise ValueError("n_paths must be positive")
    return _kernels.direct_checkpoints_batch(
        config.levels,
        config.ps,
        chk,
        np.uint64(seed.master_seed),
        np.uint64(seed.stream_index),
        np.int64(n_paths),
    )


@dataclass(frozen=True)
class DistributionTable:
    """Exact n-step law of the walk as a map Position -> probability."""

    n_steps: int
    entries: dict[Position, float]

    def probability(self, pos: Position) -> float:
        return self.entries.get(Position(*pos), 0.0)

    def total_mass(self) -> float:
        return float(sum(self.entries.values()))


def exact_distribution(config: KCombConfig, n_steps: int) -> DistributionTable:
    """Exact finite-step distribution by dense dynamic programming.

    Iterates the transition kernel over the reachable diamond
    {|x| + |y| <= n} with two alternating buffers in double precision;
    limited to n_steps <= 64 so accumulated rounding stays below 1e-12.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    if n_steps > EXACT_STEP_LIMIT:
        raise TooLargeForExact(
            f"n_steps={n_steps} exceeds the exact-DP limit of {EXACT_STEP_LIMIT}"
        )
    n = n_steps
    size = 2 * n + 1
    cur = np.zeros((size, size))
    cur[n, n] = 1.0  # index (x + n, y + n)
    for step in range(n):
        nxt = np.zeros_like(cur)
        for iy in range(n - step, n + step + 1):
            row = cur[:, iy]
            if not row.any():
                continue
            p = config.line_p(iy - n)
            if p is None:
                nxt[:, iy + 1] += 0.5 * row
                nxt[:, iy - 1] += 0.5 * row
            else:
                q = 0.5 - p
                nxt[:, iy + 1] += p * row
                nxt[:, iy - 1] += p * row
                nxt[1:, iy] += q * row[:-1]
                nxt[:-1, iy] += q * row[1:]
        cur = nxt
    entries: dict[Position, float] = {}
    ix, iy = np.nonzero(cur)
    for i, j in zip(ix.tolist(), iy.tolist()):
        entries[Position(i - n, j - n)] = float(cur[i, j])
    return DistributionTable(n_steps, entries)
