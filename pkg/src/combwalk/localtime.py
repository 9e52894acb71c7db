"""Local times of one-dimensional simple symmetric walks.

The local time of a path at site x counts the visits S(k) = x over times
0 < k <= n; time zero is excluded, so the local time at the origin counts
returns only.  Tables are dense arrays over the visited range, which for
an n-step walk is typically O(sqrt(n)) wide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyTable, InvalidPath
from .rng import ROLE_WALK, SeedSpec, uniforms


@dataclass(frozen=True)
class LocalTimeTable:
    """Visit counts over the visited range; counts[i] is site offset + i."""

    n_steps: int
    offset: int
    counts: np.ndarray

    def count(self, x: int) -> int:
        i = x - self.offset
        if 0 <= i < self.counts.size:
            return int(self.counts[i])
        return 0

    def total(self) -> int:
        return int(self.counts.sum())


def local_time_table(path: Sequence[int]) -> LocalTimeTable:
    """Count visits at times 1..n of a unit-increment path started at 0."""
    arr = np.asarray(path, dtype=np.int64)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidPath("path must be a nonempty one-dimensional sequence")
    if arr[0] != 0:
        raise InvalidPath("path must start at 0")
    if arr.size > 1 and np.any(np.abs(np.diff(arr)) != 1):
        raise InvalidPath("path increments must be +1 or -1")
    n = arr.size - 1
    if n == 0:
        return LocalTimeTable(0, 0, np.zeros(0, dtype=np.int64))
    body = arr[1:]
    lo = int(body.min())
    counts = np.bincount(body - lo).astype(np.int64)
    return LocalTimeTable(n, lo, counts)


def max_local_time(table: LocalTimeTable) -> tuple[int, int]:
    """Argmax site and maximal visit count; ties break toward smallest x."""
    if table.counts.size == 0:
        raise EmptyTable("local-time table has no visits")
    idx = int(np.argmax(table.counts))
    return table.offset + idx, int(table.counts[idx])


def adjacent_uniformity_stat(table: LocalTimeTable) -> int:
    """sup over x of |count(x + 1) - count(x)|.

    Sites outside the visited range have count zero, so it suffices to pad
    the table with one zero on each side; the supremum is unaffected by
    the restriction.
    """
    if table.counts.size == 0:
        return 0
    padded = np.concatenate(([0], table.counts, [0]))
    return int(np.max(np.abs(np.diff(padded))))


def srw_path(n_steps: int, seed: SeedSpec, role: int = ROLE_WALK) -> np.ndarray:
    """Simple symmetric walk path S(0..n); u < 1/2 steps up."""
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    u = uniforms(seed, n_steps, role=role)
    steps = np.where(u < 0.5, 1, -1).astype(np.int64)
    out = np.empty(n_steps + 1, dtype=np.int64)
    out[0] = 0
    np.cumsum(steps, out=out[1:])
    return out


def kesten_ratio(n_steps: int, max_count: int) -> float:
    """Maximal local time scaled by Kesten's iterated-logarithm normalizer."""
    if n_steps < 3:
        raise ValueError("normalizer needs n >= 3 so log log n > 0")
    return max_count / math.sqrt(2.0 * n_steps * math.log(math.log(n_steps)))


def kesten_ensemble(n_steps: int, n_paths: int, seed: SeedSpec) -> np.ndarray:
    """Scaled maximal local times over independent paths."""
    out = np.empty(n_paths)
    for i in range(n_paths):
        table = local_time_table(srw_path(n_steps, seed.offset(i)))
        _, peak = max_local_time(table)
        out[i] = kesten_ratio(n_steps, peak)
    return out


def uniformity_decay(
    n_grid: Sequence[int],
    n_paths: int,
    seed: SeedSpec,
    exponent: float = 0.3,
) -> list[float]:
    """Median of (adjacent-uniformity stat) / n**exponent for each grid n.

    The statistic grows strictly slower than n**0.3, so the medians should
    decrease along an increasing grid.
    """
    medians = []
    for gi, n in enumerate(n_grid):
        stats = np.empty(n_paths)
        for i in range(n_paths):
            table = local_time_table(srw_path(int(n), seed.offset(gi * n_paths + i)))
            stats[i] = adjacent_uniformity_stat(table) / float(n) ** exponent
        medians.append(float(np.median(stats)))
    return medians
