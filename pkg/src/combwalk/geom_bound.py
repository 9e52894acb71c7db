"""Exponential maximal inequality for centered geometric partial sums.

For i.i.d. geometric variates G_i with P(G_i = k) = alpha (1 - alpha)^k,
the running maximum of |sum_{i<=j} (G_i - (1-alpha)/alpha)| over j <= n
satisfies, for n large and lambda not too big,

    P(max > lambda) <= 2 exp(-lambda^2 alpha^2 / (4 (1 - alpha) n)).

The advertised validity range is lambda < a*n for an unquantified a > 0;
we expose the lambda/n cap as a parameter, defaulting to
0.1 * (1 - alpha) / alpha so the exponential-moment argument behind the
bound stays deep in its Taylor regime.  Out-of-range lambdas are flagged
with a RangeWarning but still evaluated.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import InvalidProbability, RangeWarning
from .rng import SeedSpec

DEFAULT_ALPHAS = (0.2, 0.5, 0.8)
DEFAULT_NS = (1_000, 10_000, 100_000)
DEFAULT_CS = (1.0, 2.0, 3.0, 4.0)
MIN_REPS = 1_000


def default_lambda_cap(alpha: float) -> float:
    """Default cap on lambda / n for the bound's advertised range."""
    return 0.1 * (1.0 - alpha) / alpha


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise InvalidProbability(f"alpha must lie strictly in (0, 1), got {alpha}")


def tail_bound(alpha: float, n: int, lam: float, cap: float | None = None) -> float:
    """Evaluate 2 exp(-lambda^2 alpha^2 / (4 (1 - alpha) n)).

    Emits RangeWarning (and still computes) when lam exceeds cap * n.
    """
    _check_alpha(alpha)
    if n < 1:
        raise ValueError("n must be at least 1")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if cap is None:
        cap = default_lambda_cap(alpha)
    if lam > cap * n:
        warnings.warn(
            f"lambda={lam:g} exceeds the advertised range cap {cap:g} * n = {cap * n:g}",
            RangeWarning,
            stacklevel=2,
        )
    return 2.0 * math.exp(-(lam * lam * alpha * alpha) / (4.0 * (1.0 - alpha) * n))


def max_deviation_samples(
    alpha: float, n: int, reps: int, seed: SeedSpec
) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo samples of the maximal deviation statistic.

    Returns (max deviations, final centered sums), one entry per
    replication; replication r consumes stream seed.stream_index + r.
    """
    _check_alpha(alpha)
    if n < 1:
        raise ValueError("n must be at least 1")
    if reps < 1:
        raise ValueError("reps must be positive")
    return _kernels.geom_maxdev_batch(
        float(alpha),
        np.int64(n),
        np.int64(reps),
        np.uint64(seed.master_seed),
        np.uint64(seed.stream_index),
    )


def empirical_tail(alpha: float, n: int, lam: float, reps: int, seed: SeedSpec) -> float:
    """Monte Carlo frequency of the event {max deviation > lambda}."""
    if reps < MIN_REPS:
        raise ValueError(f"reps must be at least {MIN_REPS} for a usable estimate")
    max_dev, _ = max_deviation_samples(alpha, n, reps, seed)
    return float(np.mean(max_dev > lam))


@dataclass(frozen=True)
class TailCheckReport:
    """Bound vs. empirical tail on a lambda grid for one (alpha, n) cell.

    ``dominated`` holds per-lambda checks of
    empirical <= bound + 3 * binomial standard error; ``flagged`` marks
    lambdas beyond the advertised range cap.
    """

    alpha: float
    n: int
    reps: int
    lambda_grid: tuple[float, ...]
    bound_values: tuple[float, ...]
    empirical_tails: tuple[float, ...]
    std_errors: tuple[float, ...]
    flagged: tuple[bool, ...]
    dominated: tuple[bool, ...]
    mean_centered_sum: float
    mean_tolerance: float

    @property
    def all_dominated(self) -> bool:
        return all(self.dominated)

    @property
    def mean_ok(self) -> bool:
        return abs(self.mean_centered_sum) <= self.mean_tolerance


def tail_check(
    alphas: Sequence[float] = DEFAULT_ALPHAS,
    ns: Sequence[int] = DEFAULT_NS,
    cs: Sequence[float] = DEFAULT_CS,
    reps: int = 10_000,
    seed: SeedSpec = SeedSpec(0),
) -> list[TailCheckReport]:
    """Run the domination check over a grid of (alpha, n, lambda) cells.

    The lambda grid is c * sqrt((1 - alpha) * n) / alpha for c in cs, i.e.
    c standard deviations of the final centered sum.  All lambdas for one
    (alpha, n) cell share the same replications, so the empirical tail is
    exactly nonincreasing in lambda.
    """
    if reps < MIN_REPS:
        raise ValueError(f"reps must be at least {MIN_REPS}")
    reports = []
    for cell_index, (alpha, n) in enumerate(
        (a, int(n)) for a in alphas for n in ns
    ):
        cell_seed = seed.offset(cell_index * reps)
        max_dev, final = max_deviation_samples(alpha, n, reps, cell_seed)
        sd = math.sqrt((1.0 - alpha) * n) / alpha
        lam_grid = [c * sd for c in cs]
        bounds = []
        flagged = []
        empirical = []
        errs = []
        dominated = []
        for lam in lam_grid:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", RangeWarning)
                b = tail_bound(alpha, n, lam)
            bounds.append(b)
            flagged.append(any(issubclass(w.category, RangeWarning) for w in caught))
            p_hat = float(np.mean(max_dev > lam))
            se = math.sqrt(p_hat * (1.0 - p_hat) / reps)
            empirical.append(p_hat)
            errs.append(se)
            dominated.append(p_hat <= b + 3.0 * se)
        var_per_term = (1.0 - alpha) / alpha**2
        reports.append(
            TailCheckReport(
                alpha=float(alpha),
                n=n,
                reps=reps,
                lambda_grid=tuple(lam_grid),
                bound_values=tuple(bounds),
                empirical_tails=tuple(empirical),
                std_errors=tuple(errs),
                flagged=tuple(flagged),
                dominated=tuple(dominated),
                mean_centered_sum=float(final.mean()),
                mean_tolerance=4.0 * math.sqrt(n * var_per_term / reps),
            )
        )
    return reports
