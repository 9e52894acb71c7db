from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from combwalk import (
    EmptyTable,
    InvalidPath,
    adjacent_uniformity_stat,
    local_time_table,
    max_local_time,
    simulate_coupled,
)
from combwalk.localtime import kesten_ratio, srw_path, uniformity_decay
from combwalk.rng import SeedSpec
from combwalk import validate_config

step_lists = st.lists(st.sampled_from([1, -1]), min_size=0, max_size=200)


def path_from_steps(steps):
    out = [0]
    for s in steps:
        out.append(out[-1] + s)
    return out


class TestLocalTimeTable:
    def test_direct_count_example(self):
        table = local_time_table([0, 1, 0, 1])
        assert table.count(1) == 2
        assert table.count(0) == 1
        assert table.count(5) == 0
        assert table.total() == 3

    def test_zero_length_path(self):
        table = local_time_table([0])
        assert table.n_steps == 0
        assert table.total() == 0

    def test_time_zero_excluded(self):
        # a path that never returns to the origin leaves its count at zero
        table = local_time_table([0, 1, 2, 3])
        assert table.count(0) == 0

    def test_invalid_paths(self):
        with pytest.raises(InvalidPath):
            local_time_table([1, 2, 3])  # must start at 0
        with pytest.raises(InvalidPath):
            local_time_table([0, 2])  # non-unit increment
        with pytest.raises(InvalidPath):
            local_time_table([])

    def test_conservation_random_path(self):
        path = srw_path(10_000, SeedSpec(31))
        assert local_time_table(path).total() == 10_000

    @given(step_lists)
    def test_conservation_property(self, steps):
        path = path_from_steps(steps)
        table = local_time_table(path)
        assert table.total() == len(steps)

    @given(step_lists)
    def test_matches_naive_counter(self, steps):
        path = path_from_steps(steps)
        table = local_time_table(path)
        naive = Counter(path[1:])
        for site, count in naive.items():
            assert table.count(site) == count

    def test_incremental_consistency(self):
        # building the table step by step equals building it from the path
        path = srw_path(500, SeedSpec(77))
        incremental = Counter()
        for value in path[1:]:
            incremental[int(value)] += 1
        table = local_time_table(path)
        assert dict(incremental) == {
            site: table.count(site)
            for site in range(path.min(), path.max() + 1)
            if table.count(site)
        }


class TestMaxLocalTime:
    def test_example(self):
        table = local_time_table([0, 1, 0, 1])
        assert max_local_time(table) == (1, 2)

    def test_tie_breaks_to_smallest_site(self):
        table = local_time_table([0, 1, 0, 1, 0])  # counts: 0 -> 2, 1 -> 2
        assert max_local_time(table) == (0, 2)

    def test_empty_raises(self):
        with pytest.raises(EmptyTable):
            max_local_time(local_time_table([0]))

    def test_doubling_visits_doubles_count(self):
        once = local_time_table([0, 1, 0])
        twice = local_time_table([0, 1, 0, 1, 0])
        assert max_local_time(twice)[1] == 2 * max_local_time(once)[1]

    def test_kesten_band_at_large_n(self):
        # limsup of the scaled maximal local time is 1; at n = 1e7 over 50
        # paths the sample stays in a wide sanity band.  Band frozen from
        # the oracle run at this seed (observed [0.622, 1.352]); doubly-log
        # convergence makes this soft by design.
        from combwalk.localtime import kesten_ensemble

        ratios = kesten_ensemble(10_000_000, 50, SeedSpec(0))
        assert float(ratios.max()) <= 1.45
        assert float(ratios.min()) >= 0.3


class TestAdjacentUniformity:
    def test_example(self):
        # counts: site 0 -> 1, site 1 -> 2; the supremum over all adjacent
        # pairs includes the boundary pair (1, 2) with |0 - 2| = 2
        table = local_time_table([0, 1, 0, 1])
        assert adjacent_uniformity_stat(table) == 2

    def test_interior_only_example(self):
        # interior pairs of the same path differ by exactly 1
        table = local_time_table([0, 1, 0, 1])
        assert abs(table.count(1) - table.count(0)) == 1
        assert abs(table.count(0) - table.count(-1)) == 1

    def test_nonnegative_and_at_least_boundary_gap(self):
        for s in range(10):
            table = local_time_table(srw_path(300, SeedSpec(90, s)))
            stat = adjacent_uniformity_stat(table)
            assert stat >= 1  # edge of the visited range against a zero

    def test_empty_is_zero(self):
        assert adjacent_uniformity_stat(local_time_table([0])) == 0

    def test_decay_against_n_exponent(self):
        # the statistic is o(n^(1/4+eps)) but carries a sqrt(log n) factor,
        # so at desk scale the scaled medians decrease only once the
        # exponent clears ~0.35 (oracle at 3000 paths: /n^0.3 rises
        # 2.46 -> 2.56 -> 2.63 while /n^0.35 falls 1.55 -> 1.44 -> 1.32)
        medians = uniformity_decay(
            [10_000, 100_000, 1_000_000], 50, SeedSpec(0), exponent=0.35
        )
        assert medians[0] > medians[1] > medians[2]


class TestKestenRatio:
    def test_normalizer_value(self):
        import math

        n = 10_000
        expected = 5 / math.sqrt(2 * n * math.log(math.log(n)))
        assert kesten_ratio(n, 5) == pytest.approx(expected, rel=1e-12)

    def test_small_n_rejected(self):
        with pytest.raises(ValueError):
            kesten_ratio(2, 1)


class TestCouplingConsistency:
    def test_zero_level_visits_match_trajectory_local_time(self, three_line):
        # reconstruct the internal vertical walk from the full trajectory
        # and compare its local time at each line with the coupled counters
        config = three_line
        traj, dec = simulate_coupled(config, 3000, SeedSpec(55), "full")
        ys = traj.positions[:, 1]
        vertical_moves = ys[1:] != ys[:-1]
        s2 = np.concatenate(([0], ys[1:][vertical_moves]))
        table = local_time_table(s2)
        for j, line in enumerate(config.lines):
            assert table.count(line.m) == dec.level_visits[j]
