from collections import defaultdict
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from combwalk import (
    DuplicateLevel,
    EmptyConfig,
    InvalidProbability,
    Position,
    TooLargeForExact,
    exact_distribution,
    simulate_direct,
    step_direct,
    validate_config,
)
from combwalk.lattice import direct_checkpoint_ensemble, direct_endpoints
from combwalk.limit_stats import (
    chi_square_endpoint,
    chi_square_threshold,
    endpoint_counts,
)
from combwalk.rng import SeedSpec

config_pairs = st.lists(
    st.tuples(st.integers(-20, 20), st.floats(0.01, 0.49)),
    min_size=1,
    max_size=4,
    unique_by=lambda pair: pair[0],
)


def enumerate_distribution(config, n_steps):
    """Independent oracle: exact rational enumeration of the n-step law."""
    half = Fraction(1, 2)
    p_by_level = {ln.m: Fraction(ln.p) for ln in config.lines}
    dist = {(0, 0): Fraction(1)}
    for _ in range(n_steps):
        new = defaultdict(Fraction)
        for (x, y), pr in dist.items():
            p = p_by_level.get(y)
            if p is None:
                new[(x, y + 1)] += pr * half
                new[(x, y - 1)] += pr * half
            else:
                q = half - p
                new[(x, y + 1)] += pr * p
                new[(x, y - 1)] += pr * p
                new[(x + 1, y)] += pr * q
                new[(x - 1, y)] += pr * q
        dist = dict(new)
    return dist


class TestValidateConfig:
    def test_classical_comb(self):
        config = validate_config([(0, 0.25)])
        assert config.k == 1
        assert config.lines[0].alpha == 0.5

    def test_duplicate_level(self):
        with pytest.raises(DuplicateLevel):
            validate_config([(3, 0.25), (3, 0.1)])

    def test_sorted_and_alpha(self):
        config = validate_config([(5, 0.4), (-2, 0.1)])
        assert config.k == 2
        assert [ln.m for ln in config.lines] == [-2, 5]
        assert np.allclose(config.alphas, [0.2, 0.8])

    def test_empty(self):
        with pytest.raises(EmptyConfig):
            validate_config([])

    @pytest.mark.parametrize("p", [0.0, 0.5, -0.1, 0.7, 1.0])
    def test_invalid_probability(self, p):
        with pytest.raises(InvalidProbability):
            validate_config([(0, p)])

    @given(config_pairs)
    def test_valid_pairs_accepted_and_sorted(self, pairs):
        config = validate_config(pairs)
        ms = [ln.m for ln in config.lines]
        assert ms == sorted(ms)
        assert config.k == len(pairs)
        for ln in config.lines:
            assert ln.alpha == 2.0 * ln.p


class TestStepDirect:
    def test_off_line_down(self, comb):
        assert step_direct(Position(3, 5), comb, 0.7) == Position(3, 4)

    def test_off_line_up(self, comb):
        assert step_direct(Position(3, 5), comb, 0.2) == Position(3, 6)

    def test_on_line_third_interval(self, comb):
        assert step_direct(Position(0, 0), comb, 0.6) == Position(1, 0)

    def test_on_line_first_interval(self, comb):
        assert step_direct(Position(0, 0), comb, 0.0) == Position(0, 1)

    def test_on_line_interval_layout(self, comb):
        # [0, p) up, [p, 2p) down, [2p, 1/2+p) right, [1/2+p, 1) left
        assert step_direct(Position(0, 0), comb, 0.25) == Position(0, -1)
        assert step_direct(Position(0, 0), comb, 0.49) == Position(0, -1)
        assert step_direct(Position(0, 0), comb, 0.5) == Position(1, 0)
        assert step_direct(Position(0, 0), comb, 0.75) == Position(-1, 0)
        assert step_direct(Position(0, 0), comb, 0.999) == Position(-1, 0)

    @given(config_pairs, st.floats(0.0, 1.0, exclude_max=True), st.integers(-5, 5), st.integers(-25, 25))
    def test_total_function_unit_step(self, pairs, u, x, y):
        config = validate_config(pairs)
        nxt = step_direct(Position(x, y), config, u)
        dx, dy = nxt.x - x, nxt.y - y
        assert abs(dx) + abs(dy) == 1
        if dx != 0:
            assert config.line_p(y) is not None

    @given(config_pairs)
    def test_interval_partition_tiles_unit(self, pairs):
        # exact rational check that the four on-line branch lengths sum to 1
        config = validate_config(pairs)
        for ln in config.lines:
            p = Fraction(ln.p)
            lengths = [p, p, Fraction(1, 2) - p, Fraction(1, 2) - p]
            assert sum(lengths) == 1


class TestSimulateDirect:
    def test_zero_steps(self, comb):
        traj = simulate_direct(comb, 0, SeedSpec(1), "full")
        assert traj.positions.tolist() == [[0, 0]]
        assert traj.endpoint == Position(0, 0)

    def test_one_step_support(self, comb):
        seen = set()
        for s in range(64):
            seen.add(simulate_direct(comb, 1, SeedSpec(s)).endpoint)
        assert seen == {Position(0, 1), Position(0, -1), Position(1, 0), Position(-1, 0)}

    def test_deterministic(self, two_line):
        a = simulate_direct(two_line, 500, SeedSpec(7, 3), "full")
        b = simulate_direct(two_line, 500, SeedSpec(7, 3), "full")
        assert np.array_equal(a.positions, b.positions)

    def test_record_modes_subsample_same_path(self, two_line):
        seed = SeedSpec(11, 2)
        full = simulate_direct(two_line, 200, seed, "full")
        endpoint = simulate_direct(two_line, 200, seed)
        checkpoints = simulate_direct(two_line, 200, seed, [0, 50, 200])
        assert endpoint.endpoint == full.endpoint
        assert np.array_equal(checkpoints.positions, full.positions[[0, 50, 200]])

    def test_full_mode_steps_are_unit(self, three_line):
        traj = simulate_direct(three_line, 1000, SeedSpec(3), "full")
        diffs = np.diff(traj.positions, axis=0)
        assert np.all(np.abs(diffs).sum(axis=1) == 1)

    def test_x_changes_only_on_lines(self, three_line):
        # every x-changing step departs from a configured level
        levels = set(int(m) for m in three_line.levels)
        rng_paths = 100
        for i in range(rng_paths):
            traj = simulate_direct(three_line, 1000, SeedSpec(40, i), "full")
            diffs = np.diff(traj.positions, axis=0)
            moving_x = diffs[:, 0] != 0
            from_y = traj.positions[:-1, 1][moving_x]
            assert all(int(y) in levels for y in from_y)

    def test_parity(self, config_matrix):
        for config in config_matrix:
            for n in (5, 12, 33):
                end = simulate_direct(config, n, SeedSpec(n)).endpoint
                assert (end.x + end.y - n) % 2 == 0

    def test_endpoint_ensemble_matches_single_runs(self, comb):
        xy = direct_endpoints(comb, 50, SeedSpec(9, 100), 20)
        for i in range(20):
            end = simulate_direct(comb, 50, SeedSpec(9, 100 + i)).endpoint
            assert (xy[i, 0], xy[i, 1]) == (end.x, end.y)

    def test_checkpoint_ensemble_max_abs_y(self, comb):
        chk = np.array([10, 100])
        xy, max_abs = direct_checkpoint_ensemble(comb, chk, SeedSpec(77), 10)
        for i in range(10):
            full = simulate_direct(comb, 100, SeedSpec(77, i), "full").positions
            assert max_abs[i, 0] == np.abs(full[: 10 + 1, 1]).max()
            assert max_abs[i, 1] == np.abs(full[:, 1]).max()
            assert np.array_equal(xy[i, 1], full[100])


class TestExactDistribution:
    def test_one_step_classical(self, comb):
        table = exact_distribution(comb, 1)
        assert len(table.entries) == 4
        for pos in [(0, 1), (0, -1), (1, 0), (-1, 0)]:
            assert table.probability(Position(*pos)) == pytest.approx(0.25, abs=1e-15)

    def test_zero_steps(self, two_line):
        table = exact_distribution(two_line, 0)
        assert table.entries == {Position(0, 0): 1.0}

    def test_two_step_return_probability(self, comb):
        # frozen from the rational enumeration oracle: two off-line
        # reversals via (0, +-1) contribute (1/4)(1/2) each, two on-line
        # reversals via (+-1, 0) contribute (1/4)(1/4) each, total 3/8
        table = exact_distribution(comb, 2)
        oracle = enumerate_distribution(comb, 2)
        assert oracle[(0, 0)] == Fraction(3, 8)
        assert table.probability(Position(0, 0)) == pytest.approx(0.375, abs=1e-12)
        # remaining mass sits on the L1-sphere of radius 2
        off_origin = {pos: p for pos, p in table.entries.items() if pos != (0, 0)}
        assert all(abs(pos.x) + abs(pos.y) == 2 for pos in off_origin)
        assert sum(off_origin.values()) == pytest.approx(0.625, abs=1e-12)
        total = sum(table.entries.values())
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_against_enumeration_oracle(self, config_matrix):
        for config in config_matrix:
            for n in (1, 2, 3, 6):
                table = exact_distribution(config, n)
                oracle = enumerate_distribution(config, n)
                assert set(table.entries) == {Position(*k) for k in oracle}
                for pos, prob in oracle.items():
                    assert table.probability(Position(*pos)) == pytest.approx(
                        float(prob), abs=1e-12
                    )

    def test_limit_raised(self, comb):
        with pytest.raises(TooLargeForExact):
            exact_distribution(comb, 65)
        exact_distribution(comb, 64)  # boundary accepted

    @given(config_pairs, st.integers(0, 12))
    def test_mass_support_parity(self, pairs, n):
        config = validate_config(pairs)
        table = exact_distribution(config, n)
        assert table.total_mass() == pytest.approx(1.0, abs=1e-12)
        for pos in table.entries:
            assert abs(pos.x) + abs(pos.y) <= n
            assert (pos.x + pos.y - n) % 2 == 0


class TestMonteCarloAgreement:
    def test_direct_sampler_matches_exact(self, two_line):
        # chi-square below the 0.999 quantile at M = 1e5, N = 12
        table = exact_distribution(two_line, 12)
        xy = direct_endpoints(two_line, 12, SeedSpec(314), 100_000)
        stat, dof = chi_square_endpoint(endpoint_counts(xy), table)
        assert stat < chi_square_threshold(dof, 0.999)
