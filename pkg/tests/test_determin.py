"""Deterministic recursion: map, fixed points, crossover, mean-degree bounds."""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from srpat import determin
from srpat.constants import PHI, PSI
from srpat.core import default_snapshot_grid


def test_constants_identities():
    assert abs(PHI * PHI - PHI - 1.0) < 1e-15
    assert abs(PSI - (PHI - 1.0)) < 1e-15
    assert abs((PSI + 1.0) - 1.0 / PSI) < 1e-15


def test_map_values():
    assert determin.ratio_map(1, 1.0) == pytest.approx(1.2, abs=1e-15)
    assert determin.ratio_map(2, 2.0) == pytest.approx(21.0 / 13.0, abs=1e-15)


def test_fixed_point_values():
    assert determin.fixed_point(1) == pytest.approx(
        0.5 * (0.5 + math.sqrt(4.25)), abs=1e-15
    )
    for t in (1, 10, 1000, 10**6):
        x = determin.fixed_point(t)
        assert abs(determin.ratio_map(t, x) - x) < 1e-12


def test_fixed_points_increase_to_phi():
    xs = [determin.fixed_point(t) for t in range(1, 2000)]
    assert all(b > a for a, b in zip(xs, xs[1:]))
    assert all(x < PHI for x in xs)
    assert abs(determin.fixed_point(10**8) - PHI) < 1e-8


@settings(deadline=None, max_examples=30)
@given(t=st.sampled_from([1, 10, 1000]), x=st.floats(0.05, 4.0))
def test_map_increasing_concave(t, x):
    h = 1e-4
    f0 = determin.ratio_map(t, x)
    f1 = determin.ratio_map(t, x + h)
    f2 = determin.ratio_map(t, x + 2 * h)
    assert f1 > f0, "map must be strictly increasing"
    assert f2 - 2 * f1 + f0 < 0, "map must be strictly concave"


def test_beta_start_and_first_steps():
    bs = determin.beta_trajectory(1, 5)
    assert bs.beta[0] == 1.0
    assert bs.beta[1] == pytest.approx(1.2, abs=1e-15)
    assert bs.crossover == 1
    assert np.all(np.diff(bs.beta) > 0)
    bs2 = determin.beta_trajectory(2, 5)
    assert bs2.beta[0] == 2.0
    assert bs2.beta[1] == pytest.approx(21.0 / 13.0, abs=1e-15)
    assert bs2.beta[1] < bs2.beta[0], "a decreasing phase must exist for i >= 2"


def test_beta_iteration_matches_direct_map():
    bs = determin.beta_trajectory(3, 500)
    b = 3.0
    for m, t in enumerate(range(3, 501)):
        assert bs.beta[m] == pytest.approx(b, rel=1e-14)
        b = determin.ratio_map(t, b)


def test_beta_extended_precision_checkpoints():
    # double-precision iterates vs 50-digit arithmetic at ten checkpoints
    bs = determin.beta_trajectory(10, 1000)
    mp.mp.dps = 50
    b = mp.mpf(10)
    checkpoints = {}
    for t in range(10, 1001):
        checkpoints[t] = b
        b = (b * (t + 1) + 1) / (b + t + mp.mpf(1) / (t + 1))
    for t in range(100, 1001, 100):
        assert abs(bs.beta[t - 10] - float(checkpoints[t])) < 1e-12


def test_crossover_known_values():
    # frozen from two independent implementations (float64 increment form
    # and 30-digit mpmath direct map)
    assert determin.crossover_time(1) == 1
    assert determin.crossover_time(2) == 6
    assert determin.crossover_time(10) == 174
    assert determin.crossover_time(100) == 12161


def test_crossover_exceeds_start_for_i_ge_2():
    for i, T in determin.crossover(range(2, 40)):
        assert T > i


def test_crossover_cap_reported():
    with pytest.raises(RuntimeError):
        determin.crossover_time(50, cap=100)


def test_crossover_list_and_beta_agree():
    for i in (2, 5, 17):
        bs = determin.beta_trajectory(i, 2000)
        assert bs.crossover == determin.crossover_time(i)
        assert bs.sign_changes == 1
        m = int(np.argmin(bs.beta))
        assert bs.t[m] == bs.crossover, "series minimum sits at the crossover"


def test_beta_below_fixed_point_after_crossover():
    bs = determin.beta_trajectory(10, 10**5)
    after = bs.t > bs.crossover
    assert np.all(bs.beta[after] < bs.x[after])


def test_beta_stays_in_unit_to_t_band():
    for i in (1, 2, 13, 40):
        bs = determin.beta_trajectory(i, 5000)
        assert np.all(bs.beta >= 1.0)
        assert np.all(bs.beta <= bs.t)


def test_geometric_indices():
    idx = determin.geometric_indices(100)
    assert idx[0] == 1 and idx[-1] == 100
    assert all(b > a for a, b in zip(idx, idx[1:]))


def test_mean_degree_one_step():
    for i in (1, 4, 9):
        assert determin.mean_degree_exact(i, i + 1) == pytest.approx(
            1.0 + 1.0 / (i * (i + 1)), rel=1e-14
        )
    assert determin.mean_degree_exact(1, 2) == pytest.approx(1.5, rel=1e-14)


def test_mean_degree_empty_product():
    assert determin.mean_degree_exact(5, 5) == 1.0


def test_mean_degree_frozen_value():
    # frozen from the log-space product; cross-checked by Monte Carlo
    assert determin.mean_degree_exact(1, 10**4) == pytest.approx(
        286.7411638273033, rel=1e-10
    )


def test_upper_bound_at_base_and_asymptotics():
    for i in (1, 2, 7):
        assert determin.mean_degree_upper_bound(i, i) == pytest.approx(1.0, rel=1e-12)
    # bound(t)/t^psi approaches c_i
    i = 3
    c_i = math.exp(math.lgamma(i - PSI) - math.lgamma(i))
    for t in (10**4, 10**6):
        ratio = determin.mean_degree_upper_bound(i, t) / t**PSI
        assert ratio == pytest.approx(c_i, rel=5.0 / t)


def test_bound_dominates_mean_on_grid():
    grid = default_snapshot_grid(10**6, [1])
    for i in list(range(1, 11)) + [20, 35, 50]:
        mean = determin.mean_degree_series(i, 10**6)
        for t in grid:
            if t < i:
                continue
            assert mean[t - i] <= determin.mean_degree_upper_bound(i, t) * (1 + 1e-12)


def test_gamma_series():
    g = determin.gamma_lower_series(2, 10**5)
    assert g.gamma[0] == pytest.approx(3.0**-PSI, rel=1e-14)
    # eventually strictly increasing, with a definite turning index
    turn = g.turning_index
    after = g.t >= turn
    assert np.all(np.diff(g.gamma[after]) > 0)
    assert 0.0 < g.limit <= g.c_i


def test_rate_check_window():
    s1 = determin.beta_rate_check(1, 1000, 10**4)
    s2 = determin.beta_rate_check(1, 10**4, 10**6)
    assert 0.0 < s2 <= s1 * 1.05
    # the asymptotic constant phi/(2 phi - 1) is approached within a factor 5
    assert (PHI / (2 * PHI - 1)) / s1 < 5.0
    with pytest.raises(ValueError):
        determin.beta_rate_check(1, 1, 10)
