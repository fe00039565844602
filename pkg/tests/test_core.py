"""Growth-process state, exact weights, and the two samplers."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from srpat import core, kernels
from srpat.rng import Xoshiro


def grow(t_max, seed=1, replica=0, sampler="naive", track_theta=True):
    state = core.init(track_theta=track_theta)
    rng = Xoshiro(seed, replica)
    while state.t < t_max:
        core.step(state, rng, sampler)
    return state


def test_init_matches_contract():
    st_ = core.init()
    assert st_.t == 1
    assert st_.degree == [1, 1]
    assert st_.theta == [1, 1]
    assert st_.parent[1] == 0
    assert sum(st_.theta) == 1 * 2
    assert core.attach_probabilities(st_) == [Fraction(1, 2), Fraction(1, 2)]


def apply_step_to(state, tgt):
    """Deterministic step application (bypasses sampling)."""
    for i in range(state.t + 1):
        state.theta[i] += state.degree[i]
    state.theta[tgt] += 1
    state.degree[tgt] += 1
    state.degree.append(1)
    state.theta.append(1)
    state.parent.append(tgt)
    state.t += 1
    return state


def test_one_step_to_root():
    st_ = apply_step_to(core.init(), 0)
    assert st_.degree == [2, 1, 1]
    assert st_.theta == [3, 2, 1]
    assert sum(st_.theta) == 2 * 3
    assert core.attach_probabilities(st_) == [
        Fraction(1, 2),
        Fraction(1, 3),
        Fraction(1, 6),
    ]


def test_theta_edge_age_identity_small():
    st_ = apply_step_to(core.init(), 0)
    bare = core.TreeState(st_.t, st_.parent, st_.degree, None)
    assert [core.theta_of(bare, i) for i in range(3)] == [3, 2, 1]
    assert core.theta_of(bare, 0) == (2 + 1 - 1) + (2 + 1 - 2)


def test_theta_of_bounds():
    st_ = core.init()
    with pytest.raises(IndexError):
        core.theta_of(st_, 2)


def test_naive_pick_cumulative_intervals():
    # theta [3,2,1]: r in [0,3) -> 0, [3,5) -> 1, [5,6) -> 2
    st_ = apply_step_to(core.init(), 0)

    class FixedR:
        def __init__(self, r):
            self.r = r

        def below(self, n):
            assert n == 6
            return self.r

    picks = [core.sample_target_naive(st_, FixedR(r)) for r in range(6)]
    assert picks == [0, 0, 0, 1, 1, 2]


def test_fast_sampler_induced_distribution_small():
    st_ = apply_step_to(core.init(), 0)
    induced = core.induced_fast_distribution(st_)
    assert induced == [Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)]
    assert induced == core.attach_probabilities(st_)


@settings(deadline=None, max_examples=60)
@given(r=st.integers(0, 2**62))
def test_smallest_k_bracket(r):
    k = core.smallest_k(r)
    assert k >= 1
    assert k * (k + 1) > r
    assert k == 1 or (k - 1) * k <= r
    assert k == kernels.pick_k(r)


def test_smallest_k_exhaustive_small_t():
    # every draw r < t(t+1) lands in {1..t} and has weight 2k
    for t in range(1, 65):
        counts = {}
        for r in range(t * (t + 1)):
            k = core.smallest_k(r)
            assert 1 <= k <= t
            counts[k] = counts.get(k, 0) + 1
        assert counts == {k: 2 * k for k in range(1, t + 1)}


def test_exhaustive_induced_distribution_python_oracle():
    """All reachable states to t = 7: sampler law == theta law, in Fractions."""

    def rec(state, depth):
        probs = core.attach_probabilities(state)
        induced = core.induced_fast_distribution(state)
        assert induced == probs
        assert sum(probs) == 1
        if depth == 0:
            return
        for tgt in range(state.t + 1):
            child = core.TreeState(
                state.t, list(state.parent), list(state.degree), list(state.theta)
            )
            apply_step_to(child, tgt)
            rec(child, depth - 1)

    rec(core.init(), 6)


@settings(deadline=None, max_examples=25)
@given(
    seed=st.integers(0, 2**32),
    t_max=st.integers(2, 60),
    sampler=st.sampled_from(["naive", "fast"]),
)
def test_invariants_along_random_runs(seed, t_max, sampler):
    state = core.init()
    rng = Xoshiro(seed)
    prev_deg = [1, 1]
    while state.t < t_max:
        core.step(state, rng, sampler)
        core.check_invariants(state)
        assert all(
            state.degree[i] >= prev_deg[i] for i in range(len(prev_deg))
        ), "degrees must be non-decreasing"
        prev_deg = list(state.degree)


def test_kernel_fast_equals_pure_python():
    cfg = core.SimConfig(t_max=500, tracked=[1, 2, 5], seed=987, sampler="fast")
    res = core.simulate(cfg, replica=3)
    state = grow(500, seed=987, replica=3, sampler="fast")
    bare = core.TreeState(state.t, state.parent, state.degree, None)
    for q, i in enumerate([1, 2, 5]):
        assert res.trajectories[q].degree[-1] == state.degree[i]
        assert res.trajectories[q].theta[-1] == core.theta_of(bare, i)
    assert list(res.degree_histogram) == list(np.bincount(state.degree))


def test_kernel_naive_equals_pure_python():
    cfg = core.SimConfig(t_max=300, tracked=[1, 2], seed=55, sampler="naive")
    res = core.simulate(cfg, replica=0)
    state = grow(300, seed=55, replica=0, sampler="naive")
    for q, i in enumerate([1, 2]):
        assert res.trajectories[q].degree[-1] == state.degree[i]
        assert res.trajectories[q].theta[-1] == state.theta[i]


def test_simulate_t_max_one():
    cfg = core.SimConfig(t_max=1, tracked=[1], seed=0)
    res = core.simulate(cfg)
    tr = res.trajectories[0]
    assert list(tr.t) == [1]
    assert list(tr.degree) == [1]
    assert list(tr.theta) == [1]
    assert list(tr.alpha) == [1.0]
    assert list(tr.alpha_star) == [1.0]


def test_simulate_deterministic_in_seed_replica():
    cfg = core.SimConfig(t_max=2000, tracked=[1], seed=3)
    a = core.simulate(cfg, replica=5)
    b = core.simulate(cfg, replica=5)
    assert np.array_equal(a.trajectories[0].degree, b.trajectories[0].degree)
    assert np.array_equal(a.degree_histogram, b.degree_histogram)
    c = core.simulate(cfg, replica=6)
    assert not np.array_equal(
        a.trajectories[0].theta, c.trajectories[0].theta
    ), "different replicas should explore different paths"


def test_trajectory_alpha_star_in_range():
    cfg = core.SimConfig(t_max=5000, tracked=[1, 7], seed=10)
    res = core.simulate(cfg)
    for tr in res.trajectories:
        assert np.all(tr.alpha_star <= 1.0 + 1e-15)
        assert np.all(tr.alpha_star >= 1.0 / tr.t)
        # alpha at the birth snapshot equals the vertex index
        assert tr.t[0] == tr.vertex
        assert tr.alpha[0] == float(tr.vertex)


def test_histogram_identities():
    cfg = core.SimConfig(t_max=4000, tracked=[1], seed=2)
    res = core.simulate(cfg)
    h = res.degree_histogram
    assert h.sum() == 4000 + 1
    assert (np.arange(len(h)) * h).sum() == 2 * 4000


def test_config_validation():
    with pytest.raises(ValueError):
        core.SimConfig(t_max=0)
    with pytest.raises(ValueError):
        core.SimConfig(t_max=10, tracked=[0])
    with pytest.raises(ValueError):
        core.SimConfig(t_max=10, tracked=[11])
    with pytest.raises(ValueError):
        core.SimConfig(t_max=10, tracked=[1, 1])
    with pytest.raises(ValueError):
        core.SimConfig(t_max=2 * 10**9 + 1)
    with pytest.raises(ValueError):
        core.SimConfig(t_max=core.NAIVE_T_MAX + 1, sampler="naive")
    with pytest.raises(ValueError):
        core.SimConfig(t_max=10, snapshot_grid=[2, 2, 10])
    with pytest.raises(ValueError):
        core.SimConfig(t_max=10, snapshot_grid=[2, 5])
    with pytest.raises(ValueError):
        core.SimConfig(t_max=10, replicas=0)


@settings(deadline=None, max_examples=40)
@given(
    t_max=st.integers(1, 10**6),
    tracked=st.lists(st.integers(1, 50), min_size=1, max_size=4, unique=True),
)
def test_default_grid_well_formed(t_max, tracked):
    tracked = [i for i in tracked if i <= t_max] or [min(tracked)]
    tracked = [min(i, t_max) for i in tracked]
    grid = core.default_snapshot_grid(t_max, sorted(set(tracked)))
    assert grid[-1] == t_max
    assert all(b > a for a, b in zip(grid, grid[1:]))
    assert grid[0] >= 1
    for i in set(tracked):
        assert i in grid


def test_dense_record_consistency():
    cfg = core.SimConfig(t_max=3000, tracked=[1], seed=77)
    res = core.simulate(cfg, dense_vertex=1, dense_until=3000)
    d = res.dense
    # dense arrays must agree with the snapshot trajectory at grid times
    tr = res.trajectories[0]
    for m, t in enumerate(tr.t):
        assert d.degree[t - d.t0] == tr.degree[m]
        assert d.theta[t - d.t0] == tr.theta[m]
    # increments follow the recursion d' = d + ind, theta' = theta + d'
    dd = np.diff(d.degree)
    assert np.array_equal(dd, d.indicator)
    assert np.array_equal(np.diff(d.theta), d.degree[1:])
