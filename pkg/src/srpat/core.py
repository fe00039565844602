"""Growth process of the self-reinforced preferential attachment tree.

State at time t: vertices v_0..v_t, edges e_1..e_t where e_j joined v_j to
parent[j].  Vertex weights are the cumulative degree sums
theta_t(i) = sum_{s<=t} d_s(i); the total weight is always t(t+1).

Two interchangeable attachment samplers:

* naive: O(t) cumulative scan over the maintained integer theta array
  (exact; exists as the oracle, capped at t_max = 1e5).
* fast: O(1) per step.  theta_t(i) equals the sum of (t+1-j) over edges e_j
  incident to i, because edge e_j contributes 1 to d_s(i) for every s >= j.
  Sampling a vertex with weight theta therefore factorizes as: pick edge
  index j with weight (t+1-j), then one of its two endpoints uniformly.

This module is the exact reference layer (Python ints, Fractions); the
compiled hot loops live in srpat.kernels and must agree with it exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Optional, Sequence

import numpy as np

from srpat import kernels
from srpat.rng import Xoshiro, as_seed as rng_seed

#: naive mode maintains O(t) state per step; total cost O(t^2)
NAIVE_T_MAX = 100_000
#: theta_max = t(t+1) must fit a 64-bit integer
FAST_T_MAX = 2_000_000_000

Sampler = Literal["naive", "fast"]


@dataclass
class TreeState:
    """Growing tree; `theta` is maintained only in naive mode."""

    t: int
    parent: list[int]  # parent[j] for 1 <= j <= t; parent[0] = -1
    degree: list[int]
    theta: Optional[list[int]]

    def total_weight(self) -> int:
        return self.t * (self.t + 1)


def init(track_theta: bool = True) -> TreeState:
    """State at t = 1: v_1 attached to v_0, both with degree 1."""
    return TreeState(
        t=1,
        parent=[-1, 0],
        degree=[1, 1],
        theta=[1, 1] if track_theta else None,
    )


def theta_of(state: TreeState, i: int) -> int:
    """Cumulative degree sum of vertex i, exact.

    Uses the maintained array when present, otherwise the edge-age identity
    theta_t(i) = sum over incident edges e_j of (t+1-j).  Both routes agree
    exactly on any reachable state.
    """
    if not 0 <= i <= state.t:
        raise IndexError(f"vertex {i} out of range at t={state.t}")
    if state.theta is not None:
        return state.theta[i]
    t = state.t
    total = 0
    if i >= 1:
        total += t + 1 - i  # the edge that brought i in
    for j in range(1, t + 1):
        if state.parent[j] == i:
            total += t + 1 - j
    return total


def attach_probabilities(state: TreeState) -> list[Fraction]:
    """Exact attachment distribution theta_t(i) / (t(t+1))."""
    n = state.total_weight()
    return [Fraction(theta_of(state, i), n) for i in range(state.t + 1)]


def induced_fast_distribution(state: TreeState) -> list[Fraction]:
    """Brute-force law of the edge-age sampler, by enumerating (edge, endpoint).

    Independent oracle for the fast sampler: edge e_j has probability
    2(t+1-j)/(t(t+1)), each endpoint then 1/2.
    """
    t = state.t
    n = state.total_weight()
    probs = [Fraction(0) for _ in range(t + 1)]
    for j in range(1, t + 1):
        w = Fraction(t + 1 - j, n)  # edge prob times 1/2, per endpoint
        probs[j] += w
        probs[state.parent[j]] += w
    return probs


def smallest_k(r: int) -> int:
    """Smallest k >= 1 with k(k+1) > r, for r >= 0.

    Float square-root initial guess corrected by exact integer steps, so the
    result is exact for all r < 2^63.
    """
    k = int((math.sqrt(4.0 * r + 1.0) - 1.0) / 2.0) + 1
    if k < 1:
        k = 1
    while k > 1 and (k - 1) * k > r:
        k -= 1
    while k * (k + 1) <= r:
        k += 1
    return k


def sample_target_naive(state: TreeState, rng: Xoshiro) -> int:
    """Draw vertex i with probability theta_t(i)/(t(t+1)), O(t) scan."""
    if state.theta is None:
        raise ValueError("naive sampling requires the maintained theta array")
    r = rng.below(state.total_weight())
    acc = 0
    for i, w in enumerate(state.theta):
        acc += w
        if r < acc:
            return i
    raise AssertionError("weights do not sum to t(t+1)")


def sample_target_fast(state: TreeState, rng: Xoshiro) -> int:
    """Draw a vertex via edge age: j with weight (t+1-j), endpoint uniform."""
    t = state.t
    r = rng.below(state.total_weight())
    k = smallest_k(r)  # k = t+1-j, distributed prop. to k on {1..t}
    j = t + 1 - k
    if rng.u64() >> 63:
        return j
    return state.parent[j]


def step(state: TreeState, rng: Xoshiro, sampler: Sampler = "naive") -> TreeState:
    """Attach v_{t+1}, update degrees (and theta if maintained) in place."""
    if sampler == "naive":
        tgt = sample_target_naive(state, rng)
    elif sampler == "fast":
        tgt = sample_target_fast(state, rng)
    else:
        raise ValueError(f"unknown sampler: {sampler}")
    if state.theta is not None:
        # theta_{t+1}(i) = theta_t(i) + d_t(i) + [i == target], old degrees
        for i in range(state.t + 1):
            state.theta[i] += state.degree[i]
        state.theta[tgt] += 1
        state.theta.append(1)
    state.degree[tgt] += 1
    state.degree.append(1)
    state.parent.append(tgt)
    state.t += 1
    return state


def check_invariants(state: TreeState) -> None:
    """Assert the exact integer identities; raises AssertionError on breach."""
    t = state.t
    assert len(state.degree) == t + 1
    assert sum(state.degree) == 2 * t, "degree sum must be 2t"
    assert all(d >= 1 for d in state.degree)
    assert all(0 <= state.parent[j] < j for j in range(1, t + 1))
    if state.theta is not None:
        assert sum(state.theta) == t * (t + 1), "theta sum must be t(t+1)"
        for i in range(t + 1):
            assert state.theta[i] >= state.degree[i]
            if i >= 1:
                assert state.theta[i] >= t - i + 1


def default_snapshot_grid(
    t_max: int, tracked: Sequence[int], ratio: float = 1.1
) -> list[int]:
    """Geometric grid (given ratio) from max(min tracked, 10), plus each
    tracked birth time and t_max.  Log-log fits want log-uniform spacing."""
    if ratio <= 1.0:
        raise ValueError("snapshot ratio must exceed 1")
    pts = {t_max}
    pts.update(i for i in tracked if i <= t_max)
    lo = max(min(tracked), 10) if tracked else 10
    x = float(min(lo, t_max))
    while x < t_max:
        pts.add(int(math.ceil(x)))
        x *= ratio
    return sorted(pts)


@dataclass
class SimConfig:
    """Full experiment configuration; a run is a pure function of it."""

    t_max: int
    tracked: list[int] = field(default_factory=lambda: [1])
    snapshot_grid: Optional[list[int]] = None
    sampler: Sampler = "fast"
    seed: int = 0
    replicas: int = 1

    def __post_init__(self) -> None:
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        if self.sampler not in ("naive", "fast"):
            raise ValueError(f"unknown sampler: {self.sampler}")
        if self.sampler == "naive" and self.t_max > NAIVE_T_MAX:
            raise ValueError(f"naive mode is capped at t_max = {NAIVE_T_MAX}")
        if self.t_max > FAST_T_MAX:
            raise ValueError(
                f"t_max {self.t_max} exceeds {FAST_T_MAX}: t(t+1) must fit 64 bits"
            )
        if not self.tracked:
            raise ValueError("need at least one tracked vertex")
        if any(i < 1 for i in self.tracked):
            raise ValueError("tracked indices must be >= 1")
        if any(i > self.t_max for i in self.tracked):
            raise ValueError("tracked indices must be <= t_max")
        if len(set(self.tracked)) != len(self.tracked):
            raise ValueError("tracked indices must be distinct")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if self.snapshot_grid is None:
            self.snapshot_grid = default_snapshot_grid(self.t_max, self.tracked)
        g = self.snapshot_grid
        if any(b <= a for a, b in zip(g, g[1:])) or g[-1] != self.t_max or g[0] < 1:
            raise ValueError("snapshot grid must be strictly increasing, end at t_max")


@dataclass
class Trajectory:
    """Snapshots (t, d_t, theta_t, alpha_t, alpha*_t) for one tracked vertex."""

    vertex: int
    t: np.ndarray
    degree: np.ndarray
    theta: np.ndarray
    alpha: np.ndarray
    alpha_star: np.ndarray


@dataclass
class DenseRecord:
    """Per-step record for one vertex: d_t, theta_t for t in [vertex, t_end],
    and the attachment indicator of each step t -> t+1."""

    vertex: int
    t0: int
    degree: np.ndarray
    theta: np.ndarray
    indicator: np.ndarray  # length len(degree) - 1


@dataclass
class ReplicaResult:
    replica: int
    trajectories: list[Trajectory]
    degree_histogram: Optional[np.ndarray]  # counts indexed by degree
    dense: Optional[DenseRecord] = None


def _histogram_from_parent(parent: np.ndarray, t: int) -> np.ndarray:
    children = np.bincount(parent[1 : t + 1].astype(np.int64), minlength=t + 1)
    children[1:] += 1  # every vertex except v_0 arrived with one edge
    return np.bincount(children)


def simulate(
    config: SimConfig,
    replica: int = 0,
    include_histogram: bool = True,
    dense_vertex: Optional[int] = None,
    dense_until: Optional[int] = None,
) -> ReplicaResult:
    """Run one replica to t_max; deterministic in (config.seed, replica).

    Snapshots are taken on config.snapshot_grid.  In fast mode theta of the
    tracked vertices is maintained incrementally (theta' = theta + degree'
    each step); dense per-step recording for one vertex is available for the
    stochastic-approximation analysis, capped at dense_until.
    """
    tracked = np.asarray(config.tracked, dtype=np.int64)
    grid = np.asarray(config.snapshot_grid, dtype=np.int64)
    dv = -1 if dense_vertex is None else int(dense_vertex)
    du = 0 if dense_until is None else min(int(dense_until), config.t_max)
    if dv > 0 and du < dv:
        raise ValueError("dense_until must be >= dense_vertex")
    seed = rng_seed(config.seed)

    if config.sampler == "fast":
        parent, snap_d, snap_th, dd, dth, dind = kernels.run_fast(
            config.t_max, seed, replica, tracked, grid, dv, du
        )
    else:
        if dv > 0:
            raise ValueError("dense recording is a fast-mode facility")
        parent, deg, th, snap_d, snap_th, status = kernels.run_naive(
            config.t_max, seed, replica, tracked, grid, True
        )
        if status != 0:
            raise AssertionError(f"naive-mode invariant breached (code {status})")
        dd = dth = dind = None

    trajectories = []
    for q, i in enumerate(config.tracked):
        mask = grid >= i
        ts = grid[mask].astype(np.int64)
        d = snap_d[q][mask]
        theta = snap_th[q][mask]
        alpha = ts * d / theta
        trajectories.append(
            Trajectory(
                vertex=i,
                t=ts,
                degree=d,
                theta=theta,
                alpha=alpha,
                alpha_star=1.0 / alpha,
            )
        )

    hist = _histogram_from_parent(parent, config.t_max) if include_histogram else None
    dense = None
    if dv > 0:
        dense = DenseRecord(vertex=dv, t0=dv, degree=dd, theta=dth, indicator=dind)
    return ReplicaResult(
        replica=replica, trajectories=trajectories, degree_histogram=hist, dense=dense
    )
