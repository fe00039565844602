"""Classical preferential attachment tree with shift delta (PAT).

Attachment probability (d_i(t) + delta)/(2t + delta(t+1)), delta > -1.
Degrees grow like t^{1/(2+delta)}, so delta = 0 gives exponent 1/2 and
delta = phi - 2 matches the self-reinforced tree's exponent 1/phi.

Weights d_i + delta live in a Fenwick (binary indexed) prefix-sum tree:
O(log t) update and inverse-CDF sampling.  Only the chosen vertex and the
new vertex change weight per step.  The sampling normalisation uses the
closed form 2t + delta(t+1) rather than the accumulated tree total, which
bounds float drift; the drift itself is monitored and returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numba import float64, int64, njit

from srpat.rng import as_seed, next_double, stream_state


@njit(cache=True)
def _fw_add(tree, pos, delta):
    # tree is 1-indexed; len(tree) - 1 is a power of two
    n = len(tree) - 1
    while pos <= n:
        tree[pos] += delta
        pos += pos & (-pos)


@njit(cache=True)
def _fw_total(tree):
    n = len(tree) - 1
    total = 0.0
    pos = n
    while pos > 0:
        total += tree[pos]
        pos -= pos & (-pos)
    return total


@njit(cache=True)
def _fw_search(tree, target):
    """Largest pos with cumsum(pos) <= target; the hit position is pos + 1.

    Returned as a 0-based vertex index (position p holds vertex p - 1).
    Caller clamps: target at or beyond the total can fall off the end by
    one ulp, an event of measure ~2^-53 per draw.
    """
    n = len(tree) - 1
    pos = 0
    bit = n
    rem = target
    while bit > 0:
        nxt = pos + bit
        if nxt <= n and tree[nxt] <= rem:
            pos = nxt
            rem -= tree[nxt]
        bit >>= 1
    return pos


@njit(cache=True)
def run_pat(t_max, delta, seed, replica, tracked, grid):
    """Grow PAT(delta) to t_max, recording tracked degrees at grid times.

    Returns (deg, snap_deg, max_drift) where max_drift is the largest
    absolute difference between the Fenwick total and the closed form
    2t + delta(t+1), relative to the total.
    """
    s = stream_state(seed, replica)
    size = 1
    while size < t_max + 1:
        size <<= 1
    tree = np.zeros(size + 1, dtype=np.float64)
    deg = np.zeros(t_max + 1, dtype=np.int64)
    ntr = len(tracked)
    ng = len(grid)
    snap_d = np.zeros((ntr, ng), dtype=np.int64)

    w0 = 1.0 + delta
    _fw_add(tree, 1, w0)
    _fw_add(tree, 2, w0)
    deg[0] = 1
    deg[1] = 1

    g = 0
    while g < ng and grid[g] == 1:
        for q in range(ntr):
            if tracked[q] == 1:
                snap_d[q, g] = 1
        g += 1

    max_drift = 0.0
    for t in range(1, t_max):
        total = 2.0 * t + delta * (t + 1.0)
        drift = abs(_fw_total(tree) - total) / total
        if drift > max_drift:
            max_drift = drift
        u = next_double(s)
        i = _fw_search(tree, u * total)
        if i > t:
            i = t
        _fw_add(tree, i + 1, 1.0)
        deg[i] += 1
        _fw_add(tree, t + 2, w0)
        deg[t + 1] = 1
        tt = t + 1
        while g < ng and grid[g] == tt:
            for q in range(ntr):
                if tracked[q] <= tt:
                    snap_d[q, g] = deg[tracked[q]]
            g += 1
    return deg, snap_d, max_drift


@njit(cache=True)
def fenwick_exhaustive_check(t):
    """Probe every degree vector (d_0..d_t), d_i >= 1, sum 2t, at delta = 0.

    The Fenwick sampler's state is exactly the degree vector, so this
    covers every distinguishable reachable state at time t (and more).  For
    each vector the inverse-CDF search is probed at each vertex's interval
    boundaries and midpoint; all cumulative sums are integer-valued doubles,
    hence exact.  Returns (states, failures).
    """
    m = t + 1
    excess = t - 1  # sum d = 2t with all parts >= 1
    x = np.zeros(m, dtype=np.int64)
    x[0] = excess
    size = 1
    while size < m:
        size <<= 1
    states = int64(0)
    bad = int64(0)
    tree = np.zeros(size + 1, dtype=np.float64)
    while True:
        for p in range(size + 1):
            tree[p] = 0.0
        for i in range(m):
            _fw_add(tree, i + 1, 1.0 + x[i])
        cum = 0.0
        ok = True
        for i in range(m):
            w = 1.0 + x[i]
            if _fw_search(tree, cum) != i:
                ok = False
            if _fw_search(tree, cum + 0.5) != i:
                ok = False
            if _fw_search(tree, cum + w - 0.5) != i:
                ok = False
            cum += w
        if cum != 2.0 * t:
            ok = False
        states += 1
        if not ok:
            bad += 1
        if x[m - 1] == excess:
            break
        k = 0
        while x[k] == 0:
            k += 1
        v = x[k]
        x[k] = 0
        x[0] = v - 1
        x[k + 1] += 1
    return states, bad


@dataclass
class PatState:
    """Reference state for small-scale checks; weights d_i + delta."""

    t: int
    degree: list[int]
    delta: float

    def weights(self) -> list[float]:
        return [d + self.delta for d in self.degree]

    def total_weight(self) -> float:
        return 2.0 * self.t + self.delta * (self.t + 1)


def pat_init(delta: float) -> PatState:
    if delta <= -1.0:
        raise ValueError(f"delta must exceed -1, got {delta}")
    return PatState(t=1, degree=[1, 1], delta=delta)


def pat_probabilities(state: PatState) -> list[float]:
    z = state.total_weight()
    return [w / z for w in state.weights()]


def pat_step(state: PatState, rng) -> PatState:
    """Reference O(t) step; the Fenwick kernel is the scaled twin."""
    u = rng.random()
    target = u * state.total_weight()
    acc = 0.0
    chosen = state.t
    for i, w in enumerate(state.weights()):
        acc += w
        if target < acc:
            chosen = i
            break
    state.degree[chosen] += 1
    state.degree.append(1)
    state.t += 1
    return state


@dataclass
class PatTrajectory:
    vertex: int
    t: np.ndarray
    degree: np.ndarray


@dataclass
class PatResult:
    replica: int
    trajectories: list[PatTrajectory]
    degree_histogram: Optional[np.ndarray]
    max_drift: float


def pat_simulate(
    t_max: int,
    delta: float,
    tracked: Sequence[int],
    seed: int,
    replica: int = 0,
    snapshot_grid: Optional[Sequence[int]] = None,
    include_histogram: bool = True,
) -> PatResult:
    """One PAT(delta) replica; deterministic in (seed, replica)."""
    if delta <= -1.0:
        raise ValueError(f"delta must exceed -1, got {delta}")
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    from srpat.core import default_snapshot_grid

    if snapshot_grid is None:
        snapshot_grid = default_snapshot_grid(t_max, list(tracked))
    tr = np.asarray(list(tracked), dtype=np.int64)
    grid = np.asarray(list(snapshot_grid), dtype=np.int64)
    deg, snap_d, max_drift = run_pat(
        t_max, float(delta), as_seed(seed), replica, tr, grid
    )
    trajectories = []
    for q, i in enumerate(tracked):
        mask = grid >= i
        trajectories.append(
            PatTrajectory(vertex=i, t=grid[mask].astype(np.int64), degree=snap_d[q][mask])
        )
    hist = np.bincount(deg) if include_histogram else None
    return PatResult(
        replica=replica,
        trajectories=trajectories,
        degree_histogram=hist,
        max_drift=max_drift,
    )
