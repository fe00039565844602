"""Compiled hot loops: growth runs, batch sampling, exhaustive state checks.

Everything here must agree exactly with the pure reference layer in
srpat.core; the test suite pins that equivalence step by step.  All kernels
draw from the xoshiro256++ stream of (seed, replica) in the same order as
the reference implementations.
"""

from __future__ import annotations

import numpy as np
from numba import int64, njit, prange, uint64

from srpat.rng import next_u64, next_below, stream_state


@njit(cache=True)
def pick_k(r):
    """Smallest k >= 1 with k(k+1) > r; exact integer fixup of a sqrt guess."""
    k = int64((np.sqrt(4.0 * r + 1.0) - 1.0) / 2.0) + 1
    if k < 1:
        k = 1
    while k > 1 and (k - 1) * k > r:
        k -= 1
    while k * (k + 1) <= r:
        k += 1
    return k


@njit(cache=True)
def _draw_edge_age(s, t):
    """Edge index j in {1..t} with weight t+1-j, plus an endpoint coin."""
    n = int64(t) * int64(t + 1)
    r = next_below(s, n)
    k = pick_k(r)
    j = t + 1 - k
    own = next_u64(s) >> uint64(63)
    return j, own


@njit(cache=True)
def run_fast(t_max, seed, replica, tracked, grid, dense_vertex, dense_until):
    """O(1)-per-step growth run.

    Returns (parent, snap_deg, snap_theta, dense_deg, dense_theta,
    dense_indicator).  Snapshots are rows per tracked vertex at the grid
    times; theta of tracked vertices follows theta' = theta + degree' each
    step.  Dense per-step arrays cover state times [dense_vertex,
    dense_until] for that one vertex (empty when dense_vertex <= 0).
    """
    parent = np.zeros(t_max + 1, dtype=np.int32)
    return run_fast_into(parent, t_max, seed, replica, tracked, grid,
                         dense_vertex, dense_until)


@njit(cache=True)
def run_fast_into(parent, t_max, seed, replica, tracked, grid, dense_vertex,
                  dense_until):
    """run_fast writing into a caller-owned parent buffer (>= t_max + 1).

    Lets long benchmark series reuse one arena instead of paying an
    allocation plus page-fault pass per run.
    """
    s = stream_state(seed, replica)
    ntr = len(tracked)
    ng = len(grid)
    parent[1] = 0
    deg_tr = np.zeros(ntr, dtype=np.int64)
    th_tr = np.zeros(ntr, dtype=np.int64)
    snap_d = np.zeros((ntr, ng), dtype=np.int64)
    snap_th = np.zeros((ntr, ng), dtype=np.int64)

    dv = dense_vertex
    if dv > 0:
        nd = dense_until - dv + 1
        dense_d = np.zeros(nd, dtype=np.int64)
        dense_th = np.zeros(nd, dtype=np.int64)
        dense_ind = np.zeros(nd - 1 if nd > 1 else 0, dtype=np.int64)
    else:
        dense_d = np.zeros(0, dtype=np.int64)
        dense_th = np.zeros(0, dtype=np.int64)
        dense_ind = np.zeros(0, dtype=np.int64)
    dvd = int64(0)
    dvth = int64(0)

    for q in range(ntr):
        if tracked[q] == 1:
            deg_tr[q] = 1
            th_tr[q] = 1
    if dv == 1:
        dvd = 1
        dvth = 1
        dense_d[0] = 1
        dense_th[0] = 1

    g = 0
    while g < ng and grid[g] == 1:
        for q in range(ntr):
            snap_d[q, g] = deg_tr[q]
            snap_th[q, g] = th_tr[q]
        g += 1

    for t in range(1, t_max):
        j, own = _draw_edge_age(s, t)
        tgt = j if own else parent[j]
        parent[t + 1] = tgt
        tt = t + 1
        for q in range(ntr):
            i = tracked[q]
            if i == tt:
                deg_tr[q] = 1
                th_tr[q] = 1
            elif i < tt:
                if tgt == i:
                    deg_tr[q] += 1
                th_tr[q] += deg_tr[q]
        if dv > 0:
            if dv == tt:
                dvd = 1
                dvth = 1
            elif dv < tt:
                if tgt == dv:
                    dvd += 1
                dvth += dvd
            if dv <= t <= dense_until - 1:
                dense_ind[t - dv] = 1 if tgt == dv else 0
            if dv <= tt <= dense_until:
                dense_d[tt - dv] = dvd
                dense_th[tt - dv] = dvth
        while g < ng and grid[g] == tt:
            for q in range(ntr):
                snap_d[q, g] = deg_tr[q]
                snap_th[q, g] = th_tr[q]
            g += 1
    return parent, snap_d, snap_th, dense_d, dense_th, dense_ind


@njit(cache=True)
def run_naive(t_max, seed, replica, tracked, grid, verify):
    """O(t)-per-step oracle run with the full theta array maintained.

    With verify=True the exact identities (sum d = 2t, sum theta = t(t+1),
    theta >= degree, and theta equal to the edge-age sums recomputed from
    the parent array) are checked after every step.  Returns status 0 when
    clean, else a small code identifying the first breached invariant.
    """
    s = stream_state(seed, replica)
    ntr = len(tracked)
    ng = len(grid)
    parent = np.zeros(t_max + 1, dtype=np.int32)
    deg = np.zeros(t_max + 1, dtype=np.int64)
    th = np.zeros(t_max + 1, dtype=np.int64)
    age = np.zeros(t_max + 1, dtype=np.int64)
    snap_d = np.zeros((ntr, ng), dtype=np.int64)
    snap_th = np.zeros((ntr, ng), dtype=np.int64)
    deg[0] = 1
    deg[1] = 1
    th[0] = 1
    th[1] = 1

    g = 0
    while g < ng and grid[g] == 1:
        for q in range(ntr):
            if tracked[q] == 1:
                snap_d[q, g] = 1
                snap_th[q, g] = 1
        g += 1

    status = 0
    for t in range(1, t_max):
        n = int64(t) * int64(t + 1)
        r = next_below(s, n)
        acc = int64(0)
        tgt = t  # overwritten below; r < n guarantees a hit
        for i in range(t + 1):
            acc += th[i]
            if r < acc:
                tgt = i
                break
        for i in range(t + 1):
            th[i] += deg[i]
        th[tgt] += 1
        deg[tgt] += 1
        parent[t + 1] = tgt
        deg[t + 1] = 1
        th[t + 1] = 1
        tt = t + 1
        if verify and status == 0:
            sd = int64(0)
            sth = int64(0)
            for i in range(tt + 1):
                sd += deg[i]
                sth += th[i]
                if th[i] < deg[i]:
                    status = 4
            if sd != 2 * tt:
                status = 1
            if sth != int64(tt) * int64(tt + 1):
                status = 2
            for i in range(tt + 1):
                age[i] = 0
            for j in range(1, tt + 1):
                w = tt + 1 - j
                age[j] += w
                age[parent[j]] += w
            for i in range(tt + 1):
                if age[i] != th[i]:
                    status = 3
        while g < ng and grid[g] == tt:
            for q in range(ntr):
                i = tracked[q]
                if i <= tt:
                    snap_d[q, g] = deg[i]
                    snap_th[q, g] = th[i]
            g += 1
    return parent, deg, th, snap_d, snap_th, status


@njit(cache=True)
def sample_batch_fast(parent, t, seed, replica, n_draws):
    """Vertex counts of n_draws edge-age samples at a frozen state."""
    s = stream_state(seed, replica)
    counts = np.zeros(t + 1, dtype=np.int64)
    for _ in range(n_draws):
        j, own = _draw_edge_age(s, t)
        tgt = j if own else parent[j]
        counts[tgt] += 1
    return counts


@njit(cache=True)
def sample_batch_naive(theta, t, seed, replica, n_draws):
    """Vertex counts of n_draws cumulative-scan samples at a frozen state."""
    s = stream_state(seed, replica)
    n = int64(t) * int64(t + 1)
    counts = np.zeros(t + 1, dtype=np.int64)
    for _ in range(n_draws):
        r = next_below(s, n)
        acc = int64(0)
        for i in range(t + 1):
            acc += theta[i]
            if r < acc:
                counts[i] += 1
                break
    return counts


@njit(cache=True)
def _check_state(parent, th, age, t):
    """1 when the edge-age sums disagree with theta or miss t(t+1), else 0."""
    for i in range(t + 1):
        age[i] = 0
    for j in range(1, t + 1):
        w = t + 1 - j
        age[j] += w
        age[parent[j]] += w
    total = int64(0)
    for i in range(t + 1):
        total += age[i]
        if age[i] != th[i]:
            return 1
    if total != int64(t) * int64(t + 1):
        return 1
    return 0


@njit(cache=True)
def _apply_step(parent, deg, th, t, tgt):
    for i in range(t + 1):
        th[i] += deg[i]
    th[tgt] += 1
    deg[tgt] += 1
    parent[t + 1] = tgt
    deg[t + 1] = 1
    th[t + 1] = 1


@njit(cache=True)
def _undo_step(parent, deg, th, t):
    # t is the current time; reverts the step (t-1) -> t
    tgt = parent[t]
    deg[t] = 0
    th[t] = 0
    deg[tgt] -= 1
    th[tgt] -= 1
    for i in range(t):
        th[i] -= deg[i]


@njit(cache=True)
def _dfs_check(t_cap, first, states_at, count_floor):
    """DFS over all attachment sequences extending prefix `first`.

    Checks the edge-age identity at every visited state with time >=
    count_floor; returns (states checked, failures).  `states_at` bounds the
    arrays (t_cap + 1 slots).
    """
    parent = np.zeros(states_at, dtype=np.int64)
    deg = np.zeros(states_at, dtype=np.int64)
    th = np.zeros(states_at, dtype=np.int64)
    age = np.zeros(states_at, dtype=np.int64)
    choice = np.zeros(states_at + 1, dtype=np.int64)
    deg[0] = 1
    deg[1] = 1
    th[0] = 1
    th[1] = 1
    t = 1
    for m in range(len(first)):
        _apply_step(parent, deg, th, t, first[m])
        t += 1
    base = t
    states = int64(0)
    bad = int64(0)
    if t >= count_floor:
        states += 1
        bad += _check_state(parent, th, age, t)
    if t_cap == base:
        return states, bad
    choice[t] = 0
    while True:
        if t < t_cap and choice[t] <= t:
            tgt = choice[t]
            choice[t] += 1
            _apply_step(parent, deg, th, t, tgt)
            t += 1
            choice[t] = 0
            states += 1
            bad += _check_state(parent, th, age, t)
        else:
            if t == base:
                break
            _undo_step(parent, deg, th, t)
            t -= 1
    return states, bad


@njit(cache=True, parallel=True)
def exhaustive_edge_age_check(t_cap):
    """Exhaustively verify, for every reachable state with t <= t_cap, that
    the edge-age sampler's induced vertex weights equal the recursion-
    maintained theta (hence its distribution equals theta/(t(t+1)) exactly).

    Returns (number of states checked, number of failures).  The state count
    is sum over t of t!; work is split over the 24 attachment prefixes of
    depth 3 for parallelism.
    """
    # t = 1 root state
    states = int64(1)
    bad = int64(0)
    parent = np.zeros(2, dtype=np.int64)
    th = np.zeros(2, dtype=np.int64)
    age = np.zeros(2, dtype=np.int64)
    th[0] = 1
    th[1] = 1
    bad += _check_state(parent, th, age, 1)
    if t_cap <= 1:
        return states, bad
    if t_cap <= 4:
        s2, b2 = _dfs_check(t_cap, np.zeros(0, dtype=np.int64), t_cap + 1, 2)
        return states + s2, bad + b2
    # shallow states t in {2, 3, 4}, then 24 parallel subtrees from t = 4
    s2, b2 = _dfs_check(4, np.zeros(0, dtype=np.int64), t_cap + 1, 2)
    states += s2
    bad += b2
    results = np.zeros((24, 2), dtype=np.int64)
    for p in prange(24):
        first = np.empty(3, dtype=np.int64)
        first[0] = p % 2
        first[1] = (p // 2) % 3
        first[2] = p // 6
        s, b = _dfs_check(t_cap, first, t_cap + 1, 5)
        results[p, 0] = s
        results[p, 1] = b
    return states + results[:, 0].sum(), bad + results[:, 1].sum()
