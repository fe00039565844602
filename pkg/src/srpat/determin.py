"""Exact deterministic analysis of the mean recursion.

The annealed degree/weight ratio beta_t = t E[d_t]/E[theta_t] obeys
beta_{t+1} = F_t(beta_t) with

    F_t(x) = (x(t+1) + 1) / (x + t + 1/(t+1)),

whose fixed point x_t = (r + sqrt(r^2 + 4))/2, r = t/(t+1), increases to
the golden ratio phi.  Starting from beta_i = i the series dips below, then
climbs back: strictly decreasing before the crossover time T(i), strictly
increasing after, with limit phi.

The increment sign is computed through g_t(x) = 1 + x t/(t+1) - x^2
(F_t(x) - x = g_t(x)/denominator with positive denominator), which avoids
subtracting two nearby map values.

The mean degree follows exactly from the same recursion:
E[d_{t+1}] = E[d_t] (1 + 1/((t+1) beta_t)), accumulated in log space, and
is dominated by the Gamma-quotient bound c_i Gamma(t)/Gamma(t - psi) with
c_i = Gamma(i - psi)/Gamma(i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from srpat.constants import PHI, PSI

#: default iteration cap when hunting for a crossover
CROSSOVER_CAP = 1_000_000_000


def ratio_map(t: int, x: float) -> float:
    """F_t(x) = (x(t+1)+1)/(x + t + 1/(t+1)), defined for t >= 1, x > 0."""
    return (x * (t + 1.0) + 1.0) / (x + t + 1.0 / (t + 1.0))


def fixed_point(t: int) -> float:
    """Positive root x_t of x^2 - (t/(t+1)) x - 1 = 0."""
    r = t / (t + 1.0)
    return 0.5 * (r + math.sqrt(r * r + 4.0))


@njit(cache=True)
def _increment(b, t):
    """(numerator g, denominator) of F_t(b) - b; denominator > 0."""
    g = 1.0 + b * (t / (t + 1.0)) - b * b
    return g, b + t + 1.0 / (t + 1.0)


@njit(cache=True)
def _crossover(i, cap):
    """(T, ties): first t with a strictly positive increment, and the number
    of exactly-zero float increments seen before it (sub-ulp plateaus)."""
    b = float(i)
    ties = 0
    for t in range(i, cap):
        g, den = _increment(b, t)
        if g > 0.0:
            return t, ties
        if g == 0.0:
            ties += 1
        b += g / den
    return -1, ties


@njit(cache=True, parallel=True)
def _crossover_many(idx, cap):
    out = np.empty(len(idx), dtype=np.int64)
    ties = np.empty(len(idx), dtype=np.int64)
    for q in prange(len(idx)):
        t, k = _crossover(idx[q], cap)
        out[q] = t
        ties[q] = k
    return out, ties


@njit(cache=True)
def _beta_fill(i, t_max, beta, x):
    """Fill beta_t and x_t for t = i..t_max; returns (T, sign_changes, ties)."""
    b = float(i)
    T = -1
    changes = 0
    last = 0
    ties = 0
    for m in range(t_max - i + 1):
        t = i + m
        r = t / (t + 1.0)
        beta[m] = b
        x[m] = 0.5 * (r + np.sqrt(r * r + 4.0))
        if t == t_max:
            break
        g, den = _increment(b, t)
        s = 1 if g > 0.0 else (-1 if g < 0.0 else 0)
        if s == 0:
            ties += 1
        else:
            if last != 0 and s != last:
                changes += 1
            last = s
        if T < 0 and g > 0.0:
            T = t
        b += g / den
    return T, changes, ties


@njit(cache=True)
def _beta_scan(i, t_max, w1_lo, w1_hi, w2_lo, w2_hi):
    """Iterate without storing; returns (T, sign_changes, ties, beta_end,
    sup over [w1_lo, w1_hi] and [w2_lo, w2_hi] of (t/log t)|beta_t - phi|)."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    b = float(i)
    T = -1
    changes = 0
    last = 0
    ties = 0
    sup1 = 0.0
    sup2 = 0.0
    for t in range(i, t_max):
        if w1_lo <= t <= w1_hi:
            v = (t / np.log(t)) * abs(b - phi)
            if v > sup1:
                sup1 = v
        if w2_lo <= t <= w2_hi:
            v = (t / np.log(t)) * abs(b - phi)
            if v > sup2:
                sup2 = v
        g, den = _increment(b, t)
        s = 1 if g > 0.0 else (-1 if g < 0.0 else 0)
        if s == 0:
            ties += 1
        else:
            if last != 0 and s != last:
                changes += 1
            last = s
        if T < 0 and g > 0.0:
            T = t
        b += g / den
    t = t_max
    if w1_lo <= t <= w1_hi:
        v = (t / np.log(t)) * abs(b - phi)
        if v > sup1:
            sup1 = v
    if w2_lo <= t <= w2_hi:
        v = (t / np.log(t)) * abs(b - phi)
        if v > sup2:
            sup2 = v
    return T, changes, ties, b, sup1, sup2


@njit(cache=True)
def _mean_series(i, t_max, out):
    """Fill out[m] = E[d_{i+m}] for m = 0..t_max-i (log-space product)."""
    b = float(i)
    acc = 0.0
    out[0] = 1.0
    for t in range(i, t_max):
        acc += np.log1p(1.0 / ((t + 1.0) * b))
        out[t - i + 1] = np.exp(acc)
        g, den = _increment(b, t)
        b += g / den


@dataclass
class BetaSeries:
    """Deterministic mean-recursion output for one start vertex."""

    i: int
    t: np.ndarray
    beta: np.ndarray
    x: np.ndarray
    crossover: int
    sign_changes: int
    ties: int


def beta_trajectory(i: int, t_max: int) -> BetaSeries:
    """Iterate beta from beta_i = i up to t_max, recording x_t alongside."""
    if i < 1:
        raise ValueError("start vertex must be >= 1")
    if t_max < i:
        raise ValueError("t_max must be >= i")
    n = t_max - i + 1
    beta = np.empty(n)
    x = np.empty(n)
    T, changes, ties = _beta_fill(i, t_max, beta, x)
    return BetaSeries(
        i=i,
        t=np.arange(i, t_max + 1, dtype=np.int64),
        beta=beta,
        x=x,
        crossover=int(T),
        sign_changes=int(changes),
        ties=int(ties),
    )


def crossover_time(i: int, cap: int = CROSSOVER_CAP) -> int:
    """T(i) = min{t >= i : beta_{t+1} > beta_t}.

    Exactly-zero float increments (possible sub-ulp plateaus near the turn)
    do not terminate the search; they are counted and surfaced through
    `crossover`.  Raises if the cap is hit, rather than guessing.
    """
    T, _ = _crossover(i, cap)
    if T < 0:
        raise RuntimeError(f"no crossover for i={i} within {cap} iterations")
    return int(T)


def crossover(i_list, cap: int = CROSSOVER_CAP) -> list[tuple[int, int]]:
    """(i, T(i)) pairs; parallel over the inputs."""
    idx = np.asarray(list(i_list), dtype=np.int64)
    if len(idx) == 0:
        return []
    if idx.min() < 1:
        raise ValueError("start vertices must be >= 1")
    out, _ties = _crossover_many(idx, cap)
    if (out < 0).any():
        missing = idx[out < 0]
        raise RuntimeError(f"no crossover within {cap} iterations for i={missing}")
    return [(int(a), int(b)) for a, b in zip(idx, out)]


def geometric_indices(i_max: int, ratio: float = 1.2) -> list[int]:
    """Geometric grid of start vertices in [1, i_max], endpoints included."""
    if i_max < 1:
        raise ValueError("i_max must be >= 1")
    pts = {1, i_max}
    x = 1.0
    while x < i_max:
        pts.add(int(round(x)))
        x *= ratio
    return sorted(p for p in pts if 1 <= p <= i_max)


def beta_rate_check(i: int, t_min: int, t_max: int) -> float:
    """sup over [t_min, t_max] of (t/log t)|beta_t - phi|.

    Intended for windows past the crossover (bounded there because
    |beta_t - phi| = O(log t / t)); the sup itself is well defined on any
    window with t_min >= 2.
    """
    if t_min < 2 or t_max < t_min:
        raise ValueError("need 2 <= t_min <= t_max")
    _, _, _, _, _, sup = _beta_scan(i, t_max, 0, -1, t_min, t_max)
    return float(sup)


def mean_degree_series(i: int, t_max: int) -> np.ndarray:
    """E[d_t(i)] for t = i..t_max: product of (1 + 1/((s+1) beta_s))."""
    if i < 1 or t_max < i:
        raise ValueError("need t_max >= i >= 1")
    out = np.empty(t_max - i + 1)
    _mean_series(i, t_max, out)
    return out


def mean_degree_exact(i: int, t: int) -> float:
    """E[d_t(i)], exact mean implied by the one-step conditional recursion."""
    return float(mean_degree_series(i, t)[-1])


def mean_degree_upper_bound(i: int, t: int) -> float:
    """c_i Gamma(t)/Gamma(t - psi) with c_i = Gamma(i - psi)/Gamma(i).

    Equals 1 at t = i and scales like c_i t^psi; dominates the exact mean
    for every t >= i.
    """
    if not 1 <= i <= t:
        raise ValueError("need t >= i >= 1")
    return math.exp(
        math.lgamma(i - PSI) - math.lgamma(i) + math.lgamma(t) - math.lgamma(t - PSI)
    )


@dataclass
class GammaSeries:
    """gamma_t = E[d_t]/(t+1)^psi: the normalised mean-degree series."""

    i: int
    t: np.ndarray
    gamma: np.ndarray
    turning_index: int  # first t after which the series only increases
    limit: float  # last computed value
    c_i: float  # Gamma-quotient ceiling


def gamma_lower_series(i: int, t_max: int) -> GammaSeries:
    """Normalised mean degree; eventually strictly increasing with a
    positive limit below c_i."""
    mean = mean_degree_series(i, t_max)
    t = np.arange(i, t_max + 1, dtype=np.int64)
    gamma = mean / (t + 1.0) ** PSI
    d = np.diff(gamma)
    dec = np.nonzero(d <= 0.0)[0]
    turning = int(t[dec[-1] + 1]) if len(dec) else int(t[0])
    return GammaSeries(
        i=i,
        t=t,
        gamma=gamma,
        turning_index=turning,
        limit=float(gamma[-1]),
        c_i=math.exp(math.lgamma(i - PSI) - math.lgamma(i)),
    )
