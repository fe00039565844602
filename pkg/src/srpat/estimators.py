"""Statistical estimation on simulation output.

Growth-exponent fits (log d_t vs log t least squares, per replica, then
averaged), endpoint estimates eps_i = d_{t_max}/t_max^psi of the degree
prefactor, |alpha - phi| convergence summaries, and the degree histogram
with an exploratory tail-exponent fit on the complementary cumulative
counts.  Everything here is a deterministic function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from srpat.constants import PHI, PSI


@dataclass
class FitResult:
    vertex: int
    slope: float
    intercept: float
    stderr: float
    t_lo: int
    t_hi: int
    replicas: int


def fit_exponent(
    vertex: int,
    runs: Sequence[tuple[np.ndarray, np.ndarray]],
    t_lo: int,
    t_hi: int,
) -> FitResult:
    """Least-squares slope of log d_t vs log t inside [t_lo, t_hi].

    `runs` holds (t, degree) arrays, one pair per replica; each replica is
    fitted separately and the slopes averaged.  Requires at least five
    snapshots in the window and positive degrees.
    """
    slopes = []
    intercepts = []
    for t, d in runs:
        mask = (t >= t_lo) & (t <= t_hi)
        if mask.sum() < 5:
            raise ValueError(
                f"degenerate window [{t_lo}, {t_hi}]: {int(mask.sum())} snapshots < 5"
            )
        if (d[mask] < 1).any():
            raise ValueError("degrees must be >= 1")
        s, c = np.polyfit(np.log(t[mask]), np.log(d[mask].astype(np.float64)), 1)
        slopes.append(s)
        intercepts.append(c)
    slopes = np.asarray(slopes)
    r = len(slopes)
    stderr = float(slopes.std(ddof=1) / math.sqrt(r)) if r > 1 else 0.0
    return FitResult(
        vertex=vertex,
        slope=float(slopes.mean()),
        intercept=float(np.mean(intercepts)),
        stderr=stderr,
        t_lo=t_lo,
        t_hi=t_hi,
        replicas=r,
    )


@dataclass
class EpsilonEstimate:
    vertex: int
    mean: float  # mean of d_{t_max}/t_max^psi across replicas
    stderr: float
    scaled: float  # i^psi * mean
    scaled_stderr: float
    minimum: float  # smallest per-replica estimate (always > 0)
    replicas: int


def epsilon_scaling(
    final_degrees: dict[int, np.ndarray], t_max: int
) -> list[EpsilonEstimate]:
    """Endpoint prefactor estimates per vertex.

    `final_degrees[i]` holds d_{t_max}(i) across replicas.  The scaled
    value i^psi * mean should approach a constant as i grows (the limit
    itself lives at i -> infinity and is out of reach on a desk).
    """
    out = []
    z = t_max**PSI
    for i in sorted(final_degrees):
        eps = final_degrees[i].astype(np.float64) / z
        r = len(eps)
        se = float(eps.std(ddof=1) / math.sqrt(r)) if r > 1 else 0.0
        out.append(
            EpsilonEstimate(
                vertex=i,
                mean=float(eps.mean()),
                stderr=se,
                scaled=float(i**PSI * eps.mean()),
                scaled_stderr=float(i**PSI * se),
                minimum=float(eps.min()),
                replicas=r,
            )
        )
    return out


@dataclass
class AlphaSummary:
    vertex: int
    t: np.ndarray
    median_dev: np.ndarray  # median over replicas of |alpha_t - phi|
    q90_dev: np.ndarray


def alpha_summary(vertex: int, t: np.ndarray, alpha: np.ndarray) -> AlphaSummary:
    """Per-snapshot quantiles of |alpha_t - phi| across replicas.

    `alpha` has shape (replicas, snapshots) aligned with `t`.
    """
    dev = np.abs(alpha - PHI)
    return AlphaSummary(
        vertex=vertex,
        t=np.asarray(t, dtype=np.int64),
        median_dev=np.median(dev, axis=0),
        q90_dev=np.quantile(dev, 0.9, axis=0),
    )


def growth_floor_diagnostic(
    t: np.ndarray, degree: np.ndarray, k_list: Sequence[int] = (1, 2, 3)
) -> dict[int, float]:
    """Diagnostic only: min over snapshots of d_t / ((log t)^k / k!).

    The almost-sure floor this probes is a liminf over all k at t -> inf,
    far outside desk scale; values are reported, never asserted.
    """
    t = np.asarray(t, dtype=np.float64)
    d = np.asarray(degree, dtype=np.float64)
    mask = t >= 3
    out = {}
    for k in k_list:
        floor = np.log(t[mask]) ** k / math.factorial(k)
        out[k] = float((d[mask] / floor).min())
    return out


@dataclass
class DegreeHistogram:
    counts: np.ndarray  # counts[k] = number of vertices with degree k
    t: int
    tail_exponent: float  # exploratory CCDF fit; nan when the tail is empty
    tail_points: int


def validate_histogram(counts: np.ndarray, t: int) -> None:
    """Handshake identities: counts sum to t+1 vertices, degrees to 2t."""
    if int(counts.sum()) != t + 1:
        raise AssertionError("histogram counts must sum to t+1")
    k = np.arange(len(counts), dtype=np.int64)
    if int((k * counts).sum()) != 2 * t:
        raise AssertionError("degree mass must sum to 2t")


def degree_histogram(counts: np.ndarray, t: int, k_min: int = 10) -> DegreeHistogram:
    """Exact histogram plus an exploratory tail-exponent estimate.

    The tail exponent tau is fitted by log-log regression of the
    complementary cumulative counts N_{>=k} over k > k_min (CCDF slope is
    1 - tau).  Reported as a hypothesis check only, never asserted.
    """
    validate_histogram(counts, t)
    ccdf = counts[::-1].cumsum()[::-1]
    k = np.arange(len(counts))
    mask = (k > k_min) & (ccdf > 0)
    pts = int(mask.sum())
    if pts >= 3:
        slope, _ = np.polyfit(np.log(k[mask]), np.log(ccdf[mask]), 1)
        tau = 1.0 - float(slope)
    else:
        tau = float("nan")
    return DegreeHistogram(counts=counts, t=t, tail_exponent=tau, tail_points=pts)
