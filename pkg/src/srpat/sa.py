"""Stochastic-approximation machinery and the pathwise ODE comparison.

Generic pieces: the recursion x_{t+1} = x_t + a_t (h(x_t) + M_{t+1} +
e_{t+1}), a fixed-step RK4 integrator for y' = h(y), and the window bound

    sup_{u in [T_t, T_t+T]} |xbar(u) - y(u)|
        <= K e^{LT} + C_{T,L} sup a_s + sum a_s |e_s|,
    K = C_{T,L} L sum a_s^2 + sup |zeta_s - zeta_t|,
    C_{T,L} = |h(0)| + L (C0 + |h(0)| T) e^{LT},

where xbar is the piecewise-linear interpolation of the iterates over the
cumulative step-size clock T_t = sum_{s<t} a_s and zeta is the weighted
noise martingale.

Tree-specific pieces: from a dense per-step record of one vertex, the
reciprocal ratio alpha*_t = theta_t/(t d_t) decomposes exactly as such a
scheme with a_t = 1/(t+1), drift h(x) = 1 - x - x^2 (root 1/phi), noise

    M*_{t+1} = t alpha*_t (1_{attach}/(d_t + 1_{attach})
               - theta_t/(t(t+1)(d_t+1)))

and error e_{t+1} = alpha*_t^2 (1 - t d_t/((t+1)(d_t+1))).  The recorded
alpha*_{t+1} must be reproduced by the decomposition to float accuracy;
anything worse signals data corruption.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from srpat.constants import PSI
from srpat.core import DenseRecord


def drift_quadratic(x: float) -> float:
    """The tree's drift 1 - x - x^2; unique positive zero 1/phi."""
    return 1.0 - x - x * x


def default_steps(t: int) -> float:
    """Canonical step sizes a_t = 1/(t+1): divergent sum, summable squares."""
    return 1.0 / (t + 1.0)


def sa_iterate(
    x0: float,
    h: Callable[[float], float],
    steps: int,
    a: Callable[[int], float] = default_steps,
    noise: Optional[Callable[[int], float]] = None,
    error: Optional[Callable[[int], float]] = None,
    bound: float = 1e6,
) -> np.ndarray:
    """Run the recursion for `steps` steps; returns x_0..x_steps.

    `noise(t)` and `error(t)` supply M_{t+1} and e_{t+1}.  Iterates escaping
    |x| > bound abort with a diagnostic (the scheme requires bounded paths).
    """
    xs = np.empty(steps + 1)
    x = float(x0)
    xs[0] = x
    for t in range(steps):
        m = noise(t) if noise is not None else 0.0
        e = error(t) if error is not None else 0.0
        x = x + a(t) * (h(x) + m + e)
        if not abs(x) <= bound:
            raise RuntimeError(
                f"iterate escaped |x| <= {bound} at t={t + 1} (x={x}); "
                "boundedness condition violated"
            )
        xs[t + 1] = x
    return xs


def _rk4_step(h: Callable[[float], float], y: float, dt: float) -> float:
    k1 = h(y)
    k2 = h(y + 0.5 * dt * k1)
    k3 = h(y + 0.5 * dt * k2)
    k4 = h(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def ode_solve(
    h: Callable[[float], float],
    y0: float,
    u_max: float,
    step: float = 0.005,
    check_tol: float = 1e-10,
) -> tuple[np.ndarray, np.ndarray]:
    """Fourth-order fixed-step integration of y' = h(y) on [0, u_max].

    The path is re-integrated at half the step; if the two disagree beyond
    check_tol anywhere, the step is too large for the requested accuracy.
    """
    if step <= 0 or u_max <= 0:
        raise ValueError("need positive step and u_max")
    n = int(math.ceil(u_max / step))
    u = np.linspace(0.0, n * step, n + 1)
    y = np.empty(n + 1)
    y[0] = y0
    for m in range(n):
        y[m + 1] = _rk4_step(h, y[m], step)
    # halved-step control run, compared on the coarse grid
    yh = y0
    worst = 0.0
    for m in range(n):
        yh = _rk4_step(h, yh, 0.5 * step)
        yh = _rk4_step(h, yh, 0.5 * step)
        worst = max(worst, abs(yh - y[m + 1]))
    if worst > check_tol:
        raise ValueError(
            f"step {step} too large: halved-step deviation {worst:.3e} > {check_tol:.1e}"
        )
    return u, y


@dataclass
class AlphaStarSeries:
    """Exact noise/error decomposition along one vertex's dense record.

    Index m corresponds to state time t = t0 + m; step arrays (mstar, eps,
    cond_var, residual) have one fewer entry and describe t -> t+1.
    """

    vertex: int
    t0: int
    t: np.ndarray
    alpha_star: np.ndarray
    mstar: np.ndarray
    zeta: np.ndarray
    eps: np.ndarray
    cond_var: np.ndarray
    mbar: np.ndarray
    qstar: np.ndarray
    residual: np.ndarray
    max_residual: float


def alpha_star_functionals(
    dense: DenseRecord, residual_tol: float = 1e-12
) -> AlphaStarSeries:
    """Reconstruct the scheme's ingredients from a dense per-step record.

    The noise term uses the closed-form conditional expectation
    theta/(t(t+1)(d+1)); the assembled right side must reproduce the
    recorded alpha*_{t+1} to residual_tol at every step, otherwise the
    record is corrupt and a ValueError is raised.
    """
    t = np.arange(dense.t0, dense.t0 + len(dense.degree), dtype=np.float64)
    d = dense.degree.astype(np.float64)
    th = dense.theta.astype(np.float64)
    ind = dense.indicator.astype(np.float64)
    astar = th / (t * d)

    tm, dm, thm, am = t[:-1], d[:-1], th[:-1], astar[:-1]
    cond = thm / (tm * (tm + 1.0) * (dm + 1.0))
    mstar = tm * am * (ind / (dm + 1.0) - cond)
    eps = am * am * (1.0 - (tm / (tm + 1.0)) * (dm / (dm + 1.0)))
    recon = am + (1.0 - am - am * am - mstar) / (tm + 1.0) + eps / (tm + 1.0)
    residual = np.abs(recon - astar[1:])
    max_residual = float(residual.max()) if len(residual) else 0.0
    if max_residual > residual_tol:
        raise ValueError(
            f"recursion reconstruction residual {max_residual:.3e} exceeds "
            f"{residual_tol:.1e}: corrupt record"
        )

    zeta = np.concatenate(([0.0], np.cumsum(mstar / (tm + 1.0))))
    cond_var = am * am * thm * (tm * (tm + 1.0) - thm) / (
        (tm + 1.0) ** 2 * (dm + 1.0) ** 2
    )
    cum_growth = np.concatenate(([0.0], np.cumsum(np.log1p(am / (tm + 1.0)))))
    cum_ref = np.concatenate(([0.0], np.cumsum(np.log1p(PSI / (tm + 1.0)))))
    mbar = d * np.exp(-cum_growth)
    qstar = np.exp(cum_growth - cum_ref)
    return AlphaStarSeries(
        vertex=dense.vertex,
        t0=dense.t0,
        t=t.astype(np.int64),
        alpha_star=astar,
        mstar=mstar,
        zeta=zeta,
        eps=eps,
        cond_var=cond_var,
        mbar=mbar,
        qstar=qstar,
        residual=residual,
        max_residual=max_residual,
    )


@dataclass
class SAWindowReport:
    """Pathwise interpolation-vs-ODE comparison over one window [t0, t1]."""

    t0: int
    t1: int
    horizon: float  # T = T_{t1} - T_{t0}
    sup_dev: float
    bound: float
    K: float
    C: float
    sum_a_sq: float
    sup_zeta_dev: float
    err_sum: float


def comparison_bound(
    x: Sequence[float],
    zeta: Sequence[float],
    eps: Sequence[float],
    t0: int,
    L: float = 3.0,
    C0: float = 1.0,
    h0: float = 1.0,
    h: Callable[[float], float] = drift_quadratic,
    refine: int = 8,
) -> SAWindowReport:
    """Evaluate the window bound for iterates x_s, s = t0..t0+len(x)-1.

    a_s = 1/(s+1); the ODE starts from x[0] at clock time T_{t0} and is
    integrated with `refine` RK4 substeps per inter-iterate gap, where the
    supremum against the piecewise-linear interpolation is also taken.
    `eps` holds the per-step error magnitudes inside the window.
    """
    x = np.asarray(x, dtype=np.float64)
    zeta = np.asarray(zeta, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    if len(x) < 2 or len(zeta) != len(x):
        raise ValueError("need iterates and zeta of equal length >= 2")
    n = len(x) - 1
    t1 = t0 + n
    a = 1.0 / (np.arange(t0, t1 + 1, dtype=np.float64) + 1.0)
    horizon = float(a[:-1].sum())  # T_{t1} - T_{t0}

    sup_dev = 0.0
    y = float(x[0])
    for m in range(n):
        dt = a[m] / refine
        for r in range(refine):
            xl = x[m] + (x[m + 1] - x[m]) * (r / refine)
            sup_dev = max(sup_dev, abs(xl - y))
            y = _rk4_step(h, y, dt)
    sup_dev = max(sup_dev, abs(x[n] - y))

    elt = math.exp(L * horizon)
    C = abs(h0) + L * (C0 + abs(h0) * horizon) * elt
    sum_a_sq = float((a * a).sum())
    sup_zeta_dev = float(np.abs(zeta - zeta[0]).max())
    K = C * L * sum_a_sq + sup_zeta_dev
    err_sum = float((a[: len(eps)] * np.abs(eps)).sum())
    bound = K * elt + C * float(a.max()) + err_sum
    return SAWindowReport(
        t0=t0,
        t1=t1,
        horizon=horizon,
        sup_dev=float(sup_dev),
        bound=float(bound),
        K=float(K),
        C=float(C),
        sum_a_sq=sum_a_sq,
        sup_zeta_dev=sup_zeta_dev,
        err_sum=err_sum,
    )


def decay_diagnostic(
    series: AlphaStarSeries, exponents: Sequence[float] = (0.25, 0.5, 1.0)
) -> dict[float, np.ndarray]:
    """Diagnostic only: sup of t^lambda |alpha*_t - 1/phi| over dyadic blocks.

    The asserted theory is a limit statement for every exponent; at desk
    scale these suprema are merely reported (e.g. for plotting), never
    tested against a tolerance.
    """
    t = series.t.astype(np.float64)
    dev = np.abs(series.alpha_star - PSI)
    lo = max(series.t0, 2)
    edges = []
    e = lo
    while e < t[-1]:
        edges.append(e)
        e *= 2
    edges.append(t[-1])
    out = {}
    for lam in exponents:
        vals = []
        for a, b in zip(edges, edges[1:]):
            m = (t >= a) & (t <= b)
            vals.append(float((t[m] ** lam * dev[m]).max()))
        out[lam] = np.asarray(vals)
    return out


def window_report(series: AlphaStarSeries, t0: int, t1: int) -> SAWindowReport:
    """Comparison bound for the tree's alpha* iterates on [t0, t1]."""
    lo = t0 - series.t0
    hi = t1 - series.t0
    if lo < 0 or hi >= len(series.alpha_star) or t1 <= t0:
        raise ValueError("window outside the dense record")
    return comparison_bound(
        series.alpha_star[lo : hi + 1],
        series.zeta[lo : hi + 1],
        series.eps[lo:hi],
        t0,
    )
