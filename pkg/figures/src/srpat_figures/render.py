"""Figure builders for the srpat CSV outputs.

Rendering is headless (Agg) and deterministic: fixed style, fixed sizes,
fixed image metadata, no timestamps.  Inputs are plain CSV files with the
column layouts the srpat CLI writes; a mismatched header raises
SchemaError carrying the column diff.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

PHI = (1.0 + np.sqrt(5.0)) / 2.0

#: expected input columns per figure kind
KIND_COLUMNS = {
    "crossover": ["i", "T_i"],
    "beta-trajectory": ["i", "t", "beta", "x_t"],
    "alpha-convergence": ["replica", "vertex", "t", "degree", "theta", "alpha", "alpha_star"],
    "exponent-fit": ["replica", "vertex", "t", "degree", "theta", "alpha", "alpha_star"],
    "bounds": ["i", "t", "mean_exact", "upper_bound", "gamma_t"],
}

_STYLE = {
    "figure.figsize": (6.4, 4.4),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
}


class SchemaError(ValueError):
    """Input columns do not match the expected layout."""

    def __init__(self, kind: str, expected: list[str], got: list[str]):
        missing = [c for c in expected if c not in got]
        extra = [c for c in got if c not in expected]
        super().__init__(
            f"{kind}: column mismatch; expected {expected}, got {got} "
            f"(missing {missing}, unexpected {extra})"
        )
        self.missing = missing
        self.extra = extra


@dataclass
class FigureSpec:
    kind: str
    inputs: list[Path]
    output: Path
    xscale: Optional[str] = None
    yscale: Optional[str] = None
    xlim: Optional[tuple[float, float]] = None
    ylim: Optional[tuple[float, float]] = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KIND_COLUMNS:
            raise ValueError(
                f"unknown figure kind {self.kind!r}; choose from {sorted(KIND_COLUMNS)}"
            )
        if not self.inputs:
            raise ValueError("need at least one input CSV")


def _read_table(path: Path, kind: str) -> dict[str, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise SchemaError(kind, KIND_COLUMNS[kind], [])
        if header != KIND_COLUMNS[kind]:
            raise SchemaError(kind, KIND_COLUMNS[kind], header)
        cols = {name: [] for name in header}
        for row in reader:
            for name, cell in zip(header, row):
                cols[name].append(cell)
    out = {}
    for name, cells in cols.items():
        vals = [float(c) if c != "" else np.nan for c in cells]
        out[name] = np.asarray(vals)
    return out


def _fig_crossover(spec: FigureSpec):
    data = _read_table(spec.inputs[0], "crossover")
    fig, ax = plt.subplots()
    ax.plot(data["i"], data["T_i"], marker="o", ms=3, lw=1.2, color="#1f5fa8")
    ax.set_xscale(spec.xscale or "log")
    ax.set_yscale(spec.yscale or "log")
    ax.set_xlim(spec.xlim or (1, 2e3))
    ax.set_ylim(spec.ylim or (1, 1e8))
    ax.set_xlabel("vertex i")
    ax.set_ylabel("crossover time T(i)")
    ax.set_title("Crossover of the mean degree/weight ratio")
    return fig


def _fig_beta(spec: FigureSpec):
    data = _read_table(spec.inputs[0], "beta-trajectory")
    i = int(data["i"][0])
    fig, ax = plt.subplots()
    ax.plot(data["t"], data["beta"], lw=1.4, color="#1f5fa8", label=f"beta_t (i={i})")
    ax.plot(data["t"], data["x_t"], lw=1.0, ls="--", color="#888888", label="fixed point x_t")
    ax.axhline(PHI, color="#b2542c", lw=1.0, ls=":", label="phi")
    m = int(np.argmin(data["beta"]))
    ax.plot([data["t"][m]], [data["beta"][m]], "v", color="#b2542c", ms=7,
            label=f"minimum at t={int(data['t'][m])}")
    ax.set_xscale(spec.xscale or "log")
    if spec.yscale:
        ax.set_yscale(spec.yscale)
    if spec.xlim:
        ax.set_xlim(spec.xlim)
    if spec.ylim:
        ax.set_ylim(spec.ylim)
    ax.set_xlabel("time t")
    ax.set_ylabel("beta_t")
    ax.set_title("Mean-ratio series: dip, crossover, climb to phi")
    ax.legend(loc="best")
    return fig


def _group_by_vertex(data):
    out = {}
    for v in np.unique(data["vertex"].astype(np.int64)):
        mask = data["vertex"].astype(np.int64) == v
        out[int(v)] = mask
    return out


def _fig_alpha(spec: FigureSpec):
    data = _read_table(spec.inputs[0], "alpha-convergence")
    fig, ax = plt.subplots()
    for v, mask in _group_by_vertex(data).items():
        t = data["t"][mask].astype(np.int64)
        a = data["alpha"][mask]
        med = {}
        for tt, aa in zip(t, a):
            med.setdefault(int(tt), []).append(aa)
        ts = np.array(sorted(med))
        ms = np.array([np.median(med[tt]) for tt in ts])
        ax.plot(ts, ms, lw=1.3, label=f"vertex {v}")
    ax.axhline(PHI, color="#b2542c", lw=1.2, ls=":", label=f"phi = {PHI:.3f}")
    ax.set_xscale(spec.xscale or "log")
    if spec.xlim:
        ax.set_xlim(spec.xlim)
    if spec.ylim:
        ax.set_ylim(spec.ylim)
    ax.set_xlabel("time t")
    ax.set_ylabel("median alpha_t")
    ax.set_title("Degree/weight ratio settles at the golden ratio")
    ax.legend(loc="best")
    return fig


def _fig_exponent(spec: FigureSpec):
    data = _read_table(spec.inputs[0], "exponent-fit")
    fig, ax = plt.subplots()
    tmax = 1.0
    for v, mask in _group_by_vertex(data).items():
        t = data["t"][mask].astype(np.int64)
        d = data["degree"][mask]
        med = {}
        for tt, dd in zip(t, d):
            med.setdefault(int(tt), []).append(dd)
        ts = np.array(sorted(med))
        ms = np.array([np.median(med[tt]) for tt in ts])
        ax.plot(ts, ms, lw=1.3, label=f"vertex {v}")
        tmax = max(tmax, float(ts.max()))
    guide_t = np.array([10.0, tmax])
    psi = 1.0 / PHI
    ax.plot(guide_t, guide_t**psi, ls="--", color="#555555", lw=1.0,
            label="slope 1/phi guide")
    ax.set_xscale("log")
    ax.set_yscale("log")
    if spec.xlim:
        ax.set_xlim(spec.xlim)
    if spec.ylim:
        ax.set_ylim(spec.ylim)
    ax.set_xlabel("time t")
    ax.set_ylabel("median degree")
    ax.set_title("Degree growth on log-log axes")
    ax.legend(loc="best")
    return fig


def _fig_bounds(spec: FigureSpec):
    data = _read_table(spec.inputs[0], "bounds")
    i = int(data["i"][0])
    fig, ax = plt.subplots()
    ax.plot(data["t"], data["mean_exact"], lw=1.4, color="#1f5fa8",
            label=f"exact mean degree (i={i})")
    ax.plot(data["t"], data["upper_bound"], lw=1.2, ls="--", color="#b2542c",
            label="Gamma-quotient bound")
    ax.set_xscale("log")
    ax.set_yscale("log")
    if spec.xlim:
        ax.set_xlim(spec.xlim)
    if spec.ylim:
        ax.set_ylim(spec.ylim)
    ax.set_xlabel("time t")
    ax.set_ylabel("mean degree")
    ax.set_title("Mean degree dominated by the Gamma bound")
    ax.legend(loc="best")
    return fig


_BUILDERS = {
    "crossover": _fig_crossover,
    "beta-trajectory": _fig_beta,
    "alpha-convergence": _fig_alpha,
    "exponent-fit": _fig_exponent,
    "bounds": _fig_bounds,
}


def build_figure(spec: FigureSpec):
    """Create (but do not save) the matplotlib Figure for a spec."""
    with plt.rc_context(_STYLE):
        return _BUILDERS[spec.kind](spec)


def render(spec: FigureSpec) -> Path:
    """Render the figure to spec.output; deterministic bytes for fixed input."""
    fig = build_figure(spec)
    try:
        spec.output.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(
            spec.output,
            metadata={"Software": "srpat-figures"},
        )
    finally:
        plt.close(fig)
    return spec.output
