"""Renderer unit tests on synthetic CSVs matching the srpat schemas."""

from pathlib import Path

import numpy as np
import pytest

from srpat_figures import FigureSpec, SchemaError, render
from srpat_figures.cli import main
from srpat_figures.render import PHI, build_figure


def write_csv(path: Path, header: str, rows) -> Path:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(header + "\n")
        for row in rows:
            f.write(",".join(str(x) for x in row) + "\n")
    return path


@pytest.fixture
def crossover_csv(tmp_path):
    rows = [(i, round(2.6 * i**1.81)) for i in (1, 2, 5, 10, 50, 200, 1000, 2000)]
    return write_csv(tmp_path / "crossover.csv", "i,T_i", rows)


@pytest.fixture
def beta_csv(tmp_path):
    # a dip-then-rise series with its minimum in the interior
    ts = np.arange(10, 400)
    beta = 1.618 + 0.5 * ((ts - 60) / 50.0) ** 2 / (1 + ((ts - 60) / 50.0) ** 2)
    beta[ts < 60] = np.linspace(10, beta[list(ts).index(60)], (ts < 60).sum())
    rows = [(10, t, b, 1.6) for t, b in zip(ts, beta)]
    return write_csv(tmp_path / "beta.csv", "i,t,beta,x_t", rows)


@pytest.fixture
def trajectory_csv(tmp_path):
    rows = []
    for r in range(3):
        for t in (1, 10, 100, 1000):
            d = max(1, round(t**0.62))
            th = d * t
            rows.append((r, 1, t, d, th, 1.6 + 0.01 * r, 1 / 1.6))
    return write_csv(
        tmp_path / "trajectory.csv",
        "replica,vertex,t,degree,theta,alpha,alpha_star",
        rows,
    )


def test_crossover_axes_reach_figure_scales(crossover_csv, tmp_path):
    out = tmp_path / "crossover.png"
    spec = FigureSpec(kind="crossover", inputs=[crossover_csv], output=out)
    fig = build_figure(spec)
    ax = fig.axes[0]
    assert ax.get_xlim()[1] >= 2e3
    assert ax.get_ylim()[1] >= 1e8
    render(spec)
    assert out.exists() and out.stat().st_size > 0


def test_beta_dip_then_rise_marked(beta_csv, tmp_path):
    spec = FigureSpec(
        kind="beta-trajectory", inputs=[beta_csv], output=tmp_path / "b.png"
    )
    fig = build_figure(spec)
    ax = fig.axes[0]
    series = ax.lines[0].get_ydata()
    m = int(np.argmin(series))
    assert 0 < m < len(series) - 1, "minimum must be interior (dip then rise)"
    render(spec)


def test_alpha_has_phi_asymptote(trajectory_csv, tmp_path):
    spec = FigureSpec(
        kind="alpha-convergence", inputs=[trajectory_csv], output=tmp_path / "a.png"
    )
    fig = build_figure(spec)
    ax = fig.axes[0]
    hlines = [ln for ln in ax.lines if len(set(ln.get_ydata())) == 1]
    assert any(abs(ln.get_ydata()[0] - PHI) < 1e-12 for ln in hlines)
    render(spec)


def test_exponent_and_bounds_render(trajectory_csv, tmp_path):
    render(FigureSpec(kind="exponent-fit", inputs=[trajectory_csv],
                      output=tmp_path / "e.png"))
    bounds = write_csv(
        tmp_path / "bounds.csv",
        "i,t,mean_exact,upper_bound,gamma_t",
        [(1, t, t**0.61, 2.3 * t**0.62, 0.9) for t in (1, 10, 100, 1000)],
    )
    render(FigureSpec(kind="bounds", inputs=[bounds], output=tmp_path / "bo.png"))
    assert (tmp_path / "e.png").exists() and (tmp_path / "bo.png").exists()


def test_rendering_deterministic(crossover_csv, tmp_path):
    a = tmp_path / "a.png"
    b = tmp_path / "b.png"
    render(FigureSpec(kind="crossover", inputs=[crossover_csv], output=a))
    render(FigureSpec(kind="crossover", inputs=[crossover_csv], output=b))
    assert a.read_bytes() == b.read_bytes()


def test_schema_mismatch_reports_diff(tmp_path):
    bad = write_csv(tmp_path / "bad.csv", "i,T", [(1, 1)])
    with pytest.raises(SchemaError) as err:
        render(FigureSpec(kind="crossover", inputs=[bad], output=tmp_path / "x.png"))
    assert "T_i" in str(err.value) and "missing" in str(err.value)


def test_cli_roundtrip_and_errors(crossover_csv, tmp_path):
    out = tmp_path / "c.png"
    assert main(["crossover", "--in", str(crossover_csv), "--out", str(out)]) == 0
    assert out.exists()
    bad = write_csv(tmp_path / "bad.csv", "a,b", [(1, 2)])
    assert main(["crossover", "--in", str(bad), "--out", str(tmp_path / "x.png")]) == 1
    assert main(["crossover", "--in", str(tmp_path / "missing.csv"),
                 "--out", str(tmp_path / "x.png")]) == 1


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(ValueError):
        FigureSpec(kind="pie", inputs=[tmp_path / "x.csv"], output=tmp_path / "y.png")
