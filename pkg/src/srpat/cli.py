"""Command-line surface.

Subcommands: simulate, pat, beta, crossover, bounds, sa-verify, fit.
Every run writes its CSV outputs plus manifest.json into --out.  Replicas
fan out over processes (--jobs, overridden by SRPAT_JOBS); outputs are
merged in replica order, so files are identical under any scheduling.
Exit codes: 0 success, 1 validation error, 2 internal assertion failure.
"""

from __future__ import annotations

import argparse
import csv
import functools
import os
import sys
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path

import numpy as np

from srpat import __version__, core, determin, estimators, io, pat, sa
from srpat.constants import DEFAULT_SEED


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # validation problems are exit code 1, not 2
        raise _CliError(message)


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x != ""]
    except ValueError as e:
        raise _CliError(f"bad integer list {text!r}") from e


def _parse_snapshots(text: str, t_max: int, tracked: list[int]):
    if text.startswith("geometric:"):
        return core.default_snapshot_grid(t_max, tracked, ratio=float(text[10:]))
    if text.startswith("list:"):
        return _parse_int_list(text[5:])
    raise _CliError(f"--snapshots must be geometric:<ratio> or list:<csv>, got {text!r}")


def run_replicas(fn, replicas: int, jobs: int) -> list:
    """Apply fn to each replica id; results returned in replica order."""
    if jobs <= 1 or replicas == 1:
        return [fn(r) for r in range(replicas)]
    results = [None] * replicas
    with ProcessPoolExecutor(max_workers=min(jobs, replicas)) as ex:
        futures = {ex.submit(fn, r): r for r in range(replicas)}
        for fut in as_completed(futures):
            r = futures[fut]
            try:
                results[r] = fut.result()
            except AssertionError as e:
                raise AssertionError(f"replica {r}: {e}") from e
            except Exception as e:
                raise RuntimeError(f"replica {r} worker failed: {e}") from e
    return results


def _jobs(args) -> int:
    env = os.environ.get("SRPAT_JOBS")
    if env is not None:
        return max(1, int(env))
    return max(1, args.jobs)


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(outdir: Path, subcommand: str, config: dict, seed: int, replicas: int,
           files: list[tuple[str, int]]) -> None:
    manifest = io.build_manifest(subcommand, config, seed, replicas, files)
    io.write_manifest(outdir / "manifest.json", manifest)


def _cmd_simulate(args) -> int:
    tracked = _parse_int_list(args.track)
    grid = _parse_snapshots(args.snapshots, args.t_max, tracked)
    config = core.SimConfig(
        t_max=args.t_max,
        tracked=tracked,
        snapshot_grid=grid,
        sampler=args.sampler,
        seed=args.seed,
        replicas=args.replicas,
    )
    outdir = _outdir(args)
    worker = functools.partial(core.simulate, config)
    results = run_replicas(worker, config.replicas, _jobs(args))

    def rows():
        for res in results:
            for tr in res.trajectories:
                for m in range(len(tr.t)):
                    yield (res.replica, tr.vertex, int(tr.t[m]), int(tr.degree[m]),
                           int(tr.theta[m]), float(tr.alpha[m]), float(tr.alpha_star[m]))

    n_tr = io.write_csv(outdir / "trajectory.csv", "trajectory.csv", rows())
    hist = results[0].degree_histogram
    n_h = io.write_csv(
        outdir / "histogram.csv",
        "histogram.csv",
        ((k, int(c)) for k, c in enumerate(hist) if c > 0),
    )
    _write(outdir, "simulate",
           {"t_max": config.t_max, "tracked": config.tracked,
            "snapshot_grid": [int(x) for x in config.snapshot_grid],
            "sampler": config.sampler},
           config.seed, config.replicas,
           [("trajectory.csv", n_tr), ("histogram.csv", n_h)])
    return 0


def _cmd_pat(args) -> int:
    tracked = _parse_int_list(args.track)
    grid = _parse_snapshots(args.snapshots, args.t_max, tracked)
    outdir = _outdir(args)
    worker = functools.partial(
        _pat_worker, args.t_max, args.delta, tracked, args.seed, grid
    )
    results = run_replicas(worker, args.replicas, _jobs(args))

    def rows():
        for res in results:
            for tr in res.trajectories:
                for m in range(len(tr.t)):
                    yield (res.replica, tr.vertex, int(tr.t[m]), int(tr.degree[m]),
                           None, None, None)

    n_tr = io.write_csv(outdir / "trajectory.csv", "trajectory.csv", rows())
    hist = results[0].degree_histogram
    n_h = io.write_csv(
        outdir / "histogram.csv",
        "histogram.csv",
        ((k, int(c)) for k, c in enumerate(hist) if c > 0),
    )
    _write(outdir, "pat",
           {"t_max": args.t_max, "tracked": tracked, "delta": args.delta,
            "snapshot_grid": [int(x) for x in grid]},
           args.seed, args.replicas,
           [("trajectory.csv", n_tr), ("histogram.csv", n_h)])
    return 0


def _pat_worker(t_max, delta, tracked, seed, grid, replica):
    return pat.pat_simulate(t_max, delta, tracked, seed, replica=replica,
                            snapshot_grid=grid)


def _cmd_beta(args) -> int:
    outdir = _outdir(args)
    series = determin.beta_trajectory(args.i, args.t_max)
    rows = (
        (series.i, int(series.t[m]), float(series.beta[m]), float(series.x[m]))
        for m in range(len(series.t))
    )
    n = io.write_csv(outdir / "beta.csv", "beta.csv", rows)
    _write(outdir, "beta", {"i": args.i, "t_max": args.t_max}, args.seed, 1,
           [("beta.csv", n)])
    return 0


def _cmd_crossover(args) -> int:
    outdir = _outdir(args)
    if args.i is not None:
        indices = _parse_int_list(args.i)
    else:
        indices = determin.geometric_indices(args.i_max)
    pairs = determin.crossover(indices, cap=args.cap)
    n = io.write_csv(outdir / "crossover.csv", "crossover.csv", pairs)
    _write(outdir, "crossover",
           {"indices": indices, "cap": args.cap}, args.seed, 1,
           [("crossover.csv", n)])
    return 0


def _cmd_bounds(args) -> int:
    outdir = _outdir(args)
    i = args.i
    grid = _parse_snapshots(args.snapshots, args.t_max, [i])
    mean = determin.mean_degree_series(i, args.t_max)
    gam = determin.gamma_lower_series(i, args.t_max)

    def rows():
        for t in grid:
            if t < i:
                continue
            yield (i, t, float(mean[t - i]),
                   determin.mean_degree_upper_bound(i, t), float(gam.gamma[t - i]))

    n = io.write_csv(outdir / "bounds.csv", "bounds.csv", rows())
    _write(outdir, "bounds", {"i": i, "t_max": args.t_max,
                              "snapshot_grid": [int(x) for x in grid]},
           args.seed, 1, [("bounds.csv", n)])
    return 0


def _sa_worker(config, dense_until, replica):
    res = core.simulate(config, replica=replica, include_histogram=False,
                        dense_vertex=config.tracked[0], dense_until=dense_until)
    return res.dense


def _cmd_sa_verify(args) -> int:
    outdir = _outdir(args)
    windows = _parse_int_list(args.windows)
    if not windows or any(w < 2 for w in windows):
        raise _CliError("--windows needs window starts >= 2")
    vertex = args.track
    dense_until = 2 * max(windows)
    config = core.SimConfig(
        t_max=dense_until, tracked=[vertex], sampler="fast",
        seed=args.seed, replicas=args.replicas,
    )
    worker = functools.partial(_sa_worker, config, dense_until)
    denses = run_replicas(worker, args.replicas, _jobs(args))

    def rows():
        for dense in denses:
            series = sa.alpha_star_functionals(dense)
            for w in windows:
                rep = sa.window_report(series, max(w, vertex + 1), 2 * w)
                yield (rep.t0, rep.t1, rep.sup_dev, rep.bound, rep.K, rep.C,
                       rep.sum_a_sq, rep.sup_zeta_dev, rep.err_sum)

    n = io.write_csv(outdir / "sa_window.csv", "sa_window.csv", rows())
    _write(outdir, "sa-verify",
           {"windows": windows, "track": vertex, "dense_until": dense_until},
           args.seed, args.replicas, [("sa_window.csv", n)])
    return 0


def _cmd_fit(args) -> int:
    outdir = _outdir(args)
    per_vertex: dict[int, dict[int, list[tuple[int, int]]]] = {}
    with open(args.infile, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        need = {"replica", "vertex", "t", "degree"}
        if reader.fieldnames is None or not need.issubset(reader.fieldnames):
            raise _CliError(f"{args.infile} lacks columns {sorted(need)}")
        for rec in reader:
            v = int(rec["vertex"])
            r = int(rec["replica"])
            per_vertex.setdefault(v, {}).setdefault(r, []).append(
                (int(rec["t"]), int(rec["degree"]))
            )

    def rows():
        for v in sorted(per_vertex):
            runs = []
            for r in sorted(per_vertex[v]):
                pts = sorted(per_vertex[v][r])
                t = np.array([p[0] for p in pts], dtype=np.int64)
                d = np.array([p[1] for p in pts], dtype=np.int64)
                runs.append((t, d))
            fit = estimators.fit_exponent(v, runs, args.t_lo, args.t_hi)
            yield (fit.vertex, fit.slope, fit.intercept, fit.stderr,
                   fit.t_lo, fit.t_hi, fit.replicas)

    n = io.write_csv(outdir / "fit.csv", "fit.csv", rows())
    _write(outdir, "fit",
           {"in": str(args.infile), "t_lo": args.t_lo, "t_hi": args.t_hi},
           args.seed, 1, [("fit.csv", n)])
    return 0


def build_parser() -> _Parser:
    p = _Parser(prog="srpat", description=__doc__)
    p.add_argument("--version", action="version", version=f"srpat {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, replicas=True):
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--out", required=True)
        sp.add_argument("--jobs", type=int, default=1)
        if replicas:
            sp.add_argument("--replicas", type=int, default=1)

    sp = sub.add_parser("simulate", help="grow the self-reinforced tree")
    sp.add_argument("--t-max", type=int, required=True, dest="t_max")
    sp.add_argument("--track", default="1")
    sp.add_argument("--snapshots", default="geometric:1.1")
    sp.add_argument("--sampler", choices=["naive", "fast"], default="fast")
    common(sp)
    sp.set_defaults(fn=_cmd_simulate)

    sp = sub.add_parser("pat", help="grow the shifted baseline tree")
    sp.add_argument("--t-max", type=int, required=True, dest="t_max")
    sp.add_argument("--track", default="1")
    sp.add_argument("--snapshots", default="geometric:1.1")
    sp.add_argument("--delta", type=float, default=0.0)
    common(sp)
    sp.set_defaults(fn=_cmd_pat)

    sp = sub.add_parser("beta", help="deterministic mean-ratio series")
    sp.add_argument("--i", type=int, required=True)
    sp.add_argument("--t-max", type=int, required=True, dest="t_max")
    common(sp, replicas=False)
    sp.set_defaults(fn=_cmd_beta)

    sp = sub.add_parser("crossover", help="crossover times T(i)")
    sp.add_argument("--i", default=None, help="explicit comma-separated starts")
    sp.add_argument("--i-max", type=int, default=100, dest="i_max")
    sp.add_argument("--cap", type=int, default=determin.CROSSOVER_CAP)
    common(sp, replicas=False)
    sp.set_defaults(fn=_cmd_crossover)

    sp = sub.add_parser("bounds", help="mean degree vs Gamma bound")
    sp.add_argument("--i", type=int, required=True)
    sp.add_argument("--t-max", type=int, required=True, dest="t_max")
    sp.add_argument("--snapshots", default="geometric:1.1")
    common(sp, replicas=False)
    sp.set_defaults(fn=_cmd_bounds)

    sp = sub.add_parser("sa-verify", help="pathwise ODE comparison windows")
    sp.add_argument("--windows", default="1000,10000,100000")
    sp.add_argument("--track", type=int, default=1)
    common(sp)
    sp.set_defaults(fn=_cmd_sa_verify)

    sp = sub.add_parser("fit", help="growth-exponent fits from trajectory CSVs")
    sp.add_argument("--in", required=True, dest="infile")
    sp.add_argument("--t-lo", type=int, required=True, dest="t_lo")
    sp.add_argument("--t-hi", type=int, required=True, dest="t_hi")
    common(sp, replicas=False)
    sp.set_defaults(fn=_cmd_fit)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except _CliError as e:
        print(f"srpat: error: {e}", file=sys.stderr)
        return 1
    except (ValueError, FileNotFoundError, RuntimeError) as e:
        print(f"srpat: error: {e}", file=sys.stderr)
        return 1
    except AssertionError as e:
        print(f"srpat: internal assertion failure: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
