"""File formats: delimited outputs and the run manifest.

Column orders are fixed; numbers are locale-independent (decimal point,
no separators) with 17 significant digits for reals so values round-trip
exactly.  The manifest echoes everything needed to reproduce each output
byte for byte; its timestamp honours SOURCE_DATE_EPOCH (default epoch 0)
so that identical invocations produce identical files.
"""

from __future__ import annotations

import json
import os
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from srpat import __version__

SCHEMAS: dict[str, list[str]] = {
    "trajectory.csv": ["replica", "vertex", "t", "degree", "theta", "alpha", "alpha_star"],
    "beta.csv": ["i", "t", "beta", "x_t"],
    "crossover.csv": ["i", "T_i"],
    "bounds.csv": ["i", "t", "mean_exact", "upper_bound", "gamma_t"],
    "sa_window.csv": ["t0", "t1", "sup_dev", "bound", "K", "C", "sum_a_sq", "sup_zeta_dev", "err_sum"],
    "fit.csv": ["vertex", "slope", "intercept", "stderr", "t_lo", "t_hi", "replicas"],
    "histogram.csv": ["degree", "count"],
}


def format_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        raise TypeError("no boolean columns in any schema")
    if isinstance(v, (int,)) or hasattr(v, "__index__"):
        return str(int(v))
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_csv(path: Path, schema: str, rows: Iterable[Sequence]) -> int:
    """Write rows under the named schema's header; returns the row count."""
    header = SCHEMAS[schema]
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"{schema}: row width {len(row)} != {len(header)}")
            f.write(",".join(format_cell(v) for v in row) + "\n")
            n += 1
    return n


def _timestamp() -> str:
    epoch = int(os.environ.get("SOURCE_DATE_EPOCH", "0"))
    return datetime.fromtimestamp(epoch, tz=timezone.utc).isoformat()


def build_manifest(
    subcommand: str,
    config: dict,
    seed: int,
    replicas: int,
    outputs: list[tuple[str, int]],
) -> dict:
    """Manifest dict: configuration echo plus output inventory.

    Execution details that cannot affect output bytes (worker count) are
    deliberately absent, so reruns under any parallelism compare equal.
    """
    return {
        "tool": "srpat",
        "version": __version__,
        "subcommand": subcommand,
        "config": config,
        "seed": seed,
        "replicas": replicas,
        "timestamp": _timestamp(),
        "outputs": [{"file": name, "rows": rows} for name, rows in outputs],
    }


def write_manifest(path: Path, manifest: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
