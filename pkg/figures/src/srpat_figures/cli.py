"""figures <kind> --in <csv> --out <img>: render srpat outputs to files."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from srpat_figures import __version__
from srpat_figures.render import KIND_COLUMNS, FigureSpec, SchemaError, render


def _lim(text):
    a, b = text.split(",")
    return float(a), float(b)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="figures", description=__doc__)
    p.add_argument("--version", action="version", version=f"srpat-figures {__version__}")
    p.add_argument("kind", choices=sorted(KIND_COLUMNS))
    p.add_argument("--in", required=True, dest="infile", action="append",
                   help="input CSV (repeatable)")
    p.add_argument("--out", required=True)
    p.add_argument("--xscale", choices=["log", "linear"], default=None)
    p.add_argument("--yscale", choices=["log", "linear"], default=None)
    p.add_argument("--xlim", type=_lim, default=None, metavar="LO,HI")
    p.add_argument("--ylim", type=_lim, default=None, metavar="LO,HI")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        kind=args.kind,
        inputs=[Path(x) for x in args.infile],
        output=Path(args.out),
        xscale=args.xscale,
        yscale=args.yscale,
        xlim=args.xlim,
        ylim=args.ylim,
    )
    try:
        render(spec)
    except SchemaError as e:
        print(f"figures: schema mismatch: {e}", file=sys.stderr)
        return 1
    except (FileNotFoundError, ValueError) as e:
        print(f"figures: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
