"""Command-line front end: wptplot <kind> --in <csv...> --out <image>."""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, PlotSpec, render
from .io import PlotInputError

_KIND_HELP = {
    "cdf": "empirical CDF per variant from cdf_se.csv / cdf_he.csv",
    "sweep": "median SE vs rho lines from rho_sweep.csv",
    "map": "flight map from per-slot logs plus trajectory_positions.csv",
    "bars": "mean average-SE bars per scheme from trajectory_summary.csv",
}


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wptplot",
        description="Render simulator experiment CSVs as figures.")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind, help=_KIND_HELP[kind])
        p.add_argument("--in", dest="inputs", nargs="+", required=True,
                       metavar="CSV", help="input CSV file(s)")
        p.add_argument("--out", required=True, metavar="IMAGE",
                       help="output image path (png)")
        p.add_argument("--labels", default=None,
                       help="comma-separated series labels")
        p.add_argument("--title", default=None, help="figure title")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    labels = (tuple(s.strip() for s in args.labels.split(","))
              if args.labels else None)
    try:
        spec = PlotSpec(kind=args.kind, inputs=tuple(args.inputs),
                        out_path=args.out, labels=labels, title=args.title)
        out = render(spec)
    except PlotInputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
