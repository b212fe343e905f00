"""Command-line entry point: plotviz <kind> --in ... --out ...

Exit codes: 0 success, 2 bad spec or malformed CSV.
"""

import argparse
import sys

from .render import render
from .spec import CsvFormatError, FigureSpec

EXIT_OK = 0
EXIT_SPEC = 2


def build_parser():
    p = argparse.ArgumentParser(
        prog="plotviz",
        description="render optimizer-harness CSV artifacts to figures")
    sub = p.add_subparsers(dest="kind", required=True)

    t = sub.add_parser("traces", help="agent trajectories over contours")
    t.add_argument("--in", dest="inputs", nargs="+", required=True,
                   metavar="TRACES_CSV")
    t.add_argument("--objective", default="camel6")

    c = sub.add_parser("convergence", help="median best/worst distance curves")
    c.add_argument("--in", dest="inputs", nargs="+", required=True,
                   metavar="SUMMARY_CSV")

    h = sub.add_parser("heatmap", help="classification probability heatmap")
    h.add_argument("--in", dest="inputs", nargs=1, required=True,
                   metavar="GRID_CSV")
    h.add_argument("--data", dest="dataset", default=None,
                   help="dataset CSV scatter overlay")

    for s in (t, c, h):
        s.add_argument("--out", required=True)
        s.add_argument("--labels", nargs="+", default=[])
        s.add_argument("--x-range", nargs=2, type=float, default=None)
        s.add_argument("--y-range", nargs=2, type=float, default=None)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind,
            inputs=list(args.inputs),
            out=args.out,
            labels=list(args.labels),
            objective=getattr(args, "objective", None),
            x_range=tuple(args.x_range) if args.x_range else None,
            y_range=tuple(args.y_range) if args.y_range else None,
            dataset=getattr(args, "dataset", None),
        )
        render(spec)
    except (CsvFormatError, ValueError) as e:
        print(f"plotviz: {e}", file=sys.stderr)
        return EXIT_SPEC
    print(f"wrote {args.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
