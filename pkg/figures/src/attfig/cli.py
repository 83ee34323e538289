"""Command line: render run-record CSVs into the two-panel figure."""

import argparse
import sys

from .plot import PlotSpec, SchemaError, plot_run


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="attfig", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    plot = sub.add_parser("plot", help="plot estimation errors and uncertainty size")
    plot.add_argument("--runs", nargs="+", required=True, help="input record CSV files")
    plot.add_argument("--out", required=True, help="output image (png or svg)")
    plot.add_argument("--linear", action="store_true",
                      help="linear error axes (default: semi-log)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    spec = PlotSpec(runs=args.runs, out=args.out, log_errors=not args.linear)
    try:
        out = plot_run(spec)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
