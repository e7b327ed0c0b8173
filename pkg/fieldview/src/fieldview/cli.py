"""Command-line entry points: plot-field, plot-lineout, plot-convergence."""

import argparse
import sys


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="fieldview", description="Render geotransport field files."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plot-field", help="energy heatmap")
    p.add_argument("field")
    p.add_argument("--style", choices=["linear", "log10"], default="linear")
    p.add_argument("--floor", type=float, default=1e-10,
                   help="clamp for the log10 style")
    p.add_argument("--out", required=True)

    p = sub.add_parser("plot-lineout", help="E along an axis through the center")
    p.add_argument("fields", nargs="+")
    p.add_argument("--axis", choices=["x", "y"], default="x")
    p.add_argument("--oracle", help="reference field drawn dashed")
    p.add_argument("--out", required=True)

    p = sub.add_parser("plot-convergence", help="log-log error vs N")
    p.add_argument("table", help="CSV of N, error")
    p.add_argument("--out", required=True)
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    from . import plots

    try:
        if args.command == "plot-field":
            plots.plot_field(args.field, args.out, args.style, args.floor)
        elif args.command == "plot-lineout":
            plots.plot_lineout(args.fields, args.out, args.axis, args.oracle)
        elif args.command == "plot-convergence":
            plots.plot_convergence(args.table, args.out)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
