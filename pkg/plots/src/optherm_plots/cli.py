"""Command-line front end: ``plot <figure-id> --in <csv> --out <img>``.

``--dump`` prints the plotted columns as text, bit-identical to the input
cells, instead of writing an image.
"""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURES, dump_text, render
from .io import PlotError, read_table


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render a thermometry CSV into one of the paper-style "
        "figure panels, or dump the plotted columns as text.",
    )
    parser.add_argument("figure_id", choices=sorted(FIGURES))
    parser.add_argument("--in", dest="input", required=True, help="input CSV path")
    parser.add_argument("--out", dest="output", help="output image path")
    parser.add_argument("--dump", action="store_true",
                        help="print the plotted columns instead of rendering")
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        table = read_table(args.input)
        if args.dump:
            sys.stdout.write(dump_text(args.figure_id, table))
            return 0
        if not args.output:
            print("error: --out is required unless --dump is given", file=sys.stderr)
            return 2
        fig = render(args.figure_id, table)
        fig.savefig(args.output, dpi=args.dpi)
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
