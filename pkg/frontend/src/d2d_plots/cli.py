"""Command line entry: plot_figures <csv_dir> <out_dir> [--figs ...]."""

import argparse
import sys
from pathlib import Path

from .figures import FIGURE_SPECS, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot_figures",
        description="render figure analogues from simulator CSV outputs")
    parser.add_argument("csv_dir", type=Path,
                        help="directory holding fig2/ .. fig6/ CSV sets")
    parser.add_argument("out_dir", type=Path,
                        help="directory receiving one image per figure")
    parser.add_argument("--figs", default=None,
                        help="comma-separated subset, e.g. fig2,fig5")
    args = parser.parse_args(argv)

    figs = (args.figs.split(",") if args.figs
            else sorted(FIGURE_SPECS))
    try:
        for fig in figs:
            path = render(fig, args.csv_dir, args.out_dir)
            print(f"wrote {path}")
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def entry():
    sys.exit(main())
