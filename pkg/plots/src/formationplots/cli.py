"""Command line: plot <kind> --in log.csv --out fig.png [--vehicles 1,2,3]."""

from __future__ import annotations

import argparse
import sys

from .render import AXES, KINDS, PlotError, PlotSpec, render


def _vehicles(raw):
    try:
        ids = tuple(int(v) for v in raw.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad vehicle list {raw!r}")
    if any(i < 1 for i in ids):
        raise argparse.ArgumentTypeError("vehicle indices are 1-based")
    return ids


def build_parser():
    p = argparse.ArgumentParser(
        prog="plot", description="Render figures from simulation CSV logs."
    )
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--in", dest="input_csv", required=True, help="input CSV log")
    p.add_argument("--out", dest="output", required=True, help="output image path")
    p.add_argument("--axis", choices=AXES, default="x",
                   help="component for the error kinds")
    p.add_argument("--vehicles", type=_vehicles, default=(),
                   help="comma-separated 1-based subset, default all")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = render(PlotSpec(
            input_csv=args.input_csv, kind=args.kind, output=args.output,
            axis=args.axis, vehicles=args.vehicles,
        ))
    except PlotError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
