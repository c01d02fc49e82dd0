"""Command-line entry point: `plots render --spec figure.json`."""

from __future__ import annotations

import argparse
import sys

from .errors import SchemaError, SpecError
from .figspec import load_spec
from .render import render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots",
        description="render solver CSV artifacts as SVG and PNG figures")
    sub = parser.add_subparsers(dest="verb", required=True)
    p_render = sub.add_parser("render", help="draw one figure from a spec")
    p_render.add_argument("--spec", required=True,
                          help="JSON figure spec path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        svg, png = render(load_spec(args.spec))
    except (SpecError, SchemaError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print(svg)
    print(png)
    return 0


if __name__ == "__main__":
    sys.exit(main())
