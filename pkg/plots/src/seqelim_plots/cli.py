"""Command-line entry: seqelim-plot --in bench.csv --out chart.svg."""

from __future__ import annotations

import argparse
import sys

from .render import PlotInputError, PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqelim-plot",
        description="Grouped bar charts from benchmark CSV files",
    )
    parser.add_argument(
        "--in",
        dest="inputs",
        action="append",
        required=True,
        help="input CSV (repeatable)",
    )
    parser.add_argument("--out", required=True, help="output image (.svg or .png)")
    parser.add_argument(
        "--group-by",
        default="setup,K",
        help="comma-separated grouping columns (default setup,K)",
    )
    parser.add_argument(
        "--title",
        default="misidentification probability ({group})",
        help="panel title template; {group} expands to the group key",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(
        inputs=tuple(args.inputs),
        out=args.out,
        group_by=tuple(g.strip() for g in args.group_by.split(",") if g.strip()),
        title=args.title,
    )
    try:
        result = render(spec)
    except (PlotInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {result.out} ({len(result.panels)} panel(s))")
    return 0


if __name__ == "__main__":
    sys.exit(main())
