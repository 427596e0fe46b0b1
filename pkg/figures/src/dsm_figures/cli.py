"""render_figure command line interface.

Exit codes: 0 success, 1 bad spec/input data (schema mismatch, empty CSV,
unreadable file), 2 unexpected failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .figspec import FIGURE_KEYS, FORMATS, FigureSpec
from .render import render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render_figure",
        description="Render one figure from dsm-lab trial and summary CSVs.",
    )
    parser.add_argument(
        "--spec",
        help="figure spec as a JSON file; individual flags override its fields",
    )
    parser.add_argument("--figure", choices=FIGURE_KEYS, help="which figure to render")
    parser.add_argument("--trials", help="path to the per-trial CSV")
    parser.add_argument("--summary", help="path to the per-cell summary CSV")
    parser.add_argument("--out", help="output image path")
    parser.add_argument(
        "--format", choices=FORMATS, help="image format (default: from --out suffix)"
    )
    parser.add_argument(
        "--bin-width", type=float, help="histogram bin width (default 0.01)"
    )
    parser.add_argument(
        "--region",
        nargs=2,
        type=float,
        metavar=("LO", "HI"),
        help="shade this fidelity interval on the coverage figure",
    )
    parser.add_argument(
        "--dump", help="also write the plotted data series to this JSON file"
    )
    return parser


def _spec_from_args(args: argparse.Namespace) -> FigureSpec:
    overrides: dict = {}
    for name in ("figure", "trials", "summary", "out", "format", "dump"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    if args.bin_width is not None:
        overrides["bin_width"] = args.bin_width
    if args.region is not None:
        overrides["region_lower"], overrides["region_upper"] = args.region

    if args.spec:
        spec = FigureSpec.from_json_file(args.spec)
        return dataclasses.replace(spec, **overrides) if overrides else spec

    missing = [n for n in ("figure", "trials", "summary", "out") if n not in overrides]
    if missing:
        raise ValueError(
            "missing required argument(s): " + ", ".join(f"--{n}" for n in missing)
        )
    return FigureSpec(**overrides)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; fold that into the bad-input
        # code so callers see the documented 0/1/2 scheme (help stays 0)
        return 0 if exc.code in (0, None) else 1

    try:
        spec = _spec_from_args(args)
        render(spec)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"unexpected error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {spec.out}")
    if spec.dump is not None:
        print(f"wrote {spec.dump}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
