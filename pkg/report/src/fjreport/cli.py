"""Command line entry point: ``report``.

Reads the bench CSVs and writes one scaling figure per (kernel, thread count)
plus one ratio heat map per kernel, each as PNG + SVG + JSON sidecar.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .aggregate import ReportConfig, kernels_in, ratio_grid, read_ratios, read_samples
from .figures import make_ratio_heatmap, make_scaling_plot


def parse_threads(text: str):
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad thread list: {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"bad thread list: {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="report",
        description="Render benchmark CSVs into scaling plots and ratio heat maps",
    )
    parser.add_argument("--samples", metavar="FILE", default=None,
                        help="samples CSV from the bench harness")
    parser.add_argument("--ratios", metavar="FILE", default=None,
                        help="ratio CSV from the bench harness")
    parser.add_argument("--out", metavar="DIR", required=True)
    parser.add_argument("--threads", type=parse_threads, default=[4, 8, 16],
                        metavar="4,8,16", help="thread counts to plot")
    return parser


def run(config: ReportConfig):
    emitted = []
    if config.samples_path is not None:
        samples = read_samples(config.samples_path)
        for kernel in kernels_in(samples):
            for threads in config.threads:
                emitted += make_scaling_plot(samples, kernel, threads, config.out_dir)
    if config.ratios_path is not None:
        ratios = read_ratios(config.ratios_path)
        for kernel in sorted({row["kernel"] for row in ratios}):
            emitted += make_ratio_heatmap(ratio_grid(ratios, kernel), config.out_dir,
                                          config.ratio_bounds)
    return emitted


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.samples is None and args.ratios is None:
        print("report: need --samples and/or --ratios", file=sys.stderr)
        return 2
    config = ReportConfig(
        samples_path=Path(args.samples) if args.samples else None,
        ratios_path=Path(args.ratios) if args.ratios else None,
        out_dir=Path(args.out),
        threads=args.threads,
    )
    emitted = run(config)
    for path in emitted:
        print(path)
    print(f"wrote {len(emitted)} files to {config.out_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
