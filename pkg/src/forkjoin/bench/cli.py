"""Command line entry point: ``bench``.

Runs one kernel sweep and writes a samples CSV; with --executor amt and
--ratio-out it additionally runs the OS-pool baseline and writes the ratio
file.  Size flags define an arithmetic progression of the kernel's size
parameter (vector length or matrix dimension).
"""

from __future__ import annotations

import argparse
import os
import sys

from ..policies import PolicyKind
from ..runtime import shutdown
from .harness import (
    DEFAULT_SIZE_RANGES,
    BenchmarkConfig,
    arithmetic_sizes,
    best_of,
    run_ratio_sweep,
    run_sweep,
    write_ratios_csv,
    write_samples_csv,
)
from .kernels import KernelKind


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bench",
        description="MFLOP/s benchmark harness for the fork-join runtime",
    )
    parser.add_argument("--kernel", required=True,
                        choices=[str(k) for k in KernelKind])
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        metavar="N")
    parser.add_argument("--policy", default="priority-local",
                        choices=[str(p) for p in PolicyKind])
    parser.add_argument("--executor", default="amt",
                        choices=["amt", "ospool", "serial"])
    parser.add_argument("--min-size", type=int, default=None, metavar="A")
    parser.add_argument("--max-size", type=int, default=None, metavar="B")
    parser.add_argument("--steps", type=int, default=20, metavar="K")
    parser.add_argument("--reps", type=int, default=5, metavar="R")
    parser.add_argument("--out", required=True, metavar="FILE.csv")
    parser.add_argument("--ratio-out", default=None, metavar="FILE.csv",
                        help="also run the ospool baseline and write ratio rows"
                             " (amt executor only)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    kernel = KernelKind.parse(args.kernel)
    policy = PolicyKind.parse(args.policy)

    lo, hi = DEFAULT_SIZE_RANGES[kernel]
    min_size = args.min_size if args.min_size is not None else lo
    max_size = args.max_size if args.max_size is not None else hi
    sizes = arithmetic_sizes(min_size, max_size, args.steps)

    config = BenchmarkConfig(kernel=kernel, threads=args.threads, policy=policy,
                             sizes=sizes, repetitions=args.reps,
                             executor=args.executor)
    try:
        if args.ratio_out:
            if args.executor != "amt":
                print("bench: --ratio-out requires --executor amt", file=sys.stderr)
                return 2
            records, ratios = run_ratio_sweep(config)
            write_ratios_csv(ratios, args.ratio_out)
        else:
            records = run_sweep(config)
        write_samples_csv(records, args.out)
    finally:
        shutdown()

    peak = best_of(records)
    for (kern, executor, threads, size), mflops in sorted(peak.items()):
        print(f"{kern} {executor} t={threads} n={size}: {mflops:.1f} MFLOP/s")
    print(f"wrote {len(records)} samples to {args.out}")
    if args.ratio_out:
        print(f"wrote ratios to {args.ratio_out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
