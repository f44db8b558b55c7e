"""Reading benchmark CSVs and aggregating them for plotting.

Input schemas (produced by the bench harness):
  samples: kernel,policy,executor,threads,size,trial,seconds,mflops
  ratios:  kernel,threads,size,mflops_amt,mflops_baseline,ratio

Aggregation keeps the best (max) MFLOP/s over trials per cell; all values are
carried as exact floats so figure sidecars reproduce the inputs bit-for-bit.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

SAMPLES_FIELDS = ["kernel", "policy", "executor", "threads", "size", "trial", "seconds", "mflops"]
RATIOS_FIELDS = ["kernel", "threads", "size", "mflops_amt", "mflops_baseline", "ratio"]


@dataclass
class ReportConfig:
    samples_path: Optional[Path] = None
    ratios_path: Optional[Path] = None
    out_dir: Path = Path(".")
    threads: Sequence[int] = (4, 8, 16)
    ratio_bounds: Tuple[float, float] = (0.5, 1.5)


class SchemaError(ValueError):
    """Input CSV does not match the expected schema."""


def _check_header(header, expected, path):
    if header != expected:
        raise SchemaError(f"{path}: expected header {expected}, got {header}")


def read_samples(path) -> List[dict]:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        _check_header(header, SAMPLES_FIELDS, path)
        for raw in reader:
            rows.append({
                "kernel": raw[0],
                "policy": raw[1],
                "executor": raw[2],
                "threads": int(raw[3]),
                "size": int(raw[4]),
                "trial": int(raw[5]),
                "seconds": float(raw[6]),
                "mflops": float(raw[7]),
            })
    return rows


def read_ratios(path) -> List[dict]:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        _check_header(header, RATIOS_FIELDS, path)
        for raw in reader:
            rows.append({
                "kernel": raw[0],
                "threads": int(raw[1]),
                "size": int(raw[2]),
                "mflops_amt": float(raw[3]),
                "mflops_baseline": float(raw[4]),
                "ratio": float(raw[5]),
            })
    return rows


def best_of_trials(samples: List[dict]) -> Dict[Tuple[str, str, int, int], float]:
    """Max MFLOP/s per (kernel, executor, threads, size)."""
    best: Dict[Tuple[str, str, int, int], float] = {}
    for row in samples:
        key = (row["kernel"], row["executor"], row["threads"], row["size"])
        value = row["mflops"]
        if key not in best or value > best[key]:
            best[key] = value
    return best


def scaling_series(samples: List[dict], kernel: str, threads: int) -> Dict[str, List[Tuple[int, float]]]:
    """Per-executor [(size, best mflops)] sorted by size."""
    best = best_of_trials(samples)
    series: Dict[str, List[Tuple[int, float]]] = defaultdict(list)
    for (kern, executor, thr, size), mflops in best.items():
        if kern == kernel and thr == threads:
            series[executor].append((size, mflops))
    return {executor: sorted(points) for executor, points in series.items()}


def kernels_in(samples: List[dict]) -> List[str]:
    return sorted({row["kernel"] for row in samples})


@dataclass
class RatioGrid:
    kernel: str
    threads: List[int] = field(default_factory=list)
    sizes: List[int] = field(default_factory=list)
    cells: List[List[Optional[float]]] = field(default_factory=list)  # [thread][size]


def ratio_grid(ratios: List[dict], kernel: str) -> RatioGrid:
    """Dense (threads x sizes) grid; holes stay None."""
    mine = [row for row in ratios if row["kernel"] == kernel]
    threads = sorted({row["threads"] for row in mine})
    sizes = sorted({row["size"] for row in mine})
    index = {(row["threads"], row["size"]): row["ratio"] for row in mine}
    cells = [[index.get((t, s)) for s in sizes] for t in threads]
    return RatioGrid(kernel=kernel, threads=threads, sizes=sizes, cells=cells)
