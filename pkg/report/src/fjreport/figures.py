"""Figure rendering: scaling plots and ratio heat maps.

Every figure is emitted as PNG + SVG plus a JSON sidecar holding exactly the
values plotted, so figure content is testable without image diffing.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import List, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib import colormaps, colors

from .aggregate import RatioGrid, scaling_series


def ratio_color(value: float, bounds: Tuple[float, float] = (0.5, 1.5)):
    """RGBA for one ratio cell; below-1 and above-1 sit on opposite sides of
    the diverging scale. Exposed so tests can check the mapping directly."""
    norm = colors.Normalize(vmin=bounds[0], vmax=bounds[1], clip=True)
    return colormaps["coolwarm"](norm(value))


def _write_sidecar(payload, stem: Path):
    with open(stem.with_suffix(".json"), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)


def make_scaling_plot(samples: List[dict], kernel: str, threads: int,
                      out_dir: Path) -> List[Path]:
    """MFLOP/s vs size (log x), one line per executor, best-of-trials.

    Returns the emitted paths (png, svg, json).  A missing executor series
    produces a warning annotation instead of a failure.
    """
    series = scaling_series(samples, kernel, threads)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = out_dir / f"scaling_{kernel}_t{threads}"

    fig, ax = plt.subplots(figsize=(6, 4))
    expected = ("amt", "ospool")
    missing = [name for name in expected if name not in series]
    for executor, points in sorted(series.items()):
        xs = [size for size, _ in points]
        ys = [mflops for _, mflops in points]
        marker = "o" if len(points) < 30 else None
        ax.plot(xs, ys, label=executor, marker=marker)
    ax.set_xscale("log")
    ax.set_xlabel("size n")
    ax.set_ylabel("MFLOP/s (best of trials)")
    ax.set_title(f"{kernel}, {threads} threads")
    if series:
        ax.legend()
    if missing:
        ax.annotate(f"missing series: {', '.join(missing)}",
                    xy=(0.02, 0.02), xycoords="axes fraction",
                    fontsize=8, color="firebrick")
    fig.tight_layout()
    png = stem.with_suffix(".png")
    svg = stem.with_suffix(".svg")
    fig.savefig(png)
    fig.savefig(svg)
    plt.close(fig)

    _write_sidecar({
        "figure": "scaling",
        "kernel": kernel,
        "threads": threads,
        "series": {executor: [[size, mflops] for size, mflops in points]
                   for executor, points in sorted(series.items())},
        "missing": missing,
    }, stem)
    return [png, svg, stem.with_suffix(".json")]


def make_ratio_heatmap(grid: RatioGrid, out_dir: Path,
                       bounds: Tuple[float, float] = (0.5, 1.5)) -> List[Path]:
    """Heat map of ratio over (size x threads); missing cells stay neutral.

    Raises ValueError on an empty grid.
    """
    if not grid.threads or not grid.sizes:
        raise ValueError(f"no ratio data for kernel {grid.kernel!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = out_dir / f"heatmap_{grid.kernel}"

    data = np.array([[np.nan if cell is None else cell for cell in row]
                     for row in grid.cells], dtype=float)
    masked = np.ma.masked_invalid(data)
    cmap = colormaps["coolwarm"].copy()
    cmap.set_bad("lightgray")

    fig, ax = plt.subplots(figsize=(7, 4))
    norm = colors.Normalize(vmin=bounds[0], vmax=bounds[1], clip=True)
    image = ax.imshow(masked, cmap=cmap, norm=norm, aspect="auto", origin="lower")
    ax.set_yticks(range(len(grid.threads)), [str(t) for t in grid.threads])
    step = max(1, len(grid.sizes) // 12)
    ax.set_xticks(range(0, len(grid.sizes), step),
                  [str(s) for s in grid.sizes[::step]], rotation=45, fontsize=7)
    ax.set_xlabel("size n")
    ax.set_ylabel("threads")
    ax.set_title(f"{grid.kernel}: MFLOP/s ratio (runtime / OS-pool baseline)")
    fig.colorbar(image, ax=ax, label="ratio")
    fig.tight_layout()
    png = stem.with_suffix(".png")
    svg = stem.with_suffix(".svg")
    fig.savefig(png)
    fig.savefig(svg)
    plt.close(fig)

    _write_sidecar({
        "figure": "heatmap",
        "kernel": grid.kernel,
        "threads": grid.threads,
        "sizes": grid.sizes,
        "cells": grid.cells,
        "bounds": list(bounds),
    }, stem)
    return [png, svg, stem.with_suffix(".json")]
