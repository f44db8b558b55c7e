"""fjreport: batch figure generation from fork-join benchmark CSVs."""

from .aggregate import (
    RatioGrid,
    ReportConfig,
    SchemaError,
    best_of_trials,
    kernels_in,
    ratio_grid,
    read_ratios,
    read_samples,
    scaling_series,
)
from .figures import make_ratio_heatmap, make_scaling_plot, ratio_color

__version__ = "0.1.0"

__all__ = [
    "RatioGrid", "ReportConfig", "SchemaError", "best_of_trials", "kernels_in",
    "make_ratio_heatmap", "make_scaling_plot", "ratio_color", "ratio_grid",
    "read_ratios", "read_samples", "scaling_series",
]
