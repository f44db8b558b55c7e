"""Benchmark harness: kernels, executors, sweeps, and the ``bench`` CLI."""

from .executors import AmtExecutor, OsThreadPool, SerialExecutor, make_executor
from .harness import (
    BenchmarkConfig,
    DEFAULT_SIZE_RANGES,
    RATIOS_HEADER,
    SAMPLES_HEADER,
    SampleRecord,
    arithmetic_sizes,
    best_of,
    kernel_run,
    ratio_rows,
    run_ratio_sweep,
    run_sweep,
    single_thread_blas,
    write_ratios_csv,
    write_samples_csv,
)
from .kernels import (
    KernelKind,
    PARALLEL_THRESHOLDS,
    checksum,
    element_count,
    flops,
    runs_parallel,
    serial_reference,
)

__all__ = [
    "AmtExecutor", "BenchmarkConfig", "DEFAULT_SIZE_RANGES", "KernelKind",
    "OsThreadPool", "PARALLEL_THRESHOLDS", "RATIOS_HEADER", "SAMPLES_HEADER",
    "SampleRecord", "SerialExecutor", "arithmetic_sizes", "best_of", "checksum",
    "element_count", "flops", "kernel_run", "make_executor", "ratio_rows",
    "run_ratio_sweep", "run_sweep", "runs_parallel", "serial_reference",
    "single_thread_blas", "write_ratios_csv", "write_samples_csv",
]
