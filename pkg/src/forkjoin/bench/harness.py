"""Benchmark sweeps: timed kernel runs, correctness gating, CSV emission.

Every measured run is checked against the serial reference checksum before
its sample is recorded; a mismatch aborts the sweep.  MFLOP/s divides the
kernel's flop count by measured wall seconds.  Ratio files compare the task
runtime against the OS-thread-pool baseline, best-of-trials per size.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

from ..errors import ChecksumMismatchError
from ..loops import SchedKind, static_init
from ..policies import PolicyKind
from .executors import make_executor
from .kernels import KernelJob, KernelKind, flops, runs_parallel, serial_reference

try:
    from threadpoolctl import threadpool_limits
except ImportError:  # pragma: no cover
    threadpool_limits = None

SAMPLES_HEADER = ["kernel", "policy", "executor", "threads", "size", "trial", "seconds", "mflops"]
RATIOS_HEADER = ["kernel", "threads", "size", "mflops_amt", "mflops_baseline", "ratio"]


@dataclass(frozen=True)
class SampleRecord:
    kernel: str
    policy: str
    executor: str
    threads: int
    size: int
    trial: int
    seconds: float
    mflops: float


@dataclass
class BenchmarkConfig:
    kernel: KernelKind
    threads: int = 1
    policy: PolicyKind = PolicyKind.PRIORITY_LOCAL
    sizes: Sequence[int] = ()
    repetitions: int = 5
    executor: str = "amt"

    def __post_init__(self):
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        sizes = list(self.sizes)
        if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("sizes must be a non-empty strictly increasing sequence")


def single_thread_blas():
    """Pin BLAS pools to one thread so measured parallelism is the executor's."""
    if threadpool_limits is None:
        import contextlib

        return contextlib.nullcontext()
    return threadpool_limits(limits=1)


def _block_runner(job: KernelJob):
    limit = job.slice_limit

    def run_block(tid: int, nblocks: int):
        asgn = static_init(nblocks, tid, SchedKind.STATIC_BLOCK, 0, limit - 1, 1)
        if not asgn.empty:
            job.run_slice(asgn.lower, asgn.upper)

    return run_block


def kernel_run(kernel: KernelKind, n: int, executor, threads: int = 1) -> Tuple[float, float]:
    """Execute the kernel once; returns (checksum, wall seconds).

    ``executor`` is an executor object from `make_executor` or one of the
    names "serial", "amt", "ospool".  Work is parallelized only when the
    operand's element count reaches the kernel's threshold; below it the run
    is single-sliced regardless of executor.
    """
    owned = None
    if isinstance(executor, str):
        owned = executor = make_executor(executor, threads)
    job = KernelJob(kernel, n)
    job.reset()
    run_block = _block_runner(job)
    nblocks = getattr(executor, "threads", threads)
    parallel = executor.name != "serial" and runs_parallel(kernel, n)
    try:
        start = time.perf_counter()
        if parallel:
            executor.run(run_block, nblocks)
        else:
            run_block(0, 1)
        seconds = time.perf_counter() - start
    finally:
        if owned is not None:
            owned.close()
    return job.checksum(), seconds


def arithmetic_sizes(min_size: int, max_size: int, steps: int) -> List[int]:
    """Strictly increasing arithmetic progression of ints from min to max."""
    if min_size < 1 or max_size < min_size or steps < 1:
        raise ValueError("need 1 <= min_size <= max_size and steps >= 1")
    if steps == 1 or min_size == max_size:
        return [min_size] if min_size == max_size else [min_size, max_size]
    span = max_size - min_size
    sizes = sorted({min_size + round(i * span / (steps - 1)) for i in range(steps)})
    return sizes


#: Desk-scale default sweeps, ~1e3..1e6 elements in 20 steps.
DEFAULT_SIZE_RANGES = {
    KernelKind.DVECDVECADD: (1_000, 1_000_000),
    KernelKind.DAXPY: (1_000, 1_000_000),
    KernelKind.DMATDMATADD: (32, 1_000),
    KernelKind.DMATDMATMULT: (32, 1_000),
}


def run_sweep(config: BenchmarkConfig) -> List[SampleRecord]:
    """Run the configured kernel over each size x trial on one executor.

    Each run's checksum is compared with the serial reference before the
    sample is recorded; a mismatch raises ChecksumMismatchError.
    """
    records: List[SampleRecord] = []
    kernel = config.kernel
    with single_thread_blas():
        executor = make_executor(config.executor, config.threads, config.policy)
        try:
            for size in config.sizes:
                expected = serial_reference(kernel, size)
                for trial in range(config.repetitions):
                    got, seconds = kernel_run(kernel, size, executor, config.threads)
                    if got != expected:
                        raise ChecksumMismatchError(
                            f"{kernel} n={size} on {config.executor}: "
                            f"checksum {got!r} != serial reference {expected!r}"
                        )
                    records.append(SampleRecord(
                        kernel=str(kernel),
                        policy=str(config.policy),
                        executor=config.executor,
                        threads=config.threads,
                        size=size,
                        trial=trial,
                        seconds=seconds,
                        mflops=flops(kernel, size) / (seconds * 1e6),
                    ))
        finally:
            executor.close()
    return records


def best_of(records: Iterable[SampleRecord]) -> Dict[Tuple[str, str, int, int], float]:
    """Best-of-trials MFLOP/s keyed by (kernel, executor, threads, size)."""
    best: Dict[Tuple[str, str, int, int], float] = {}
    for r in records:
        key = (r.kernel, r.executor, r.threads, r.size)
        if key not in best or r.mflops > best[key]:
            best[key] = r.mflops
    return best


def ratio_rows(amt_records: Iterable[SampleRecord],
               baseline_records: Iterable[SampleRecord]) -> List[dict]:
    """Per-size ratio of best amt MFLOP/s to best baseline MFLOP/s."""
    amt_best = best_of(amt_records)
    base_best = best_of(baseline_records)
    rows = []
    for (kernel, _ex, threads, size), mflops_amt in sorted(amt_best.items()):
        base = base_best.get((kernel, "ospool", threads, size))
        if base is None:
            continue
        rows.append({
            "kernel": kernel,
            "threads": threads,
            "size": size,
            "mflops_amt": mflops_amt,
            "mflops_baseline": base,
            "ratio": mflops_amt / base,
        })
    return rows


def run_ratio_sweep(config: BenchmarkConfig) -> Tuple[List[SampleRecord], List[dict]]:
    """Run the sweep on both the task runtime and the OS-pool baseline."""
    amt = run_sweep(BenchmarkConfig(config.kernel, config.threads, config.policy,
                                    config.sizes, config.repetitions, "amt"))
    base = run_sweep(BenchmarkConfig(config.kernel, config.threads, config.policy,
                                     config.sizes, config.repetitions, "ospool"))
    return amt + base, ratio_rows(amt, base)


def write_samples_csv(records: Iterable[SampleRecord], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SAMPLES_HEADER)
        for r in records:
            writer.writerow([r.kernel, r.policy, r.executor, r.threads,
                             r.size, r.trial, repr(r.seconds), repr(r.mflops)])


def write_ratios_csv(rows: Iterable[dict], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RATIOS_HEADER)
        for row in rows:
            writer.writerow([row["kernel"], row["threads"], row["size"],
                             repr(row["mflops_amt"]), repr(row["mflops_baseline"]),
                             repr(row["ratio"])])
