"""
Benchmarks and figures
======================

The bench harness times four dense linear-algebra kernels on three executors
(the task runtime, an OS-thread pool baseline, serial) with per-kernel
parallelization thresholds, checks every run against the serial oracle, and
emits CSVs. The fjreport package (and its `report` CLI) turns those CSVs
into scaling plots and ratio heat maps.

Equivalent shell commands:
    bench --kernel daxpy --threads 2 --policy abp --executor amt \
          --min-size 1000 --max-size 200000 --steps 8 --reps 3 \
          --out samples.csv --ratio-out ratios.csv
    report --samples samples.csv --ratios ratios.csv --out figures/
"""

import tempfile
from pathlib import Path

import forkjoin as fj
from forkjoin.bench import (
    BenchmarkConfig,
    KernelKind,
    PARALLEL_THRESHOLDS,
    flops,
    kernel_run,
    run_ratio_sweep,
    write_ratios_csv,
    write_samples_csv,
)

# One timed run: checksum plus wall seconds. Below the kernel's threshold the
# run stays single-sliced no matter which executor is asked for.
checksum, seconds = kernel_run(KernelKind.DAXPY, 1_000, "serial")
print(f"daxpy n=1000 serial: checksum={checksum}, {seconds*1e6:.0f} us")
print("thresholds (elements):", {str(k): v for k, v in PARALLEL_THRESHOLDS.items()})
print("daxpy flops at n=1000:", flops(KernelKind.DAXPY, 1_000))

# A small sweep on both executors, with the ratio table.
config = BenchmarkConfig(
    kernel=KernelKind.DVECDVECADD,
    threads=2,
    policy=fj.PolicyKind.ABP_STEALING,
    sizes=[10_000, 50_000, 200_000],
    repetitions=3,
    executor="amt",
)
samples, ratios = run_ratio_sweep(config)
fj.shutdown()

out = Path(tempfile.mkdtemp(prefix="fj-bench-"))
write_samples_csv(samples, out / "samples.csv")
write_ratios_csv(ratios, out / "ratios.csv")
print("wrote", out / "samples.csv")
for row in ratios:
    print(f"  n={row['size']:>7}: amt {row['mflops_amt']:8.1f} MFLOP/s, "
          f"baseline {row['mflops_baseline']:8.1f}, ratio {row['ratio']:.2f}")

# Render figures if fjreport is installed (pip install -e report/).
try:
    from fjreport.cli import main as report_main
except ImportError:
    print("fjreport not installed; skipping figures")
else:
    report_main(["--samples", str(out / "samples.csv"),
                 "--ratios", str(out / "ratios.csv"),
                 "--out", str(out / "figures"),
                 "--threads", "2"])
