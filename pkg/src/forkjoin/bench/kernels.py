"""The four dense linear-algebra kernels and their accounting.

Inputs are deterministic small integers (stored as float64), so every
intermediate value in any execution order is an exact integer well below
2**53: parallel and serial runs produce bit-identical results and the
position-weighted checksum is an exact equality check, not a tolerance.
"""

from __future__ import annotations

import enum
from functools import lru_cache

import numpy as np


class KernelKind(enum.Enum):
    DVECDVECADD = "dvecdvecadd"
    DAXPY = "daxpy"
    DMATDMATADD = "dmatdmatadd"
    DMATDMATMULT = "dmatdmatmult"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, name: str) -> "KernelKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown kernel {name!r}; expected one of: {valid}") from None


#: Minimum element count at which a kernel runs in parallel at all.
PARALLEL_THRESHOLDS = {
    KernelKind.DVECDVECADD: 38_000,
    KernelKind.DAXPY: 38_000,
    KernelKind.DMATDMATADD: 36_100,
    KernelKind.DMATDMATMULT: 3_025,
}

_MATRIX_KERNELS = (KernelKind.DMATDMATADD, KernelKind.DMATDMATMULT)

# Guard: refuse sizes whose element count would not fit comfortably in memory.
_MAX_ELEMENTS = 2**31


def is_matrix_kernel(kernel: KernelKind) -> bool:
    return kernel in _MATRIX_KERNELS


def element_count(kernel: KernelKind, n: int) -> int:
    """Elements of the target operand: n for vectors, n*n for matrices."""
    if n < 1:
        raise ValueError(f"kernel size must be >= 1, got {n}")
    count = n * n if is_matrix_kernel(kernel) else n
    if count > _MAX_ELEMENTS:
        raise ValueError(f"{kernel} size {n} overflows the element budget ({count} elements)")
    return count


def flops(kernel: KernelKind, n: int) -> int:
    """Floating point operations per kernel execution (BLAS accounting)."""
    if n < 1:
        raise ValueError(f"kernel size must be >= 1, got {n}")
    if kernel == KernelKind.DVECDVECADD:
        return n
    if kernel == KernelKind.DAXPY:
        return 2 * n
    if kernel == KernelKind.DMATDMATADD:
        return n * n
    return 2 * n**3


def runs_parallel(kernel: KernelKind, n: int) -> bool:
    return element_count(kernel, n) >= PARALLEL_THRESHOLDS[kernel]


@lru_cache(maxsize=2)
def _vector_inputs(n: int):
    idx = np.arange(n, dtype=np.int64)
    a = ((idx % 7) + 1).astype(np.float64)
    b = ((idx % 5) + 1).astype(np.float64)
    a.setflags(write=False)
    b.setflags(write=False)
    return a, b


@lru_cache(maxsize=2)
def _matrix_inputs(n: int):
    idx = np.arange(n * n, dtype=np.int64)
    a = ((idx % 7) + 1).astype(np.float64).reshape(n, n)
    b = ((idx % 5) + 1).astype(np.float64).reshape(n, n)
    a.setflags(write=False)
    b.setflags(write=False)
    return a, b


@lru_cache(maxsize=4)
def _checksum_weights(count: int):
    w = ((np.arange(count, dtype=np.int64) % 9) + 1).astype(np.float64)
    w.setflags(write=False)
    return w


def checksum(out: np.ndarray) -> float:
    """Position-weighted exact checksum of a result buffer."""
    flat = out.reshape(-1)
    return float(flat @ _checksum_weights(flat.shape[0]))


class KernelJob:
    """One kernel instance: inputs, a result buffer, and a row/element-sliced
    worker function suitable for static partitioning."""

    def __init__(self, kernel: KernelKind, n: int):
        element_count(kernel, n)  # size validation
        self.kernel = kernel
        self.n = n
        if is_matrix_kernel(kernel):
            self.a, self.b = _matrix_inputs(n)
        else:
            self.a, self.b = _vector_inputs(n)
        self.out = None

    def reset(self):
        """Allocate/refresh the output buffer (outside the timed section)."""
        if self.kernel == KernelKind.DAXPY:
            self.out = self.b.copy()
        else:
            self.out = np.empty_like(self.a)

    def run_slice(self, lo: int, hi: int):
        """Apply the kernel to rows/elements lo..hi inclusive."""
        kernel = self.kernel
        sl = slice(lo, hi + 1)
        if kernel == KernelKind.DVECDVECADD:
            np.add(self.a[sl], self.b[sl], out=self.out[sl])
        elif kernel == KernelKind.DAXPY:
            chunk = self.out[sl]
            chunk += 3.0 * self.a[sl]
        elif kernel == KernelKind.DMATDMATADD:
            np.add(self.a[sl], self.b[sl], out=self.out[sl])
        else:
            np.matmul(self.a[sl], self.b, out=self.out[sl])

    @property
    def slice_limit(self) -> int:
        """Highest sliceable index + 1 (rows for matrices, elements for vectors)."""
        return self.n

    def checksum(self) -> float:
        return checksum(self.out)


def serial_reference(kernel: KernelKind, n: int) -> float:
    """Checksum of the kernel computed single-sliced: the correctness oracle."""
    job = KernelJob(kernel, n)
    job.reset()
    job.run_slice(0, job.slice_limit - 1)
    return job.checksum()
