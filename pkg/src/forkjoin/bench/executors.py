"""Executors that fan a statically partitioned kernel across threads.

All three run the same block function ``fn(block_index, num_blocks)``; they
differ only in what carries the blocks: the task runtime under test, a plain
OS-thread pool (the ratio baseline), or the calling thread.
"""

from __future__ import annotations

import threading

from ..parallel import fork
from ..runtime import RuntimeConfig, current_runtime, ensure_started, shutdown
from ..policies import PolicyKind


class SerialExecutor:
    name = "serial"

    def run(self, fn, nblocks: int) -> None:
        fn(0, 1)

    def close(self):
        pass


class AmtExecutor:
    """Runs blocks as a parallel region on the task runtime."""

    name = "amt"

    def __init__(self, threads: int, policy: PolicyKind = PolicyKind.PRIORITY_LOCAL):
        self.threads = threads
        self.policy = policy
        rt = current_runtime()
        if rt is not None and (rt.num_workers != threads or rt.policy_kind != policy):
            shutdown()
            rt = None
        if rt is None:
            ensure_started(RuntimeConfig(num_workers=threads, policy=policy))

    def run(self, fn, nblocks: int) -> None:
        fork(nblocks, lambda tid: fn(tid, nblocks))

    def close(self):
        pass


class OsThreadPool:
    """Fixed pool of plain OS threads; block i always runs on pool thread i."""

    name = "ospool"

    def __init__(self, threads: int):
        self.threads = threads
        self._cond = threading.Condition()
        self._generation = 0
        self._fn = None
        self._remaining = 0
        self._stop = False
        self._members = [
            threading.Thread(target=self._loop, args=(i,), daemon=True, name=f"ospool-{i}")
            for i in range(threads)
        ]
        for t in self._members:
            t.start()

    def _loop(self, index):
        seen = 0
        while True:
            with self._cond:
                while self._generation == seen and not self._stop:
                    self._cond.wait()
                if self._stop:
                    return
                seen = self._generation
                fn = self._fn
            fn(index, self.threads)
            with self._cond:
                self._remaining -= 1
                if self._remaining == 0:
                    self._cond.notify_all()

    def run(self, fn, nblocks: int) -> None:
        if nblocks != self.threads:
            raise ValueError(f"pool of {self.threads} cannot run {nblocks} blocks")
        with self._cond:
            self._fn = fn
            self._remaining = nblocks
            self._generation += 1
            self._cond.notify_all()
            while self._remaining:
                self._cond.wait()

    def close(self):
        with self._cond:
            self._stop = True
            self._cond.notify_all()
        for t in self._members:
            t.join()


def make_executor(name: str, threads: int, policy: PolicyKind = PolicyKind.PRIORITY_LOCAL):
    if name == "serial":
        return SerialExecutor()
    if name == "amt":
        return AmtExecutor(threads, policy)
    if name == "ospool":
        return OsThreadPool(threads)
    raise ValueError(f"unknown executor {name!r}; expected serial, amt, or ospool")
