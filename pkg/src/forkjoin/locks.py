"""Suspension-based locks, named critical sections, and atomic updates.

A task blocked on any of these suspends itself; the worker underneath it
keeps running other tasks.  Callers that are not tasks (e.g. the main thread)
fall back to plain event waits.  Release wakes the oldest waiter, which then
retries the acquisition; a running task may barge in ahead of it.  That keeps
the uncontended path free of scheduler round-trips and avoids convoying the
lock behind suspended owners.
"""

from __future__ import annotations

import threading
from collections import deque

from .errors import LockOwnershipError
from .runtime import current_task, make_wait_token


def _holder_id():
    task = current_task()
    if task is not None:
        return ("task", task.tid)
    return ("thread", threading.get_ident())


class SimpleLock:
    """Non-reentrant lock. Re-acquisition by the holder raises (it would
    deadlock a single owner forever otherwise)."""

    __slots__ = ("_guard", "_owner", "_waiters")

    def __init__(self):
        self._guard = threading.Lock()
        self._owner = None
        self._waiters = deque()

    def set(self) -> None:
        me = _holder_id()
        while True:
            with self._guard:
                owner = self._owner
                if owner is None:
                    self._owner = me
                    return
                if owner == me:
                    raise LockOwnershipError("simple lock is not reentrant")
                tok = make_wait_token()
                self._waiters.append(tok)
            tok.park()  # woken by a release; retry

    def unset(self) -> None:
        me = _holder_id()
        with self._guard:
            if self._owner != me:
                raise LockOwnershipError(
                    "unset of a lock not held by the caller"
                    if self._owner is not None else "unset of a free lock"
                )
            self._owner = None
            tok = self._waiters.popleft() if self._waiters else None
        if tok is not None:
            tok.fire()

    def test(self) -> bool:
        """Acquire if free; never waits."""
        me = _holder_id()
        with self._guard:
            if self._owner is None:
                self._owner = me
                return True
            return False

    @property
    def held(self) -> bool:
        return self._owner is not None


class NestLock:
    """Reentrant lock tracked by depth; released when depth returns to zero."""

    __slots__ = ("_guard", "_owner", "_depth", "_waiters")

    def __init__(self):
        self._guard = threading.Lock()
        self._owner = None
        self._depth = 0
        self._waiters = deque()

    def set(self) -> None:
        me = _holder_id()
        while True:
            with self._guard:
                owner = self._owner
                if owner is None:
                    self._owner = me
                    self._depth = 1
                    return
                if owner == me:
                    self._depth += 1
                    return
                tok = make_wait_token()
                self._waiters.append(tok)
            tok.park()  # woken by a release; retry

    def unset(self) -> None:
        me = _holder_id()
        tok = None
        with self._guard:
            if self._owner != me:
                raise LockOwnershipError(
                    "unset of a nest lock not held by the caller"
                    if self._owner is not None else "unset of a free nest lock"
                )
            self._depth -= 1
            if self._depth == 0:
                self._owner = None
                if self._waiters:
                    tok = self._waiters.popleft()
        if tok is not None:
            tok.fire()

    def test(self) -> int:
        """Acquire (or re-enter) without waiting; new depth on success, 0 otherwise."""
        me = _holder_id()
        with self._guard:
            if self._owner is None:
                self._owner = me
                self._depth = 1
                return 1
            if self._owner == me:
                self._depth += 1
                return self._depth
            return 0

    @property
    def depth(self) -> int:
        return self._depth


def lock_init() -> SimpleLock:
    return SimpleLock()


def lock_set(lock: SimpleLock) -> None:
    lock.set()


def lock_unset(lock: SimpleLock) -> None:
    lock.unset()


def lock_test(lock: SimpleLock) -> bool:
    return lock.test()


def nest_lock_init() -> NestLock:
    return NestLock()


def nest_lock_set(lock: NestLock) -> None:
    lock.set()


def nest_lock_unset(lock: NestLock) -> None:
    lock.unset()


def nest_lock_test(lock: NestLock) -> int:
    return lock.test()


# -- critical sections -------------------------------------------------------

DEFAULT_CRITICAL = "<default>"

_critical_registry: dict[str, SimpleLock] = {}
_critical_registry_guard = threading.Lock()


def _critical_lock(name: str) -> SimpleLock:
    lock = _critical_registry.get(name)
    if lock is None:
        with _critical_registry_guard:
            lock = _critical_registry.setdefault(name, SimpleLock())
    return lock


def critical_enter(name: str = DEFAULT_CRITICAL) -> None:
    """Mutual exclusion against every task using the same critical name."""
    _critical_lock(name).set()


def critical_exit(name: str = DEFAULT_CRITICAL) -> None:
    _critical_lock(name).unset()


# -- atomic updates ----------------------------------------------------------


class AtomicCell:
    """A single mutable value updated under its own mutex."""

    __slots__ = ("_lock", "value")

    def __init__(self, value=0):
        self._lock = threading.Lock()
        self.value = value

    def update(self, op):
        with self._lock:
            self.value = op(self.value)
            return self.value

    def add(self, delta=1):
        with self._lock:
            self.value += delta
            return self.value


def atomic_update(cell: AtomicCell, op) -> None:
    """Apply a read-modify-write to the cell atomically."""
    cell.update(op)
