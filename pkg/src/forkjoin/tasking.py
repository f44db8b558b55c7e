"""Explicit tasks with in/out/inout dependencies, and taskwait.

Dependence keys are arbitrary hashable values.  Edges follow the usual rules:
a reader depends on the last writer of its key; a writer depends on the last
writer and every reader registered since.  Tasks whose predecessors are still
running stay parked in the dependency table and enter the scheduler the
moment their last predecessor finishes.

Sibling tasks share one dependency scope: the table of their common creator
(one root scope serves spawns from outside any task).
"""

from __future__ import annotations

import enum
import threading
from typing import Callable, Iterable, Optional, Tuple

from . import tooling
from .runtime import (
    Priority,
    Runtime,
    current_task,
    ensure_started,
    make_task,
    make_wait_token,
)

_disp = tooling.dispatcher()


class DepMode(enum.Enum):
    IN = "in"
    OUT = "out"
    INOUT = "inout"


class _DepTable:
    """Per-scope dependence bookkeeping."""

    __slots__ = ("lock", "keys", "succs", "pred_count")

    def __init__(self):
        self.lock = threading.Lock()
        self.keys = {}        # key -> [last_writer_task | None, readers_since: list]
        self.succs = {}       # tid -> tasks waiting on it
        self.pred_count = {}  # tid -> outstanding predecessor edges

    def register(self, task, deps) -> int:
        """Record ``task``'s edges; returns how many are still unsatisfied."""
        npred = 0
        with self.lock:
            for key, mode in deps:
                entry = self.keys.get(key)
                if entry is None:
                    entry = [None, []]
                    self.keys[key] = entry
                writer, readers = entry
                if mode is DepMode.IN:
                    preds = (writer,) if writer is not None else ()
                else:
                    preds = ([writer] if writer is not None else []) + readers
                for pred in preds:
                    # A finished predecessor imposes no wait; anything else
                    # gets a successor edge drained by its finish hook.
                    if pred is task or pred.state == 3:  # _FINISHED
                        continue
                    self.succs.setdefault(pred.tid, []).append(task)
                    npred += 1
                if mode is DepMode.IN:
                    readers.append(task)
                else:
                    entry[0] = task
                    entry[1] = []
            if npred:
                self.pred_count[task.tid] = npred
        return npred

    def task_finished(self, task, rt: Runtime):
        ready = []
        with self.lock:
            for succ in self.succs.pop(task.tid, ()):
                remaining = self.pred_count[succ.tid] - 1
                if remaining:
                    self.pred_count[succ.tid] = remaining
                else:
                    del self.pred_count[succ.tid]
                    ready.append(succ)
        for succ in ready:
            rt.push_deferred(succ)


class _ChildLatch:
    __slots__ = ("lock", "outstanding", "waiters")

    def __init__(self):
        self.lock = threading.Lock()
        self.outstanding = 0
        self.waiters = []


_ROOT_SCOPE = 0


def _scope_tid() -> int:
    task = current_task()
    return task.tid if task is not None else _ROOT_SCOPE


def _dep_table(rt: Runtime, scope: int) -> _DepTable:
    key = ("deps", scope)
    table = rt.aux.get(key)
    if table is None:
        with rt.aux_lock:
            table = rt.aux.setdefault(key, _DepTable())
    return table


def _child_latch(rt: Runtime, scope: int, create: bool) -> Optional[_ChildLatch]:
    key = ("children", scope)
    latch = rt.aux.get(key)
    if latch is None and create:
        with rt.aux_lock:
            latch = rt.aux.setdefault(key, _ChildLatch())
    return latch


Dep = Tuple[object, DepMode]


def task_spawn(body: Callable[[], None],
               deps: Optional[Iterable[Dep]] = None,
               priority: Priority = Priority.NORMAL) -> int:
    """Create and schedule an explicit task; returns its id.

    The task starts once every dependence edge is satisfied.  The caller's
    team context (if any) is inherited.
    """
    rt = ensure_started()
    deps = tuple(deps) if deps else ()
    creator = current_task()
    scope = creator.tid if creator is not None else _ROOT_SCOPE
    ctx = None
    if creator is not None and creator.ctx is not None:
        ctx = creator.ctx.child_copy(creator.tid)

    task = make_task(body, priority, ctx)

    latch = _child_latch(rt, scope, create=True)
    with latch.lock:
        latch.outstanding += 1
    task.add_finish_hook(lambda _t, latch=latch: _child_arrive(latch))

    table = _dep_table(rt, scope)
    task.add_finish_hook(lambda t, table=table, rt=rt: table.task_finished(t, rt))

    if _disp.active:
        _disp.emit("task_create", creator.tid if creator else None, task.tid, len(deps))

    rt.register_deferred()
    npred = table.register(task, deps) if deps else 0
    if npred == 0:
        rt.push_deferred(task)
    return task.tid


def _child_arrive(latch: _ChildLatch):
    with latch.lock:
        latch.outstanding -= 1
        toks = latch.waiters if latch.outstanding == 0 else None
        if toks is not None:
            latch.waiters = []
    if toks:
        for tok in toks:
            tok.fire()


def taskwait() -> None:
    """Suspend until every task spawned directly by the current context has
    finished.  Grandchildren are not waited on."""
    rt = ensure_started()
    latch = _child_latch(rt, _scope_tid(), create=False)
    if latch is None:
        return
    with latch.lock:
        if latch.outstanding == 0:
            return
        tok = make_wait_token()
        latch.waiters.append(tok)
    tok.park()
