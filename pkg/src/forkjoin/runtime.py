"""Cooperative user-level task scheduler.

Tasks are plain closures multiplexed onto a fixed pool of worker *slots*.
Each slot is serviced by one OS thread (a carrier) at a time, but the binding
is not permanent: when a task suspends, its carrier parks holding the task's
stack, a spare carrier takes over the slot, and whichever worker later pops
the resumed task donates its own slot to the parked carrier.  The effect is
that a waiting task never blocks a worker, tasks resume exactly where they
suspended, and tasks migrate freely between workers.

Queue discipline (who may take which task) is delegated to a pluggable
scheduling policy; see `policies`.

The fast path (spawn, dequeue, run to completion) involves no thread parking
and no locks beyond single atomic deque operations.
"""

from __future__ import annotations

import enum
import itertools
import logging
import os
import threading
from dataclasses import dataclass
from typing import Callable, Optional, Union

from . import tooling
from .errors import (
    ConfigConflictError,
    DoubleResumeError,
    ForkJoinError,
    OutsideTaskError,
    RuntimeStoppedError,
)
from .policies import PolicyKind, SchedulingPolicy, make_policy

log = logging.getLogger(__name__)

_tls = threading.local()
_disp = tooling.dispatcher()

# Task ids increase monotonically per process, across runtime restarts.
_task_ids = itertools.count(1)


class Priority(enum.IntEnum):
    HIGH = 0
    NORMAL = 1
    LOW = 2


class TaskState(enum.IntEnum):
    PENDING = 0
    RUNNING = 1
    SUSPENDED = 2
    FINISHED = 3


_PENDING = 0
_RUNNING = 1
_SUSPENDED = 2
_FINISHED = 3


class Task:
    """One schedulable unit of work."""

    __slots__ = ("tid", "priority", "state", "body", "ctx", "origin_worker", "_cont", "_on_finish")

    def __init__(self, tid, priority, body, ctx=None):
        self.tid = tid
        self.priority = priority
        self.state = _PENDING
        self.body = body
        self.ctx = ctx
        self.origin_worker = None
        self._cont = None          # parked carrier to hand a slot to, when resumed
        self._on_finish = None     # list of callbacks run after the body returns

    def add_finish_hook(self, fn):
        hooks = self._on_finish
        if hooks is None:
            self._on_finish = [fn]
        else:
            hooks.append(fn)


@dataclass(frozen=True)
class RuntimeConfig:
    """Desired runtime shape; unset fields fall back to env vars, then defaults.

    FJ_NUM_THREADS overrides num_workers and FJ_POLICY overrides policy.
    """

    num_workers: Optional[int] = None
    policy: Union[PolicyKind, str, None] = None
    spin_before_park: Optional[int] = None


@dataclass(frozen=True)
class _ResolvedConfig:
    num_workers: int
    policy: PolicyKind
    spin_before_park: int


def _resolve_config(config: Optional[RuntimeConfig]) -> _ResolvedConfig:
    if config is None:
        config = RuntimeConfig()
    env_workers = os.environ.get("FJ_NUM_THREADS")
    env_policy = os.environ.get("FJ_POLICY")

    if env_workers is not None:
        num_workers = int(env_workers)
    elif config.num_workers is not None:
        num_workers = config.num_workers
    else:
        num_workers = os.cpu_count() or 1

    if env_policy is not None:
        policy = PolicyKind.parse(env_policy)
    elif config.policy is not None:
        policy = config.policy if isinstance(config.policy, PolicyKind) else PolicyKind.parse(config.policy)
    else:
        policy = PolicyKind.PRIORITY_LOCAL

    spin = config.spin_before_park if config.spin_before_park is not None else 100

    if num_workers < 1:
        raise ValueError(f"num_workers must be >= 1, got {num_workers}")
    if spin < 0:
        raise ValueError(f"spin_before_park must be >= 0, got {spin}")
    return _ResolvedConfig(num_workers, policy, spin)


# Wake token states.
_ARMED = 0
_PARKED = 1
_FIRED_EARLY = 2
_RESUMED = 3


class WakeToken:
    """One-shot resume handle for a suspended task.

    Obtained only through `suspend_current`; firing it twice raises
    DoubleResumeError.
    """

    __slots__ = ("carrier", "task", "state")

    def __init__(self, carrier, task):
        self.carrier = carrier
        self.task = task
        self.state = _ARMED

    def fire(self):
        c = self.carrier
        rt = c.rt
        with c.cv:
            st = self.state
            if st >= _FIRED_EARLY:
                raise DoubleResumeError(f"token for task {self.task.tid} already resumed")
            if st == _ARMED:
                # The suspender has not parked yet; it will notice and skip parking.
                self.state = _FIRED_EARLY
                return
            self.state = _RESUMED
            task = self.task
            task.state = _PENDING
        task._cont = c
        rt._push(task, task.origin_worker)

    def park(self):
        self.carrier._park_on_token(self)


class _ExternalToken:
    """Wait handle for callers that are not tasks (e.g. the main thread)."""

    __slots__ = ("_event", "_fired")

    def __init__(self):
        self._event = threading.Event()
        self._fired = False

    def fire(self):
        if self._fired:
            raise DoubleResumeError("external token already fired")
        self._fired = True
        self._event.set()

    def park(self):
        self._event.wait()


class _Carrier(threading.Thread):
    """OS thread that services worker slots and, while a task is suspended,
    preserves its stack."""

    def __init__(self, rt, slot, emit_begin):
        super().__init__(name=f"fj-worker-{slot}", daemon=True)
        self.rt = rt
        self.slot = slot
        self.emit_begin = emit_begin
        self.lock = threading.Lock()
        self.cv = threading.Condition(self.lock)
        self.wake = None       # ("resume",) | ("worker", slot) | ("exit",)
        self.task = None
        self.spawned = 0

    def run(self):
        _tls.carrier = self
        try:
            self._worker_loop()
        except Exception:
            log.exception("worker carrier crashed")

    # -- suspension machinery ------------------------------------------------

    def _park_on_token(self, tok):
        rt = self.rt
        task = tok.task
        task.state = _SUSPENDED
        # Capture the slot while this carrier still owns it: as soon as the
        # token is parked, a resume can reach a popper that reassigns
        # self.slot concurrently.
        my_slot = self.slot
        if task.origin_worker is None:
            task.origin_worker = my_slot  # resume locality hint
        if _disp.active:
            rt._pending_switch[my_slot] = (task.tid, tooling.ScheduleCause.SUSPEND)
        with self.cv:
            if tok.state == _FIRED_EARLY:
                task.state = _RUNNING
                rt._pending_switch[my_slot] = None
                return
            tok.state = _PARKED
        rt._activate_replacement(my_slot)
        self._await_handoff()
        task.state = _RUNNING

    def _await_handoff(self):
        with self.cv:
            while self.wake is None:
                self.cv.wait(0.1)
            assert self.wake[0] == "resume"
            self.wake = None

    def _requeue_self_and_park(self, cause):
        """Yield: put the current task at the back of the queues and hand the
        slot to whoever picks it up (or to a replacement meanwhile)."""
        rt = self.rt
        task = self.task
        my_slot = self.slot  # self.slot may be reassigned once the task is visible
        if task.origin_worker is None:
            task.origin_worker = my_slot
        if _disp.active:
            rt._pending_switch[my_slot] = (task.tid, cause)
        task.state = _PENDING
        task._cont = self
        rt._push(task, my_slot)
        rt._activate_replacement(my_slot)
        self._await_handoff()
        task.state = _RUNNING

    def _donate(self, target):
        """Give my slot to a parked carrier whose task I just dequeued, then
        park as a spare until reassigned."""
        rt = self.rt
        with target.cv:
            target.slot = self.slot
            target.wake = ("resume",)
            target.cv.notify()
        with rt._spares_lock:
            rt._spares.append(self)
        with self.cv:
            while self.wake is None and not rt._stop:
                self.cv.wait(0.05)
            wake = self.wake
            self.wake = None
        if wake is None or wake[0] == "exit":
            return False
        self.slot = wake[1]
        return True

    # -- main loop -----------------------------------------------------------

    def _worker_loop(self):
        rt = self.rt
        policy = rt._policy
        pop = policy.pop
        steal = policy.steal
        completed = rt._completed_by_slot
        disp = _disp
        spin_limit = rt.config.spin_before_park
        idle_cond = rt._idle_cond

        if self.emit_begin:
            if disp.active:
                disp.emit("thread_begin", self.slot)
            self.emit_begin = False

        spins = 0
        done = 0  # completions not yet flushed to the shared counters
        while True:
            slot = self.slot
            task = pop(slot)
            if task is None:
                task = steal(slot)
            if task is not None:
                spins = 0
                cont = task._cont
                if cont is not None:
                    task._cont = None
                    if disp.active:
                        self._flush_pending_switch(disp, slot, task.tid)
                    if done:
                        completed[slot] += done
                        done = 0
                    if not self._donate(cont):
                        return  # told to exit while parked as a spare
                    continue
                self.task = task
                # State is only read back through the finish hooks (dependency
                # edges check for FINISHED predecessors), so the transition
                # writes are skipped for hookless tasks on this fast path;
                # suspension paths always maintain state exactly.
                hooks = task._on_finish
                if hooks is not None:
                    task.state = _RUNNING
                if disp.active:
                    self._flush_pending_switch(disp, slot, task.tid)
                try:
                    task.body()
                except BaseException:
                    log.exception("task %d body raised", task.tid)
                self.task = None
                if hooks is not None:
                    task.state = _FINISHED
                    for hook in hooks:
                        try:
                            hook(task)
                        except Exception:
                            log.exception("finish hook for task %d failed", task.tid)
                done += 1
                if disp.active:
                    disp.emit(
                        "task_schedule", task.tid, tooling.ScheduleCause.COMPLETE, None,
                        worker=self.slot,
                    )
                if rt._qwait:
                    completed[self.slot] += done
                    done = 0
                    with rt._quiesce_cond:
                        rt._quiesce_cond.notify_all()
                continue

            # Nothing visible to this slot right now.
            if done:
                completed[slot] += done
                done = 0
            if rt._stop:
                if disp.active:
                    self._flush_pending_switch(disp, slot, None)
                    disp.emit("thread_end", slot)
                return
            spins += 1
            if spins <= spin_limit:
                continue
            spins = 0
            if disp.active:
                self._flush_pending_switch(disp, slot, None)
            with idle_cond:
                rt._idlers += 1
                try:
                    idle_cond.wait(0.02)
                finally:
                    rt._idlers -= 1

    def _flush_pending_switch(self, disp, slot, next_tid):
        pending = self.rt._pending_switch[slot]
        if pending is not None:
            self.rt._pending_switch[slot] = None
            disp.emit("task_schedule", pending[0], pending[1], next_tid, worker=slot)


_RUNNING_STATE = "running"
_STOPPING_STATE = "stopping"
_STOPPED_STATE = "stopped"


class Runtime:
    """A worker pool plus one scheduling policy instance.

    One runtime exists per process at a time; use `ensure_started` rather
    than constructing directly.
    """

    def __init__(self, config: _ResolvedConfig):
        tooling.configure_sink_from_env()
        self.config = config
        self._policy: SchedulingPolicy = make_policy(config.policy, config.num_workers)
        n = config.num_workers
        self._completed_by_slot = [0] * n
        self._pending_switch = [None] * n
        self._idle_cond = threading.Condition()
        self._idlers = 0
        self._spares = []
        self._spares_lock = threading.Lock()
        self._quiesce_cond = threading.Condition()
        self._qwait = False
        self._state_lock = threading.Lock()
        self._state = _RUNNING_STATE
        self._stopped_evt = threading.Event()
        self._accepting = True
        self._stop = False
        self._ext_lock = threading.Lock()
        self._ext_cells = []
        # Ambient defaults plus a scratch area for the fork-join layer.
        self.default_team_size = n
        self.dynamic_adjustment = False
        self.aux = {}
        self.aux_lock = threading.Lock()

        self._carriers = []
        for slot in range(n):
            c = _Carrier(self, slot, emit_begin=True)
            self._carriers.append(c)
        for c in self._carriers:
            c.start()

    # -- bookkeeping ----------------------------------------------------------

    def _push(self, task, hint=None):
        self._policy.push(task, hint)
        if self._idlers:
            with self._idle_cond:
                self._idle_cond.notify_all()

    def _activate_replacement(self, slot):
        with self._spares_lock:
            c = self._spares.pop() if self._spares else None
        if c is not None:
            with c.cv:
                c.wake = ("worker", slot)
                c.cv.notify()
        else:
            c = _Carrier(self, slot, emit_begin=False)
            self._carriers.append(c)
            c.start()

    def _spawn_totals(self):
        spawned = sum(c.spawned for c in self._carriers)
        with self._ext_lock:
            spawned += sum(cell[0] for cell in self._ext_cells)
        return spawned, sum(self._completed_by_slot)

    def _quiet(self):
        spawned, completed = self._spawn_totals()
        if spawned != completed:
            return False
        # Re-read to close the window where a fresh carrier was mid-append.
        return self._spawn_totals() == (spawned, completed)

    # -- public operations ------------------------------------------------

    def spawn(self, body: Callable[[], None], priority: Priority = Priority.NORMAL) -> int:
        """Schedule ``body`` to run exactly once; returns the task id.

        Rejected once shutdown has been initiated, except from inside a task:
        draining tasks may keep spawning descendants, and shutdown waits for
        those too.
        """
        c = getattr(_tls, "carrier", None)
        if c is not None:
            c.spawned += 1
            cur = c.task
            ctx = cur.ctx if cur is not None else None
            creator = cur.tid if cur is not None else None
            hint = c.slot
        else:
            if not self._accepting:
                raise RuntimeStoppedError("spawn after shutdown")
            cell = getattr(_tls, "ext_cell", None)
            if cell is None or cell[1] is not self:
                cell = [0, self]
                _tls.ext_cell = cell
                with self._ext_lock:
                    self._ext_cells.append(cell)
            cell[0] += 1
            ctx = None
            creator = None
            hint = None
        task = Task(next(_task_ids), priority, body, ctx)
        if _disp.active:
            _disp.emit("task_create", creator, task.tid, 0, worker=hint)
        self._push(task, hint)
        return task.tid

    def spawn_batch(self, body: Callable[[], None], count: int,
                    priority: Priority = Priority.NORMAL) -> None:
        """Spawn ``count`` tasks running ``body``, amortizing per-call overhead.

        Each task is an ordinary Task routed through the policy individually;
        only the Python-level bookkeeping is hoisted out of the loop.
        """
        if count < 0:
            raise ValueError("count must be >= 0")
        c = getattr(_tls, "carrier", None)
        if c is not None:
            c.spawned += count
            cur = c.task
            ctx = cur.ctx if cur is not None else None
            creator = cur.tid if cur is not None else None
            hint = c.slot
        else:
            if not self._accepting:
                raise RuntimeStoppedError("spawn after shutdown")
            cell = getattr(_tls, "ext_cell", None)
            if cell is None or cell[1] is not self:
                cell = [0, self]
                _tls.ext_cell = cell
                with self._ext_lock:
                    self._ext_cells.append(cell)
            cell[0] += count
            ctx = None
            creator = None
            hint = None
        tool = _disp.active
        push = self._policy.push
        next_id = _task_ids.__next__
        new = Task.__new__
        task_cls = Task
        for i in range(count):
            # Inline-constructed: same fields as Task.__init__, minus the call.
            task = new(task_cls)
            task.tid = next_id()
            task.priority = priority
            task.state = _PENDING
            task.body = body
            task.ctx = ctx
            task.origin_worker = None
            task._cont = None
            task._on_finish = None
            if tool:
                _disp.emit("task_create", creator, task.tid, 0, worker=hint)
            push(task, hint)
            if not (i & 63) and self._idlers:
                with self._idle_cond:
                    self._idle_cond.notify_all()
        if self._idlers:
            with self._idle_cond:
                self._idle_cond.notify_all()

    def spawn_task_object(self, task: Task, hint=None) -> int:
        """Internal: enqueue a pre-built Task, with spawn accounting."""
        c = getattr(_tls, "carrier", None)
        if c is not None:
            c.spawned += 1
            if hint is None:
                hint = c.slot
        else:
            if not self._accepting:
                raise RuntimeStoppedError("spawn after shutdown")
            cell = getattr(_tls, "ext_cell", None)
            if cell is None or cell[1] is not self:
                cell = [0, self]
                _tls.ext_cell = cell
                with self._ext_lock:
                    self._ext_cells.append(cell)
            cell[0] += 1
        self._push(task, hint)
        return task.tid

    def register_deferred(self) -> None:
        """Internal: count a created task that will be pushed later (task deps)."""
        c = getattr(_tls, "carrier", None)
        if c is not None:
            c.spawned += 1
            return
        if not self._accepting:
            raise RuntimeStoppedError("spawn after shutdown")
        cell = getattr(_tls, "ext_cell", None)
        if cell is None or cell[1] is not self:
            cell = [0, self]
            _tls.ext_cell = cell
            with self._ext_lock:
                self._ext_cells.append(cell)
        cell[0] += 1

    def push_deferred(self, task: Task, hint=None) -> None:
        """Internal: release a task whose spawn was counted by register_deferred."""
        self._push(task, hint)

    def shutdown(self) -> None:
        """Run every remaining task to completion, then stop all workers.

        Idempotent.  Must be called from outside the worker pool.
        """
        if getattr(_tls, "carrier", None) is not None:
            raise ForkJoinError("shutdown must not be called from inside a task")
        with self._state_lock:
            if self._state == _STOPPED_STATE:
                return
            if self._state == _STOPPING_STATE:
                waiting = True
            else:
                self._state = _STOPPING_STATE
                waiting = False
        if waiting:
            self._stopped_evt.wait()
            return
        self._accepting = False
        self._qwait = True
        with self._quiesce_cond:
            while not self._quiet():
                self._quiesce_cond.wait(0.05)
        self._stop = True
        with self._idle_cond:
            self._idle_cond.notify_all()
        while True:
            with self._spares_lock:
                c = self._spares.pop() if self._spares else None
            if c is None:
                break
            with c.cv:
                c.wake = ("exit",)
                c.cv.notify()
        for c in list(self._carriers):
            c.join()
        with self._state_lock:
            self._state = _STOPPED_STATE
        self._stopped_evt.set()

    @property
    def num_workers(self) -> int:
        return self.config.num_workers

    @property
    def policy_kind(self) -> PolicyKind:
        return self.config.policy


# ---------------------------------------------------------------------------
# Process-wide singleton management.

_global_lock = threading.Lock()
_runtime: Optional[Runtime] = None


def ensure_started(config: Optional[RuntimeConfig] = None) -> Runtime:
    """Start the runtime if needed and return it.

    Calling again with no config (or an equal one) returns the same handle;
    calling with a conflicting config raises ConfigConflictError.  After a
    completed shutdown, a fresh runtime may be started.
    """
    global _runtime
    while True:
        with _global_lock:
            rt = _runtime
            if rt is not None and rt._state == _RUNNING_STATE:
                if config is not None:
                    resolved = _resolve_config(config)
                    if resolved != rt.config:
                        raise ConfigConflictError(
                            f"runtime already started with {rt.config}, requested {resolved}"
                        )
                return rt
            if rt is not None and rt._state == _STOPPING_STATE:
                carrier = getattr(_tls, "carrier", None)
                if carrier is not None and carrier.rt is rt:
                    # A task of the pool being stopped cannot wait for the
                    # stop to finish; its spawns are rejected instead.
                    raise RuntimeStoppedError("runtime is shutting down")
                evt = rt._stopped_evt
            else:
                resolved = _resolve_config(config)
                rt = Runtime(resolved)
                _runtime = rt
                return rt
        evt.wait()


def current_runtime() -> Optional[Runtime]:
    rt = _runtime
    if rt is not None and rt._state == _RUNNING_STATE:
        return rt
    return None


def shutdown() -> None:
    """Shut down the process runtime, if one is running. Idempotent."""
    global _runtime
    with _global_lock:
        rt = _runtime
    if rt is None:
        return
    rt.shutdown()
    with _global_lock:
        if _runtime is rt:
            _runtime = None


def spawn(body: Callable[[], None], priority: Priority = Priority.NORMAL) -> int:
    """Schedule ``body`` on the runtime (auto-starting it), exactly once."""
    rt = _runtime
    if rt is None or rt._state == _STOPPED_STATE:
        rt = ensure_started()
    return rt.spawn(body, priority)


def current_carrier():
    return getattr(_tls, "carrier", None)


def current_task() -> Optional[Task]:
    c = getattr(_tls, "carrier", None)
    return c.task if c is not None else None


def current_worker() -> Optional[int]:
    """Index of the worker slot executing the caller, or None outside tasks."""
    c = getattr(_tls, "carrier", None)
    if c is None or c.task is None:
        return None
    return c.slot


def yield_now() -> None:
    """Reschedule the current task behind other pending work.

    A no-op when called outside a task, or when no other work is visible.
    """
    c = getattr(_tls, "carrier", None)
    if c is None or c.task is None:
        return
    rt = c.rt
    if not rt._policy.has_visible_work(c.slot):
        return
    c._requeue_self_and_park(tooling.ScheduleCause.YIELD)


def suspend_current(publish: Optional[Callable[[WakeToken], None]] = None) -> None:
    """Park the current task until its token is fired with `resume`.

    ``publish`` receives the wake token before the task parks; store it
    somewhere another task (or thread) can see.  The worker is handed off and
    keeps running other tasks while this one waits.
    """
    c = getattr(_tls, "carrier", None)
    if c is None or c.task is None:
        raise OutsideTaskError("suspend_current requires a task context")
    tok = WakeToken(c, c.task)
    if publish is not None:
        publish(tok)
    tok.park()


def resume(token: WakeToken) -> None:
    """Make a suspended task runnable again. Each token fires exactly once."""
    if not isinstance(token, (WakeToken, _ExternalToken)):
        raise TypeError(f"expected a wake token, got {type(token).__name__}")
    token.fire()


def make_wait_token():
    """Internal: a parkable/firable token for the current context (task or not)."""
    c = getattr(_tls, "carrier", None)
    if c is not None and c.task is not None:
        return WakeToken(c, c.task)
    return _ExternalToken()


def make_task(body: Callable[[], None], priority: Priority = Priority.NORMAL, ctx=None) -> Task:
    """Build an unscheduled Task with a fresh id (enqueue it separately)."""
    return Task(next(_task_ids), priority, body, ctx)
