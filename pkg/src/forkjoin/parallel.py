"""Fork-join parallel regions: teams, barriers, worksharing, and runtime queries.

`fork` runs a region body on a team of implicit tasks and returns when all of
them have finished.  Regions nest freely; nested teams share the same worker
pool.  Worksharing constructs (single, sections, ordered, dynamic loops) are
keyed per construct *instance*, so every member must encounter the same
constructs in the same order, as in OpenMP.
"""

from __future__ import annotations

import itertools
import os
import threading
import time
from typing import Callable, Optional

from . import tooling
from .errors import LoopMismatchError, OrderedViolationError, OutsideTaskError
from .loops import Chunk, LoopState, SchedKind, static_init  # re-exported: static_init
from .runtime import Priority, current_runtime, current_task, ensure_started, make_task, make_wait_token

__all__ = [
    "Team", "TaskContext", "fork", "barrier_wait", "single_enter", "master_check",
    "sections_next", "ordered_wait", "ordered_exit", "dispatch_init", "dispatch_next",
    "current_team", "get_thread_num", "get_num_threads", "get_max_threads",
    "get_num_procs", "in_parallel", "set_num_threads", "get_dynamic", "set_dynamic",
    "get_wtime", "get_wtick", "static_init", "SchedKind", "Chunk",
]

_disp = tooling.dispatcher()
_team_ids = itertools.count(1)


class TaskContext:
    """Execution context a task carries: its team, member index, and the
    per-member cursors that pair worksharing construct instances."""

    __slots__ = ("team", "thread_num", "creator_tid", "single_seq", "sections_seq",
                 "loop_seq", "active_loop")

    def __init__(self, team, thread_num, creator_tid=None):
        self.team = team
        self.thread_num = thread_num
        self.creator_tid = creator_tid
        self.single_seq = 0
        self.sections_seq = 0
        self.loop_seq = 0
        self.active_loop = None

    def child_copy(self, creator_tid):
        """Context for an explicit task created inside this one: same region
        placement, fresh construct cursors."""
        return TaskContext(self.team, self.thread_num, creator_tid)


class _BarrierState:
    __slots__ = ("lock", "count", "generation", "waiters")

    def __init__(self):
        self.lock = threading.Lock()
        self.count = 0
        self.generation = 0
        self.waiters = []


class _OrderedState:
    __slots__ = ("lock", "next_pos", "entered", "waiters")

    def __init__(self):
        self.lock = threading.Lock()
        self.next_pos = 0
        self.entered = None
        self.waiters = {}


class Team:
    """The set of implicit tasks executing one parallel region."""

    __slots__ = ("team_id", "size", "parent", "creator_tid", "_lock", "_barrier",
                 "_single_done", "_sections", "_loops", "_ordered_fallback")

    def __init__(self, team_id, size, parent=None, creator_tid=None):
        self.team_id = team_id
        self.size = size
        self.parent = parent
        self.creator_tid = creator_tid
        self._lock = threading.Lock()
        self._barrier = _BarrierState()
        self._single_done = set()
        self._sections = {}
        self._loops = {}
        self._ordered_fallback = None

    @property
    def barrier_generation(self) -> int:
        return self._barrier.generation

    def __repr__(self):
        return f"Team(id={self.team_id}, size={self.size})"


class _Latch:
    """Counts member completions; the forking context waits on it."""

    __slots__ = ("lock", "remaining", "tokens", "errors")

    def __init__(self, count):
        self.lock = threading.Lock()
        self.remaining = count
        self.tokens = []
        self.errors = []

    def arrive(self):
        with self.lock:
            self.remaining -= 1
            toks = self.tokens if self.remaining == 0 else None
            if toks is not None:
                self.tokens = []
        if toks:
            for tok in toks:
                tok.fire()

    def record_error(self, exc):
        with self.lock:
            self.errors.append(exc)

    def wait(self):
        with self.lock:
            if self.remaining == 0:
                return
            tok = make_wait_token()
            self.tokens.append(tok)
        tok.park()


def _current_ctx() -> Optional[TaskContext]:
    task = current_task()
    return task.ctx if task is not None else None


def current_team() -> Optional[Team]:
    ctx = _current_ctx()
    return ctx.team if ctx is not None else None


def fork(num_threads: Optional[int], body: Callable[[int], None], label=None) -> None:
    """Run ``body(thread_num)`` on a team and return once every member is done.

    ``num_threads`` of 0/None means the ambient default (see set_num_threads).
    Nested calls create child teams on the same worker pool.  If members
    raise, the first exception is re-raised here after the join.
    """
    if num_threads is not None and num_threads < 0:
        raise ValueError(f"num_threads must be >= 0, got {num_threads}")
    rt = ensure_started()
    size = num_threads if num_threads else rt.default_team_size

    creator = current_task()
    creator_tid = creator.tid if creator is not None else None
    parent_team = creator.ctx.team if creator is not None and creator.ctx is not None else None

    team = Team(next(_team_ids), size, parent_team, creator_tid)
    if _disp.active:
        _disp.emit("parallel_begin", creator_tid, size, label, team=team.team_id)

    latch = _Latch(size)
    tool = _disp.active
    for i in range(size):
        ctx = TaskContext(team, i, creator_tid)
        member = make_task(_member_body(body, i, team, latch, tool), Priority.NORMAL, ctx)
        member.add_finish_hook(lambda _t, latch=latch: latch.arrive())
        rt.spawn_task_object(member)
    latch.wait()

    if _disp.active:
        _disp.emit("parallel_end", team.team_id)
    if latch.errors:
        raise latch.errors[0]


def _member_body(body, i, team, latch, tool):
    def run_member():
        if tool:
            _disp.emit("implicit_task", tooling.ImplicitPhase.BEGIN, team.team_id, i)
        try:
            body(i)
        except BaseException as exc:
            latch.record_error(exc)
        finally:
            if tool:
                _disp.emit("implicit_task", tooling.ImplicitPhase.END, team.team_id, i)
    return run_member


def barrier_wait(team: Optional[Team], member: Optional[int] = None) -> None:
    """Block (suspending the task, not the worker) until all members arrive.

    Outside a team this is a no-op, as for a team of one.
    """
    if team is None or team.size == 1:
        return
    b = team._barrier
    with b.lock:
        b.count += 1
        if b.count == team.size:
            b.count = 0
            b.generation += 1
            toks = b.waiters
            b.waiters = []
        else:
            tok = make_wait_token()
            b.waiters.append(tok)
            toks = None
    if toks is not None:
        for t in toks:
            t.fire()
        return
    tok.park()


def master_check(member: Optional[int] = None) -> bool:
    """True iff the caller (or the given member index) is thread 0."""
    if member is not None:
        return member == 0
    return get_thread_num() == 0


def single_enter(team: Optional[Team], member: Optional[int] = None) -> bool:
    """True for exactly one member per single-construct instance."""
    if team is None:
        return True
    ctx = _current_ctx()
    if ctx is None or ctx.team is not team:
        raise OutsideTaskError("single_enter must be called by a member of the team")
    seq = ctx.single_seq
    ctx.single_seq = seq + 1
    with team._lock:
        if seq in team._single_done:
            return False
        team._single_done.add(seq)
        return True


def sections_next(team: Optional[Team], total_sections: int) -> Optional[int]:
    """Claim the next unexecuted section index, or None when all are taken."""
    if team is None:
        raise OutsideTaskError("sections_next requires a team")
    ctx = _current_ctx()
    if ctx is None or ctx.team is not team:
        raise OutsideTaskError("sections_next must be called by a member of the team")
    seq = ctx.sections_seq
    with team._lock:
        state = team._sections.get(seq)
        if state is None:
            state = [0, 0]  # next index, members done with this instance
            team._sections[seq] = state
        i = state[0]
        if i < total_sections:
            state[0] = i + 1
            return i
        state[1] += 1
        if state[1] == team.size:
            del team._sections[seq]
    ctx.sections_seq = seq + 1
    return None


# -- dynamic / guided loops ---------------------------------------------------


def dispatch_init(team: Optional[Team], member: Optional[int], sched: SchedKind,
                  lower: int, upper: int, incr: int, chunk: int = 1) -> None:
    """Register (or join) the team's shared dispatch cursor for one loop.

    Every member must pass identical parameters; a mismatch raises
    LoopMismatchError.
    """
    if team is None:
        raise OutsideTaskError("dispatch loops require a team")
    ctx = _current_ctx()
    if ctx is None or ctx.team is not team:
        raise OutsideTaskError("dispatch_init must be called by a member of the team")
    seq = ctx.loop_seq
    with team._lock:
        state = team._loops.get(seq)
        if state is None:
            state = LoopState(sched, lower, upper, incr, chunk, team.size)
            team._loops[seq] = state
        else:
            state.matches(sched, lower, upper, incr, chunk)
            state.registered += 1
    ctx.active_loop = state


def dispatch_next(team: Optional[Team], member: Optional[int] = None) -> Optional[Chunk]:
    """Claim the next chunk of the registered loop; None once exhausted."""
    ctx = _current_ctx()
    if ctx is None or ctx.active_loop is None:
        raise LoopMismatchError("dispatch_next without a registered loop")
    chunk = ctx.active_loop.next()
    if chunk is None:
        ctx.active_loop = None
        ctx.loop_seq += 1
    return chunk


# -- ordered regions ----------------------------------------------------------


def _ordered_state(team: Optional[Team]) -> _OrderedState:
    if team is None:
        raise OutsideTaskError("ordered regions require a team")
    ctx = _current_ctx()
    loop = ctx.active_loop if ctx is not None else None
    if loop is not None:
        if loop.ordered is None:
            with team._lock:
                if loop.ordered is None:
                    loop.ordered = _OrderedState()
        return loop.ordered
    with team._lock:
        if team._ordered_fallback is None:
            team._ordered_fallback = _OrderedState()
        return team._ordered_fallback


def ordered_wait(team: Optional[Team], iteration_index: int) -> None:
    """Enter the ordered body for ``iteration_index`` (0-based sequence
    position); suspends until every earlier index has exited."""
    st = _ordered_state(team)
    with st.lock:
        if iteration_index < st.next_pos or iteration_index == st.entered:
            raise OrderedViolationError(f"iteration {iteration_index} already ordered")
        if iteration_index in st.waiters:
            raise OrderedViolationError(f"iteration {iteration_index} waited twice")
        if iteration_index == st.next_pos and st.entered is None:
            st.entered = iteration_index
            return
        tok = make_wait_token()
        st.waiters[iteration_index] = tok
    tok.park()


def ordered_exit(team: Optional[Team], iteration_index: int) -> None:
    st = _ordered_state(team)
    with st.lock:
        if st.entered != iteration_index:
            raise OrderedViolationError(
                f"ordered_exit({iteration_index}) but iteration "
                f"{st.entered!r} is inside the region"
            )
        st.entered = None
        st.next_pos += 1
        tok = st.waiters.pop(st.next_pos, None)
        if tok is not None:
            st.entered = st.next_pos
    if tok is not None:
        tok.fire()


# -- runtime queries ----------------------------------------------------------


def get_thread_num() -> int:
    """Member index inside a team; 0 elsewhere."""
    ctx = _current_ctx()
    return ctx.thread_num if ctx is not None else 0


def get_num_threads() -> int:
    """Team size inside a region; 1 elsewhere."""
    ctx = _current_ctx()
    return ctx.team.size if ctx is not None and ctx.team is not None else 1


def in_parallel() -> bool:
    """True iff the caller executes inside a parallel region."""
    ctx = _current_ctx()
    return ctx is not None and ctx.team is not None


def set_num_threads(n: int) -> None:
    """Default team size for subsequent forks with unspecified size."""
    if n <= 0:
        raise ValueError(f"set_num_threads requires n >= 1, got {n}")
    ensure_started().default_team_size = n


def get_max_threads() -> int:
    return ensure_started().default_team_size


def get_num_procs() -> int:
    return os.cpu_count() or 1


def set_dynamic(flag: bool) -> None:
    """Record the dynamic-adjustment flag (stored and readable; teams are
    never shrunk)."""
    ensure_started().dynamic_adjustment = bool(flag)


def get_dynamic() -> bool:
    rt = current_runtime()
    return rt.dynamic_adjustment if rt is not None else False


# -- wall-clock ---------------------------------------------------------------

_WTIME_EPOCH = time.perf_counter()


def get_wtime() -> float:
    """Monotonic wall-clock seconds since a fixed per-process origin."""
    return time.perf_counter() - _WTIME_EPOCH


def get_wtick() -> float:
    """Resolution of the wtime clock, in seconds (> 0)."""
    res = time.get_clock_info("perf_counter").resolution
    return res if res > 0 else 1e-9
