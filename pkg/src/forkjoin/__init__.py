"""forkjoin: fork-join and tasking runtime on a cooperative user-level scheduler.

The package layers OpenMP-style semantics (parallel regions, worksharing
loops, explicit tasks with dependencies, locks, tool callbacks) on top of a
worker pool whose queue discipline is one of seven pluggable scheduling
policies.  See README.md for a tour; the benchmark harness lives in
``forkjoin.bench`` and is exposed as the ``bench`` console script.

Environment: FJ_NUM_THREADS (worker count), FJ_POLICY (policy name),
FJ_TOOL_LOG (JSON-lines event log path).
"""

from .errors import (
    ChecksumMismatchError,
    ConfigConflictError,
    DoubleResumeError,
    ForkJoinError,
    LockOwnershipError,
    LoopMismatchError,
    OrderedViolationError,
    OutsideTaskError,
    RuntimeStoppedError,
)
from .locks import (
    AtomicCell,
    DEFAULT_CRITICAL,
    NestLock,
    SimpleLock,
    atomic_update,
    critical_enter,
    critical_exit,
    lock_init,
    lock_set,
    lock_test,
    lock_unset,
    nest_lock_init,
    nest_lock_set,
    nest_lock_test,
    nest_lock_unset,
)
from .loops import Chunk, LoopAssignment, SchedKind, static_init, trip_count
from .parallel import (
    Team,
    TaskContext,
    barrier_wait,
    current_team,
    dispatch_init,
    dispatch_next,
    fork,
    get_dynamic,
    get_max_threads,
    get_num_procs,
    get_num_threads,
    get_thread_num,
    get_wtick,
    get_wtime,
    in_parallel,
    master_check,
    ordered_exit,
    ordered_wait,
    sections_next,
    set_dynamic,
    set_num_threads,
    single_enter,
)
from .policies import PolicyKind
from .runtime import (
    Priority,
    Runtime,
    RuntimeConfig,
    Task,
    TaskState,
    WakeToken,
    current_runtime,
    current_task,
    current_worker,
    ensure_started,
    resume,
    shutdown,
    spawn,
    suspend_current,
    yield_now,
)
from .tasking import DepMode, task_spawn, taskwait
from .tooling import ImplicitPhase, ScheduleCause, ToolCallbacks, register_tool

__version__ = "0.1.0"

__all__ = [
    "AtomicCell", "ChecksumMismatchError", "Chunk", "ConfigConflictError",
    "DEFAULT_CRITICAL", "DepMode", "DoubleResumeError", "ForkJoinError",
    "ImplicitPhase", "LockOwnershipError", "LoopAssignment", "LoopMismatchError",
    "NestLock", "OrderedViolationError", "OutsideTaskError", "PolicyKind",
    "Priority", "Runtime", "RuntimeConfig", "RuntimeStoppedError", "SchedKind",
    "ScheduleCause", "SimpleLock", "Task", "TaskContext", "TaskState", "Team",
    "ToolCallbacks", "WakeToken", "atomic_update", "barrier_wait", "critical_enter",
    "critical_exit", "current_runtime", "current_task", "current_team",
    "current_worker", "dispatch_init", "dispatch_next", "ensure_started", "fork",
    "get_dynamic", "get_max_threads", "get_num_procs", "get_num_threads",
    "get_thread_num", "get_wtick", "get_wtime", "in_parallel", "lock_init",
    "lock_set", "lock_test", "lock_unset", "master_check", "nest_lock_init",
    "nest_lock_set", "nest_lock_test", "nest_lock_unset", "ordered_exit",
    "ordered_wait", "register_tool", "resume", "sections_next", "set_dynamic",
    "set_num_threads", "shutdown", "single_enter", "spawn", "static_init",
    "suspend_current", "task_spawn", "taskwait", "trip_count", "yield_now",
]
