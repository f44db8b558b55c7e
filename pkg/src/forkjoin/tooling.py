"""First-party instrumentation: registered observers of runtime lifecycle events.

Seven event kinds are exposed: thread_begin, thread_end, parallel_begin,
parallel_end, task_create, task_schedule, implicit_task.  Handlers run
synchronously on the worker that triggered the event; a handler that raises is
logged and contained so the runtime is never corrupted by a tool.

Setting ``FJ_TOOL_LOG=<path>`` installs an internal sink that appends one JSON
object per event (fields: kind, timestamp, worker, task, team plus
kind-specific extras) independently of any user-registered tool.
"""

from __future__ import annotations

import enum
import json
import logging
import threading
import time
from dataclasses import dataclass
from typing import Callable, Optional

log = logging.getLogger(__name__)


class ScheduleCause(enum.Enum):
    COMPLETE = "complete"
    YIELD = "yield"
    SUSPEND = "suspend"


class ImplicitPhase(enum.Enum):
    BEGIN = "begin"
    END = "end"


@dataclass
class ToolCallbacks:
    """Handler bundle; any subset may be set.  ``enabled`` is the master switch.

    Signatures:
      thread_begin(worker)
      thread_end(worker)
      parallel_begin(parent_task, team_size, codeptr)
      parallel_end(team_id)
      task_create(creator_task, new_task, deps_count)
      task_schedule(prior_task, cause, next_task)
      implicit_task(phase, team_id, thread_num)
    """

    thread_begin: Optional[Callable] = None
    thread_end: Optional[Callable] = None
    parallel_begin: Optional[Callable] = None
    parallel_end: Optional[Callable] = None
    task_create: Optional[Callable] = None
    task_schedule: Optional[Callable] = None
    implicit_task: Optional[Callable] = None
    enabled: bool = True


_EVENT_NAMES = (
    "thread_begin",
    "thread_end",
    "parallel_begin",
    "parallel_end",
    "task_create",
    "task_schedule",
    "implicit_task",
)


class _Dispatcher:
    """Fans one event out to the user tool and the optional log sink.

    ``active`` is the single flag the runtime hot paths check; it is False
    whenever no handler could possibly fire, so disabled tooling costs one
    attribute load per site.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self.user: Optional[ToolCallbacks] = None
        self.sink: Optional["_JsonLinesSink"] = None
        self.active = False

    def _refresh(self):
        user_live = (
            self.user is not None
            and self.user.enabled
            and any(getattr(self.user, n) is not None for n in _EVENT_NAMES)
        )
        self.active = user_live or self.sink is not None

    def register(self, callbacks: Optional[ToolCallbacks]):
        with self._lock:
            self.user = callbacks
            self._refresh()

    def set_sink(self, sink):
        with self._lock:
            if self.sink is not None:
                self.sink.close()
            self.sink = sink
            self._refresh()

    def emit(self, name, *args, **extra):
        user = self.user
        if user is not None and user.enabled:
            handler = getattr(user, name)
            if handler is not None:
                try:
                    handler(*args)
                except Exception:
                    log.exception("tool callback %s failed; continuing", name)
        sink = self.sink
        if sink is not None:
            try:
                sink.write(name, args, extra)
            except Exception:
                log.exception("tool log sink failed; continuing")


class _JsonLinesSink:
    """Appends events to a file as JSON lines."""

    _ARG_FIELDS = {
        "thread_begin": ("worker",),
        "thread_end": ("worker",),
        "parallel_begin": ("parent_task", "team_size", "codeptr"),
        "parallel_end": ("team",),
        "task_create": ("creator", "task", "deps_count"),
        "task_schedule": ("prior_task", "cause", "next_task"),
        "implicit_task": ("phase", "team", "thread_num"),
    }

    def __init__(self, path):
        self.path = path
        self._fh = open(path, "a", encoding="utf-8")
        self._lock = threading.Lock()

    def write(self, name, args, extra):
        record = {"kind": name, "timestamp": time.time()}
        for field, value in zip(self._ARG_FIELDS[name], args):
            if isinstance(value, enum.Enum):
                value = value.value
            record[field] = value
        record.update(extra)
        line = json.dumps(record)
        with self._lock:
            self._fh.write(line + "\n")
            self._fh.flush()

    def close(self):
        with self._lock:
            if not self._fh.closed:
                self._fh.close()


_dispatcher = _Dispatcher()


def register_tool(callbacks: Optional[ToolCallbacks]) -> None:
    """Install (or with None, remove) the process-wide tool. Replaces any prior one."""
    _dispatcher.register(callbacks)


def dispatcher() -> _Dispatcher:
    return _dispatcher


def configure_sink_from_env() -> None:
    """Honor FJ_TOOL_LOG: open/close the JSON-lines sink to match the env var."""
    import os

    path = os.environ.get("FJ_TOOL_LOG")
    current = _dispatcher.sink.path if _dispatcher.sink is not None else None
    if path == current:
        return
    _dispatcher.set_sink(_JsonLinesSink(path) if path else None)
