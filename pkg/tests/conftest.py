import threading

import pytest

import forkjoin as fj
from forkjoin import tooling


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for var in ("FJ_NUM_THREADS", "FJ_POLICY", "FJ_TOOL_LOG"):
        monkeypatch.delenv(var, raising=False)


@pytest.fixture
def rt():
    """Factory starting a fresh runtime with the given shape; always cleaned up."""
    def start(workers=2, policy=fj.PolicyKind.PRIORITY_LOCAL, spin=100):
        fj.shutdown()
        return fj.ensure_started(fj.RuntimeConfig(workers, policy, spin))

    yield start
    fj.shutdown()
    fj.register_tool(None)
    tooling.configure_sink_from_env()


class EventRecorder:
    """Collects tool events as (name, args) tuples, thread-safely."""

    def __init__(self):
        self._lock = threading.Lock()
        self.events = []

    def _capture(self, name):
        def handler(*args):
            with self._lock:
                self.events.append((name, args))
        return handler

    def tool(self, only=None):
        names = only if only is not None else [
            "thread_begin", "thread_end", "parallel_begin", "parallel_end",
            "task_create", "task_schedule", "implicit_task",
        ]
        return fj.ToolCallbacks(**{name: self._capture(name) for name in names})

    def count(self, name):
        with self._lock:
            return sum(1 for n, _ in self.events if n == name)

    def of(self, name):
        with self._lock:
            return [args for n, args in self.events if n == name]

    def kinds(self):
        with self._lock:
            return {n for n, _ in self.events}


@pytest.fixture
def recorder():
    rec = EventRecorder()
    yield rec
    fj.register_tool(None)
