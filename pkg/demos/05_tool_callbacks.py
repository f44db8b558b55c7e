"""
Tool callbacks
==============

An observer registers handlers for runtime lifecycle events: worker start
and stop, parallel region begin and end, task creation, task scheduling
switches, and implicit-task phases. Handlers run synchronously on the worker
that triggered the event.
"""

import collections
import threading

import forkjoin as fj

counts = collections.Counter()
lock = threading.Lock()

def tally(name):
    def handler(*args):
        with lock:
            counts[name] += 1
    return handler

# Register before starting so thread_begin events are observed too.
fj.register_tool(fj.ToolCallbacks(
    thread_begin=tally("thread_begin"),
    thread_end=tally("thread_end"),
    parallel_begin=tally("parallel_begin"),
    parallel_end=tally("parallel_end"),
    task_create=tally("task_create"),
    task_schedule=tally("task_schedule"),
    implicit_task=tally("implicit_task"),
))

fj.ensure_started(fj.RuntimeConfig(num_workers=2))
fj.fork(4, lambda tid: None)          # one region, four members
fj.task_spawn(lambda: None)           # one explicit task
fj.taskwait()
fj.spawn(lambda: fj.yield_now())      # a yield produces a schedule event
fj.shutdown()
fj.register_tool(None)

for name in sorted(counts):
    print(f"{name:16s} {counts[name]}")

# Pairings to expect: thread_begin == thread_end == workers;
# parallel_begin == parallel_end; implicit_task == 2 * team size.

# For file-based capture, set FJ_TOOL_LOG=/path/events.jsonl before the
# runtime starts: every event is appended as one JSON object with its kind,
# timestamp, worker, task, and team fields.
