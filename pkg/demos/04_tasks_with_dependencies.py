"""
Explicit tasks, dependencies, taskwait, locks
=============================================

task_spawn schedules a closure once its dependence edges are satisfied.
Keys are arbitrary hashables; readers wait on the last writer, writers wait
on the last writer and all readers since.
"""

import forkjoin as fj
from forkjoin import DepMode

fj.ensure_started(fj.RuntimeConfig(num_workers=2))

# Writer -> readers -> writer, expressed only through keys.
state = {}
log = []
fj.task_spawn(lambda: (state.__setitem__("x", 41), log.append("write")),
              deps=[("x", DepMode.OUT)])
fj.task_spawn(lambda: log.append(f"read {state['x']}"), deps=[("x", DepMode.IN)])
fj.task_spawn(lambda: log.append(f"read {state['x']} again"), deps=[("x", DepMode.IN)])
fj.task_spawn(lambda: (state.__setitem__("x", state["x"] + 1), log.append("bump")),
              deps=[("x", DepMode.INOUT)])
fj.taskwait()
print("dependency log:", log, "| x =", state["x"])

# A chain of INOUT tasks forms a strict sequence.
seq = []
for i in range(8):
    fj.task_spawn(lambda i=i: seq.append(i), deps=[("chain", DepMode.INOUT)])
fj.taskwait()
print("chain order:", seq)

# taskwait waits for direct children only.
events = []
def child():
    fj.task_spawn(lambda: events.append("grandchild"))
    events.append("child")
def parent():
    fj.task_spawn(child)
    fj.taskwait()            # waits for `child`, not for `grandchild`
    events.append("parent past taskwait")
fj.task_spawn(parent)
fj.taskwait()
fj.shutdown()
print("family log:", events)

# Locks: suspension-based, so a waiting task never wedges its worker.
fj.ensure_started(fj.RuntimeConfig(num_workers=1))
lock = fj.lock_init()
nest = fj.nest_lock_init()
took = []
def worker_a():
    fj.lock_set(lock)
    fj.yield_now()           # hold the lock across a reschedule
    fj.lock_unset(lock)
def worker_b():
    fj.lock_set(lock)        # suspends until worker_a releases
    took.append("b got the lock")
    fj.lock_unset(lock)
fj.spawn(worker_a)
fj.spawn(worker_b)
fj.shutdown()
print(took[0])

# Nestable locks track depth; released when it returns to zero.
fj.nest_lock_set(nest)
fj.nest_lock_set(nest)
print("nest depth:", nest.depth)
fj.nest_lock_unset(nest)
fj.nest_lock_unset(nest)
print("nest depth after release:", nest.depth)

# Critical sections and atomic cells count exactly under contention.
fj.ensure_started(fj.RuntimeConfig(num_workers=2))
cell = fj.AtomicCell(0)
box = {"n": 0}
def count(tid):
    for _ in range(1000):
        fj.critical_enter()
        box["n"] += 1
        fj.critical_exit()
        fj.atomic_update(cell, lambda v: v + 1)
fj.fork(4, count)
fj.shutdown()
print("critical:", box["n"], "atomic:", cell.value)
