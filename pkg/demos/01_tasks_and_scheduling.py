"""
Tasks and scheduling policies
=============================

The scheduler runs plain closures as lightweight tasks on a small pool of
workers. Which queue a task lands in, and who may take it, is decided by a
pluggable policy.
"""

import itertools

import forkjoin as fj

# Start a runtime explicitly. FJ_NUM_THREADS / FJ_POLICY env vars override
# these settings; repeated calls return the same handle.
rt = fj.ensure_started(fj.RuntimeConfig(num_workers=2, policy="abp"))
print(f"runtime: {rt.num_workers} workers, policy={rt.policy_kind}")

# Spawn ten thousand tasks; each runs exactly once.
counter = itertools.count()
for _ in range(10_000):
    fj.spawn(lambda: next(counter))
fj.shutdown()
print("executed:", next(counter))

# Priorities: on the priority-local policy, a single worker drains all High
# tasks before any Low one. Spawning from inside a task pre-fills the queue
# while the worker is busy, which makes the order deterministic.
fj.ensure_started(fj.RuntimeConfig(num_workers=1, policy="priority-local"))
order = []
def fill():
    for name, prio in [("low", fj.Priority.LOW), ("high", fj.Priority.HIGH)]:
        for i in range(3):
            fj.spawn(lambda name=name, i=i: order.append(f"{name}{i}"), prio)
fj.spawn(fill)
fj.shutdown()
print("completion order:", order)  # high0 high1 high2 low0 low1 low2

# Cooperative yielding: two tasks sharing one worker take turns.
fj.ensure_started(fj.RuntimeConfig(num_workers=1))
trace = []
def chatty(name):
    for i in range(3):
        trace.append(f"{name}{i}")
        fj.yield_now()
fj.spawn(lambda: chatty("a"))
fj.spawn(lambda: chatty("b"))
fj.shutdown()
print("interleaving:", trace)

# Suspension: a task parks without blocking its worker. Another task (or any
# thread) fires the wake token later; the task resumes where it stopped.
fj.ensure_started(fj.RuntimeConfig(num_workers=1))
mailbox = {}
log = []
def waiter():
    log.append("waiting")
    fj.suspend_current(lambda token: mailbox.__setitem__("wake", token))
    log.append("resumed")
def other_work():
    log.append("worker is free to run me")
    fj.resume(mailbox["wake"])
fj.spawn(waiter)
fj.spawn(other_work)
fj.shutdown()
print("suspension log:", log)

# The seven policies, selectable by name:
for kind in fj.PolicyKind:
    print("policy:", kind)
