"""
Loop scheduling
===============

Iteration spaces are closed intervals with a signed increment. Static
schedules are pure functions of (team size, member); dynamic and guided
schedules claim chunks from a shared cursor at run time.
"""

import threading

import forkjoin as fj
from forkjoin import SchedKind, static_init

# Static block: contiguous, nearly equal shares.
for tid in range(4):
    a = static_init(4, tid, SchedKind.STATIC_BLOCK, 0, 99, 1)
    print(f"block tid={tid}: [{a.lower}, {a.upper}] last_iter={a.last_iter}")

# Static chunked: fixed chunks dealt round-robin; the assignment describes
# the first chunk and the stride to the next one.
a = static_init(4, 2, SchedKind.STATIC_CHUNKED, 0, 99, 1, chunk=10)
print(f"chunked tid=2: first [{a.lower}, {a.upper}], stride {a.stride}")
print("chunked tid=2 values:", list(a.iter_values()))

# Negative increments walk the space downward.
a = static_init(2, 0, SchedKind.STATIC_BLOCK, 99, 0, -3)
print(f"downward tid=0: [{a.lower}, {a.upper}] by -3")

# Dynamic dispatch inside a team: members race to claim chunks; every
# iteration is claimed exactly once.
fj.ensure_started(fj.RuntimeConfig(num_workers=2))
claimed = []
lock = threading.Lock()
def dynamic_loop(tid):
    team = fj.current_team()
    fj.dispatch_init(team, tid, SchedKind.DYNAMIC, 0, 99, 1, chunk=10)
    while True:
        c = fj.dispatch_next(team, tid)
        if c is None:
            return
        with lock:
            claimed.append((tid, c.lower, c.upper))
fj.fork(4, dynamic_loop)
print("dynamic chunks:", sorted(claimed, key=lambda t: t[1]))

# Guided dispatch: early chunks are large (remaining / team), later ones
# shrink toward the minimum chunk.
widths = []
def guided_loop(tid):
    team = fj.current_team()
    fj.dispatch_init(team, tid, SchedKind.GUIDED, 0, 199, 1, chunk=1)
    while True:
        c = fj.dispatch_next(team, tid)
        if c is None:
            return
        with lock:
            widths.append(c.upper - c.lower + 1)
fj.fork(4, guided_loop)
print("guided chunk widths:", sorted(widths, reverse=True))

# ordered: bodies run in ascending iteration order no matter who owns them.
trace = []
def ordered_loop(tid):
    team = fj.current_team()
    fj.dispatch_init(team, tid, SchedKind.DYNAMIC, 0, 11, 1, 1)
    while True:
        c = fj.dispatch_next(team, tid)
        if c is None:
            return
        for i in range(c.lower, c.upper + 1):
            fj.ordered_wait(team, i)
            trace.append(i)
            fj.ordered_exit(team, i)
fj.fork(3, ordered_loop)
print("ordered trace:", trace)

fj.shutdown()
