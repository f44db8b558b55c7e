"""
Parallel regions and teams
==========================

fork(n, body) runs body(thread_num) on a team of n implicit tasks and
returns when all of them finish. Teams nest, share one worker pool, and
carry the state for barriers and worksharing constructs.
"""

import threading

import forkjoin as fj

fj.ensure_started(fj.RuntimeConfig(num_workers=2))

# A basic region: every member sees its index and the team size.
rows = []
lock = threading.Lock()
def body(tid):
    with lock:
        rows.append((tid, fj.get_thread_num(), fj.get_num_threads(), fj.in_parallel()))
fj.fork(4, body)
print("members:", sorted(rows))
print("outside:", fj.get_thread_num(), fj.get_num_threads(), fj.in_parallel())

# Barriers synchronize a team: writes before the barrier are visible after.
slots = [0] * 6
totals = []
def with_barrier(tid):
    slots[tid] = tid + 1
    fj.barrier_wait(fj.current_team(), tid)
    if fj.master_check():
        totals.append(sum(slots))
fj.fork(6, with_barrier)
print("sum after barrier:", totals)  # [21]

# single: one member per construct instance wins; the rest skip.
winners = []
def singled(tid):
    if fj.single_enter(fj.current_team(), tid):
        with lock:
            winners.append(tid)
fj.fork(5, singled)
print("single winner count:", len(winners))

# sections: each index handed out once, teams of any size drain them.
done = []
def sectioned(tid):
    team = fj.current_team()
    while True:
        idx = fj.sections_next(team, 5)
        if idx is None:
            return
        with lock:
            done.append(idx)
fj.fork(2, sectioned)
print("sections executed:", sorted(done))

# Nested regions: the inner team links back to its parent.
layout = []
def outer(tid):
    def inner(t):
        team = fj.current_team()
        with lock:
            layout.append((tid, t, team.size, team.parent.size))
    fj.fork(2, inner)
fj.fork(2, outer)
print("nested layout:", sorted(layout))

# set_num_threads fixes the default team size for forks without one.
fj.set_num_threads(3)
sizes = []
fj.fork(None, lambda tid: sizes.append(fj.get_num_threads()))
print("default-size team:", sizes)

fj.shutdown()
