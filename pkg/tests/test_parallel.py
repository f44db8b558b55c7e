"""Fork-join regions: teams, barriers, worksharing constructs, queries."""

import itertools
import threading
import time

import pytest

import forkjoin as fj


def test_fork_thread_nums(rt):
    rt(workers=2)
    seen = set()
    lock = threading.Lock()
    def body(tid):
        with lock:
            seen.add(tid)
    fj.fork(4, body)
    assert seen == {0, 1, 2, 3}


def test_fork_degenerate_team(rt):
    rt(workers=2)
    seen = []
    def body(tid):
        seen.append((tid, fj.in_parallel(), fj.get_num_threads()))
    fj.fork(1, body)
    assert seen == [(0, True, 1)]


def test_fork_default_size_tracks_set_num_threads(rt):
    rt(workers=2)
    fj.set_num_threads(5)
    sizes = []
    fj.fork(None, lambda tid: sizes.append(fj.get_num_threads()))
    assert sizes == [5] * 5
    assert fj.get_max_threads() == 5


def test_fork_negative_size_rejected(rt):
    rt(workers=1)
    with pytest.raises(ValueError):
        fj.fork(-1, lambda tid: None)


def test_nested_fork_runs_all_bodies(rt):
    rt(workers=2)
    counter = itertools.count()
    def outer(tid):
        fj.fork(2, lambda t: next(counter))
    fj.fork(2, outer)
    assert next(counter) == 4


def test_nested_fork_team_links(rt):
    rt(workers=2)
    relations = []
    def outer(tid):
        outer_team = fj.current_team()
        def inner(t):
            team = fj.current_team()
            relations.append((team.parent is outer_team, fj.get_num_threads()))
        fj.fork(3, inner)
        relations.append((outer_team.parent is None, fj.get_num_threads()))
    fj.fork(2, outer)
    inner_rel = [r for r in relations if r[1] == 3]
    outer_rel = [r for r in relations if r[1] == 2]
    assert len(inner_rel) == 6 and all(ok for ok, _ in inner_rel)
    assert len(outer_rel) == 2 and all(ok for ok, _ in outer_rel)


def test_fork_reraises_member_exception(rt):
    rt(workers=2)
    class Boom(Exception):
        pass
    def body(tid):
        if tid == 1:
            raise Boom("member failed")
    with pytest.raises(Boom):
        fj.fork(2, body)


def test_fork_team_larger_than_workers(rt):
    rt(workers=2)
    seen = set()
    lock = threading.Lock()
    def body(tid):
        with lock:
            seen.add(tid)
    fj.fork(16, body)
    assert seen == set(range(16))


def test_barrier_team_of_one(rt):
    rt(workers=1)
    def body(tid):
        fj.barrier_wait(fj.current_team(), tid)
    fj.fork(1, body)


def test_barrier_outside_team_is_noop(rt):
    rt(workers=1)
    fj.barrier_wait(None, 0)
    fj.barrier_wait(fj.current_team(), 0)  # current_team() is None here


def test_barrier_happens_before(rt):
    rt(workers=2)
    for _ in range(50):
        a = [0] * 8
        sums = [0] * 8
        def body(tid):
            a[tid] = tid + 1
            fj.barrier_wait(fj.current_team(), tid)
            sums[tid] = sum(a)
        fj.fork(8, body)
        assert sums == [36] * 8


def test_barrier_generations_do_not_mix(rt):
    rt(workers=2)
    phase_at_entry = []
    lock = threading.Lock()
    counters = [0, 0]
    def body(tid):
        team = fj.current_team()
        with lock:
            counters[0] += 1
        fj.barrier_wait(team, tid)
        # Everyone finished phase 1 before anyone proceeds.
        with lock:
            phase_at_entry.append(counters[0])
            counters[1] += 1
        fj.barrier_wait(team, tid)
        with lock:
            phase_at_entry.append(counters[1])
    fj.fork(6, body)
    assert phase_at_entry[::2] == [6] * 6  # all arrived before any passed 1st
    assert all(v >= 1 for v in phase_at_entry[1::2])
    assert phase_at_entry[1::2][-1] == 6


def test_barrier_generation_counter(rt):
    rt(workers=2)
    gens = []
    def body(tid):
        team = fj.current_team()
        fj.barrier_wait(team, tid)
        if tid == 0:
            gens.append(team.barrier_generation)
        fj.barrier_wait(team, tid)
        if tid == 0:
            gens.append(team.barrier_generation)
    fj.fork(4, body)
    assert gens == [1, 2]


def test_single_exactly_one(rt):
    rt(workers=2)
    for _ in range(50):
        winners = []
        lock = threading.Lock()
        def body(tid):
            if fj.single_enter(fj.current_team(), tid):
                with lock:
                    winners.append(tid)
        fj.fork(8, body)
        assert len(winners) == 1


def test_single_team_of_one(rt):
    rt(workers=1)
    result = []
    fj.fork(1, lambda tid: result.append(fj.single_enter(fj.current_team(), tid)))
    assert result == [True]


def test_single_two_instances(rt):
    rt(workers=2)
    wins = []
    lock = threading.Lock()
    def body(tid):
        team = fj.current_team()
        first = fj.single_enter(team, tid)
        fj.barrier_wait(team, tid)
        second = fj.single_enter(team, tid)
        with lock:
            wins.append((first, second))
    fj.fork(4, body)
    assert sum(1 for f, _ in wins if f) == 1
    assert sum(1 for _, s in wins if s) == 1


def test_master_check():
    assert fj.master_check(0) is True
    assert fj.master_check(3) is False


def test_master_check_ambient(rt):
    rt(workers=2)
    flags = {}
    lock = threading.Lock()
    def body(tid):
        with lock:
            flags[tid] = fj.master_check()
    fj.fork(4, body)
    assert flags == {0: True, 1: False, 2: False, 3: False}


def test_sections_three_of_eight(rt):
    rt(workers=2)
    executed = []
    empties = itertools.count()
    lock = threading.Lock()
    def body(tid):
        team = fj.current_team()
        while True:
            idx = fj.sections_next(team, 3)
            if idx is None:
                next(empties)
                return
            with lock:
                executed.append(idx)
    fj.fork(8, body)
    assert sorted(executed) == [0, 1, 2]
    assert next(empties) == 8


def test_sections_zero(rt):
    rt(workers=2)
    results = []
    lock = threading.Lock()
    def body(tid):
        with lock:
            results.append(fj.sections_next(fj.current_team(), 0))
    fj.fork(4, body)
    assert results == [None] * 4


def test_sections_drained_by_small_team(rt):
    rt(workers=2)
    executed = []
    lock = threading.Lock()
    def body(tid):
        team = fj.current_team()
        while True:
            idx = fj.sections_next(team, 8)
            if idx is None:
                return
            with lock:
                executed.append(idx)
    fj.fork(2, body)
    assert sorted(executed) == list(range(8))


def test_ordered_ascending(rt):
    rt(workers=2)
    log = []
    def body(tid):
        team = fj.current_team()
        fj.dispatch_init(team, tid, fj.SchedKind.DYNAMIC, 0, 15, 1, 1)
        while True:
            c = fj.dispatch_next(team, tid)
            if c is None:
                return
            for i in range(c.lower, c.upper + 1):
                fj.ordered_wait(team, i)
                log.append(i)
                fj.ordered_exit(team, i)
    fj.fork(4, body)
    assert log == list(range(16))


def test_ordered_team_of_one(rt):
    rt(workers=1)
    log = []
    def body(tid):
        team = fj.current_team()
        for i in range(4):
            fj.ordered_wait(team, i)
            log.append(i)
            fj.ordered_exit(team, i)
    fj.fork(1, body)
    assert log == [0, 1, 2, 3]


def test_ordered_out_of_order_arrival_suspends(rt):
    rt(workers=2)
    events = []
    lock = threading.Lock()
    def note(what):
        with lock:
            events.append(what)
    def body(tid):
        team = fj.current_team()
        if tid == 1:
            fj.ordered_wait(team, 1)   # must wait for 0 to exit
            note("enter-1")
            fj.ordered_exit(team, 1)
        else:
            time.sleep(0.05)           # make member 1 arrive first
            fj.ordered_wait(team, 0)
            note("exit-0-imminent")
            fj.ordered_exit(team, 0)
    fj.fork(2, body)
    assert events == ["exit-0-imminent", "enter-1"]


def test_ordered_duplicate_index_rejected(rt):
    rt(workers=1)
    errors = []
    def body(tid):
        team = fj.current_team()
        fj.ordered_wait(team, 0)
        fj.ordered_exit(team, 0)
        try:
            fj.ordered_wait(team, 0)
        except fj.OrderedViolationError as exc:
            errors.append(str(exc))
    fj.fork(1, body)
    assert errors


def test_ordered_exit_out_of_turn_rejected(rt):
    rt(workers=1)
    errors = []
    def body(tid):
        team = fj.current_team()
        try:
            fj.ordered_exit(team, 3)
        except fj.OrderedViolationError:
            errors.append(True)
    fj.fork(1, body)
    assert errors == [True]


def test_queries_outside_any_region(rt):
    rt(workers=2)
    assert fj.get_thread_num() == 0
    assert fj.get_num_threads() == 1
    assert fj.in_parallel() is False


def test_queries_inside_region(rt):
    rt(workers=2)
    rows = []
    lock = threading.Lock()
    def body(tid):
        with lock:
            rows.append((tid, fj.get_thread_num(), fj.get_num_threads(), fj.in_parallel()))
    fj.fork(3, body)
    assert sorted(rows) == [(i, i, 3, True) for i in range(3)]


def test_set_num_threads_validation(rt):
    rt(workers=1)
    with pytest.raises(ValueError):
        fj.set_num_threads(0)


def test_dynamic_flag_round_trip(rt):
    rt(workers=1)
    assert fj.get_dynamic() is False
    fj.set_dynamic(True)
    assert fj.get_dynamic() is True
    fj.set_dynamic(False)
    assert fj.get_dynamic() is False


def test_get_num_procs_positive():
    assert fj.get_num_procs() >= 1


def test_wtime_monotonic():
    t1 = fj.get_wtime()
    t2 = fj.get_wtime()
    assert t2 >= t1


def test_wtick_positive():
    assert fj.get_wtick() > 0


def test_wtime_tracks_sleep():
    t1 = fj.get_wtime()
    time.sleep(0.01)
    delta = fj.get_wtime() - t1
    assert 0.005 <= delta <= 1.0
