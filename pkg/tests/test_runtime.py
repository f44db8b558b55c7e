"""Scheduler core: lifecycle, spawning, yielding, suspension, shutdown."""

import itertools
import threading
import time

import pytest

import forkjoin as fj


def test_ensure_started_idempotent(rt):
    handle = rt(workers=4)
    again = fj.ensure_started(fj.RuntimeConfig(num_workers=4))
    assert again is handle
    assert handle.num_workers == 4


def test_ensure_started_no_config_joins_existing(rt):
    handle = rt(workers=3)
    assert fj.ensure_started() is handle


def test_ensure_started_conflict_keeps_original(rt):
    handle = rt(workers=4)
    with pytest.raises(fj.ConfigConflictError):
        fj.ensure_started(fj.RuntimeConfig(num_workers=8))
    assert fj.current_runtime() is handle
    assert handle.num_workers == 4


def test_restart_after_shutdown_allowed(rt):
    rt(workers=2)
    fj.shutdown()
    handle = fj.ensure_started(fj.RuntimeConfig(num_workers=1))
    assert handle.num_workers == 1


def test_invalid_config_rejected():
    with pytest.raises(ValueError):
        fj.ensure_started(fj.RuntimeConfig(num_workers=0))


def test_env_overrides(rt, monkeypatch):
    monkeypatch.setenv("FJ_NUM_THREADS", "3")
    monkeypatch.setenv("FJ_POLICY", "abp")
    fj.shutdown()
    handle = fj.ensure_started(fj.RuntimeConfig(num_workers=8, policy="global"))
    assert handle.num_workers == 3
    assert handle.policy_kind == fj.PolicyKind.ABP_STEALING


def test_spawn_single(rt):
    rt(workers=1)
    hits = []
    fj.spawn(lambda: hits.append(1))
    fj.shutdown()
    assert hits == [1]


def test_spawn_many_exactly_once(rt):
    rt(workers=2)
    counter = itertools.count()
    for _ in range(10_000):
        fj.spawn(lambda: next(counter))
    fj.shutdown()
    assert next(counter) == 10_000


def test_spawn_exactly_once_large(rt):
    rt(workers=2)
    counter = itertools.count()
    n = 100_000
    for _ in range(n):
        fj.spawn(lambda: next(counter))
    fj.shutdown()
    assert next(counter) == n


def test_task_ids_monotonic(rt):
    rt(workers=1)
    ids = [fj.spawn(lambda: None) for _ in range(10)]
    assert ids == sorted(ids)
    assert len(set(ids)) == 10
    fj.shutdown()


def test_yield_five_times_single_task(rt):
    rt(workers=1)
    counts = []
    def body():
        for i in range(5):
            fj.yield_now()
            counts.append(i)
    fj.spawn(body)
    fj.shutdown()
    assert counts == list(range(5))


def test_yield_no_starvation_two_tasks(rt):
    rt(workers=1)
    done = []
    def yielder(name):
        for _ in range(100):
            fj.yield_now()
        done.append(name)
    fj.spawn(lambda: yielder("a"))
    fj.spawn(lambda: yielder("b"))
    fj.shutdown()
    assert sorted(done) == ["a", "b"]


def test_yield_with_many_peers(rt):
    rt(workers=1)
    counter = itertools.count()
    def yielder():
        fj.yield_now()
        next(counter)
    fj.spawn(yielder)
    for _ in range(1000):
        fj.spawn(lambda: next(counter))
    fj.shutdown()
    assert next(counter) == 1001


def test_yield_outside_task_is_noop():
    fj.yield_now()  # must not raise, with or without a runtime


def test_suspend_resume_happens_before(rt):
    rt(workers=2)
    box = {}
    ready = threading.Event()
    result = []
    def task_a():
        fj.suspend_current(lambda tok: (box.__setitem__("tok", tok), ready.set()))
        result.append(box["value"])
    def task_b():
        ready.wait()
        box["value"] = 42  # write strictly before the resume
        fj.resume(box["tok"])
    fj.spawn(task_a)
    fj.spawn(task_b)
    fj.shutdown()
    assert result == [42]


def test_suspended_task_does_not_block_worker(rt):
    rt(workers=1)
    done = []
    box = {}
    published = threading.Event()
    def suspender():
        fj.suspend_current(lambda tok: (box.__setitem__("tok", tok), published.set()))
        done.append("suspender")
    fj.spawn(suspender)
    for i in range(50):
        fj.spawn(lambda i=i: done.append(i))
    published.wait()
    while len(done) < 50:
        time.sleep(0.002)
    fj.resume(box["tok"])
    fj.shutdown()
    assert len(done) == 51


def test_double_resume_raises(rt):
    rt(workers=1)
    box = {}
    def body():
        fj.suspend_current(lambda tok: box.__setitem__("tok", tok))
    fj.spawn(body)
    while "tok" not in box:
        time.sleep(0.002)
    fj.resume(box["tok"])
    fj.shutdown()
    with pytest.raises(fj.DoubleResumeError):
        fj.resume(box["tok"])


def test_resume_rejects_non_tokens(rt):
    rt(workers=1)
    with pytest.raises(TypeError):
        fj.resume(object())


def test_suspend_outside_task_raises(rt):
    rt(workers=1)
    with pytest.raises(fj.OutsideTaskError):
        fj.suspend_current(lambda tok: None)


def test_resume_before_park_is_safe(rt):
    """Firing the token from the publish callback must not lose the task."""
    rt(workers=1)
    done = []
    def body():
        fj.suspend_current(lambda tok: fj.resume(tok))
        done.append(True)
    fj.spawn(body)
    fj.shutdown()
    assert done == [True]


def test_shutdown_empty(rt):
    rt(workers=4)
    fj.shutdown()


def test_shutdown_completes_pending(rt):
    rt(workers=2)
    counter = itertools.count()
    for _ in range(1000):
        fj.spawn(lambda: next(counter))
    fj.shutdown()
    assert next(counter) == 1000


def test_shutdown_idempotent(rt):
    rt(workers=2)
    fj.shutdown()
    fj.shutdown()


def test_spawn_after_shutdown_rejected(rt):
    handle = rt(workers=1)
    fj.shutdown()
    with pytest.raises(fj.RuntimeStoppedError):
        handle.spawn(lambda: None)


def test_spawn_module_level_restarts_after_shutdown(rt):
    rt(workers=1)
    fj.shutdown()
    hits = []
    fj.spawn(lambda: hits.append(1))  # auto-start per lazy-init contract
    fj.shutdown()
    assert hits == [1]


def test_current_worker_inside_and_outside(rt):
    rt(workers=2)
    seen = []
    fj.spawn(lambda: seen.append(fj.current_worker()))
    fj.shutdown()
    assert seen[0] in (0, 1)
    assert fj.current_worker() is None


def test_exactly_once_with_internal_spawns(rt):
    """Tasks spawning tasks: counts still exact."""
    rt(workers=2)
    counter = itertools.count()
    def parent():
        next(counter)
        for _ in range(10):
            fj.spawn(lambda: next(counter))
    for _ in range(100):
        fj.spawn(parent)
    fj.shutdown()
    assert next(counter) == 1100


def test_worker_survives_task_exception(rt):
    rt(workers=1)
    results = []
    fj.spawn(lambda: 1 / 0)
    fj.spawn(lambda: results.append("after"))
    fj.shutdown()
    assert results == ["after"]
