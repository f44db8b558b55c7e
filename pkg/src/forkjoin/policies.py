"""Queue disciplines that decide where spawned tasks wait and who may take them.

Seven interchangeable policies sit behind one ``push`` / ``pop`` / ``steal``
interface.  ``push`` may be called from any thread, ``pop`` only by the owning
worker, and ``steal`` by any worker whose own ``pop`` came up empty.

A note on synchronization: the hot paths intentionally rely on single
``collections.deque`` operations (``append`` / ``popleft`` / ``pop``), which
are atomic in CPython.  Races between a length check and the following pop are
caught with ``IndexError``.  Compound bookkeeping (round-robin counters,
balancing passes) uses plain locks off the hot path.
"""

from __future__ import annotations

import enum
import itertools
import random
from collections import deque


class PolicyKind(enum.Enum):
    """The seven scheduling policies, keyed by their FJ_POLICY string form."""

    PRIORITY_LOCAL = "priority-local"
    STATIC_PRIORITY = "static-priority"
    LOCAL = "local"
    GLOBAL = "global"
    ABP_STEALING = "abp"
    HIERARCHICAL = "hierarchical"
    PERIODIC_PRIORITY = "periodic-priority"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, name: str) -> "PolicyKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown policy {name!r}; expected one of: {valid}") from None


# Task priorities. Small ints so queue routing is a cheap compare.
HIGH = 0
NORMAL = 1
LOW = 2


class SchedulingPolicy:
    """Interface shared by all seven disciplines."""

    kind: PolicyKind

    def __init__(self, num_workers: int):
        self.num_workers = num_workers

    def push(self, task, hint=None) -> None:
        """Make ``task`` retrievable.  ``hint`` is the preferred worker, if any."""
        raise NotImplementedError

    def pop(self, worker: int):
        """Take the next task visible to ``worker``; None when it sees nothing."""
        raise NotImplementedError

    def steal(self, worker: int):
        """Last resort after an empty ``pop``; None when no victim has work."""
        raise NotImplementedError

    def has_visible_work(self, worker: int) -> bool:
        """Cheap (racy) check used by yield fast paths; may report stale state."""
        raise NotImplementedError


def _take_left(dq):
    if dq:
        try:
            return dq.popleft()
        except IndexError:
            return None
    return None


class PriorityLocalPolicy(SchedulingPolicy):
    """Per-worker FIFO queues plus one high-priority queue per worker.

    A worker drains its high-priority queue before its normal queue; idle
    workers steal from other workers' normal queues.
    """

    kind = PolicyKind.PRIORITY_LOCAL

    def __init__(self, num_workers):
        super().__init__(num_workers)
        self.normal = [deque() for _ in range(num_workers)]
        self.high = [deque() for _ in range(num_workers)]
        self._rr = itertools.count()

    def push(self, task, hint=None):
        w = hint if hint is not None else next(self._rr) % self.num_workers
        if task.priority == HIGH:
            self.high[w].append(task)
        else:
            self.normal[w].append(task)

    def pop(self, worker):
        dq = self.high[worker]
        if dq:
            try:
                return dq.popleft()
            except IndexError:
                pass
        dq = self.normal[worker]
        if dq:
            try:
                return dq.popleft()
            except IndexError:
                pass
        return None

    def steal(self, worker):
        n = self.num_workers
        start = random.randrange(n) if n > 1 else 0
        for i in range(n):
            v = (start + i) % n
            if v == worker:
                continue
            task = _take_left(self.normal[v])
            if task is not None:
                return task
        return None

    def has_visible_work(self, worker):
        if self.high[worker] or self.normal[worker]:
            return True
        return any(self.normal[v] for v in range(self.num_workers) if v != worker)


class LocalPolicy(PriorityLocalPolicy):
    """Per-worker FIFO queues without the high-priority tier."""

    kind = PolicyKind.LOCAL

    def push(self, task, hint=None):
        w = hint if hint is not None else next(self._rr) % self.num_workers
        self.normal[w].append(task)

    def pop(self, worker):
        dq = self.normal[worker]
        if dq:
            try:
                return dq.popleft()
            except IndexError:
                pass
        return None


class StaticPriorityPolicy(SchedulingPolicy):
    """Round-robin assignment to per-worker FIFO queues; no stealing ever.

    The assignment is made at enqueue time and recorded on the task, so a
    task that suspends and resumes goes back to the same worker's queue.
    """

    kind = PolicyKind.STATIC_PRIORITY

    def __init__(self, num_workers):
        super().__init__(num_workers)
        self.queues = [deque() for _ in range(num_workers)]
        self._rr = itertools.count()

    def push(self, task, hint=None):
        w = task.origin_worker
        if w is None:
            w = next(self._rr) % self.num_workers
            task.origin_worker = w
        self.queues[w].append(task)

    def pop(self, worker):
        dq = self.queues[worker]
        if dq:
            try:
                return dq.popleft()
            except IndexError:
                pass
        return None

    def steal(self, worker):
        return None

    def has_visible_work(self, worker):
        return bool(self.queues[worker])


class GlobalPolicy(SchedulingPolicy):
    """A single shared FIFO from which every worker pulls."""

    kind = PolicyKind.GLOBAL

    def __init__(self, num_workers):
        super().__init__(num_workers)
        self.queue = deque()

    def push(self, task, hint=None):
        self.queue.append(task)

    def pop(self, worker):
        dq = self.queue
        if dq:
            try:
                return dq.popleft()
            except IndexError:
                pass
        return None

    def steal(self, worker):
        return None

    def has_visible_work(self, worker):
        return bool(self.queue)


class AbpStealingPolicy(SchedulingPolicy):
    """Per-worker double-ended queues.

    Owners push and pop at the top (LIFO); thieves steal from the bottom
    (FIFO).  Correctness rests on the deque taking each element exactly once,
    not on lock-freedom.
    """

    kind = PolicyKind.ABP_STEALING

    def __init__(self, num_workers):
        super().__init__(num_workers)
        self.deques = [deque() for _ in range(num_workers)]
        self._rr = itertools.count()

    def push(self, task, hint=None):
        w = hint if hint is not None else next(self._rr) % self.num_workers
        self.deques[w].append(task)

    def pop(self, worker):
        dq = self.deques[worker]
        if dq:
            try:
                return dq.pop()
            except IndexError:
                pass
        return None

    def steal(self, worker):
        n = self.num_workers
        start = random.randrange(n) if n > 1 else 0
        for i in range(n):
            v = (start + i) % n
            if v == worker:
                continue
            task = _take_left(self.deques[v])
            if task is not None:
                return task
        return None

    def has_visible_work(self, worker):
        return any(self.deques)


class HierarchicalPolicy(SchedulingPolicy):
    """A complete binary tree of queues with one leaf per worker.

    Fresh tasks enter at the root.  A worker takes from its leaf and, when
    that is empty, walks its ancestors toward the root, taking a single task
    from the first non-empty node.  Resumed tasks are placed directly on the
    origin worker's leaf.
    """

    kind = PolicyKind.HIERARCHICAL

    def __init__(self, num_workers):
        super().__init__(num_workers)
        leaves = 1
        while leaves < num_workers:
            leaves *= 2
        self.num_leaves = leaves
        self.nodes = [deque() for _ in range(2 * leaves - 1)]

    def _leaf(self, worker):
        return self.num_leaves - 1 + worker

    def push(self, task, hint=None):
        if hint is not None and task._cont is not None:
            self.nodes[self._leaf(hint)].append(task)
        else:
            self.nodes[0].append(task)

    def pop(self, worker):
        nodes = self.nodes
        i = self._leaf(worker)
        while True:
            dq = nodes[i]
            if dq:
                try:
                    return dq.popleft()
                except IndexError:
                    pass
            if i == 0:
                return None
            i = (i - 1) // 2

    def steal(self, worker):
        # pop already reaches the root; nothing more to look at.
        return None

    def has_visible_work(self, worker):
        i = self._leaf(worker)
        while True:
            if self.nodes[i]:
                return True
            if i == 0:
                return False
            i = (i - 1) // 2


class PeriodicPriorityPolicy(SchedulingPolicy):
    """Per-worker queues, two shared high-priority queues, one shared low queue.

    Every 100th dequeue attempt by a worker runs a balancing pass that levels
    its queue against the longest per-worker queue; that pass is the policy's
    only migration mechanism.
    """

    kind = PolicyKind.PERIODIC_PRIORITY

    BALANCE_EVERY = 100

    def __init__(self, num_workers):
        super().__init__(num_workers)
        self.normal = [deque() for _ in range(num_workers)]
        self.high = (deque(), deque())
        self.low = deque()
        self._rr = itertools.count()
        self._rr_high = itertools.count()
        self._attempts = [0] * num_workers

    def push(self, task, hint=None):
        pri = task.priority
        if pri == HIGH:
            self.high[next(self._rr_high) % 2].append(task)
        elif pri == LOW:
            self.low.append(task)
        else:
            w = hint if hint is not None else next(self._rr) % self.num_workers
            self.normal[w].append(task)

    def pop(self, worker):
        n = self._attempts[worker] + 1
        self._attempts[worker] = n
        if n % self.BALANCE_EVERY == 0:
            self._balance(worker)
        first = worker & 1
        task = _take_left(self.high[first])
        if task is not None:
            return task
        task = _take_left(self.high[first ^ 1])
        if task is not None:
            return task
        dq = self.normal[worker]
        if dq:
            try:
                return dq.popleft()
            except IndexError:
                pass
        return _take_left(self.low)

    def _balance(self, worker):
        mine = self.normal[worker]
        longest = None
        longest_len = len(mine)
        for v in range(self.num_workers):
            if v == worker:
                continue
            q = self.normal[v]
            qlen = len(q)
            if qlen > longest_len:
                longest = q
                longest_len = qlen
        if longest is None:
            return
        move = (longest_len - len(mine)) // 2
        for _ in range(move):
            task = _take_left(longest)
            if task is None:
                break
            mine.append(task)

    def steal(self, worker):
        return None

    def has_visible_work(self, worker):
        if self.high[0] or self.high[1] or self.low or self.normal[worker]:
            return True
        return any(self.normal)


_POLICY_CLASSES = {
    PolicyKind.PRIORITY_LOCAL: PriorityLocalPolicy,
    PolicyKind.STATIC_PRIORITY: StaticPriorityPolicy,
    PolicyKind.LOCAL: LocalPolicy,
    PolicyKind.GLOBAL: GlobalPolicy,
    PolicyKind.ABP_STEALING: AbpStealingPolicy,
    PolicyKind.HIERARCHICAL: HierarchicalPolicy,
    PolicyKind.PERIODIC_PRIORITY: PeriodicPriorityPolicy,
}


def make_policy(kind: PolicyKind, num_workers: int) -> SchedulingPolicy:
    return _POLICY_CLASSES[kind](num_workers)
