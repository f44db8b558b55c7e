"""Loop iteration scheduling: static partitioning and dynamic/guided dispatch.

Iteration spaces are closed intervals ``lower..upper`` walked by a non-zero
``incr`` (which may be negative).  Static assignment is a pure function of
(team size, thread number); dynamic and guided claims go through a shared
cursor owned by the team.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .errors import LoopMismatchError


class SchedKind(enum.Enum):
    STATIC_BLOCK = "static"
    STATIC_CHUNKED = "static-chunked"
    DYNAMIC = "dynamic"
    GUIDED = "guided"


def trip_count(lower: int, upper: int, incr: int) -> int:
    """Number of iterations in lower..upper (inclusive) stepping by incr."""
    if incr == 0:
        raise ValueError("loop increment must be non-zero")
    if incr > 0:
        if lower > upper:
            return 0
    else:
        if lower < upper:
            return 0
    return (upper - lower) // incr + 1


@dataclass
class LoopAssignment:
    """One thread's share of a statically scheduled loop.

    ``lower``/``upper`` bound the first (for chunked: first of many) run of
    iterations; ``stride`` advances between runs for chunked scheduling and
    spans the whole space for block scheduling.  ``last_iter`` marks the
    thread owning the sequentially-final iteration.
    """

    lower: int
    upper: int
    stride: int
    last_iter: bool
    _incr: int = field(default=1, repr=False)
    _chunk: Optional[int] = field(default=None, repr=False)
    _final_value: Optional[int] = field(default=None, repr=False)
    _count: int = field(default=0, repr=False)

    @property
    def empty(self) -> bool:
        return self._count == 0

    def iter_values(self):
        """Yield every iteration value this thread executes, in order."""
        if self._count == 0:
            return
        incr = self._incr
        if self._chunk is None:
            value = self.lower
            for _ in range(self._count):
                yield value
                value += incr
            return
        burst_start = self.lower
        final = self._final_value
        remaining = self._count
        while remaining:
            value = burst_start
            for _ in range(self._chunk):
                yield value
                remaining -= 1
                if remaining == 0 or value == final:
                    return
                value += incr
            burst_start += self.stride


def _empty_assignment(lower, incr, stride):
    return LoopAssignment(lower=lower, upper=lower - incr, stride=stride,
                          last_iter=False, _incr=incr, _count=0)


def static_init(team_size: int, tid: int, sched: SchedKind, lower: int, upper: int,
                incr: int, chunk: Optional[int] = None) -> LoopAssignment:
    """Compute thread ``tid``'s share of the iteration space at loop entry.

    STATIC_BLOCK splits the space into team_size contiguous blocks, as even
    as possible, the first ``count % team_size`` threads taking one extra.
    STATIC_CHUNKED deals fixed-size chunks round-robin: thread t owns chunks
    t, t+T, t+2T, ...
    """
    if incr == 0:
        raise ValueError("loop increment must be non-zero")
    if team_size < 1:
        raise ValueError("team_size must be >= 1")
    if not 0 <= tid < team_size:
        raise ValueError(f"tid {tid} outside team of {team_size}")

    n = trip_count(lower, upper, incr)

    if sched == SchedKind.STATIC_BLOCK:
        if chunk is not None:
            raise ValueError("STATIC_BLOCK takes no chunk; use STATIC_CHUNKED")
        span = n * incr if n else incr
        if n == 0:
            return _empty_assignment(lower, incr, span)
        base, rem = divmod(n, team_size)
        if tid < rem:
            count = base + 1
            start = tid * count
        else:
            count = base
            start = rem * (base + 1) + (tid - rem) * base
        if count == 0:
            return _empty_assignment(lower, incr, span)
        lo = lower + start * incr
        hi = lower + (start + count - 1) * incr
        return LoopAssignment(lower=lo, upper=hi, stride=span,
                              last_iter=(start + count == n),
                              _incr=incr, _count=count)

    if sched == SchedKind.STATIC_CHUNKED:
        if chunk is None or chunk < 1:
            raise ValueError("STATIC_CHUNKED requires chunk >= 1")
        stride = chunk * team_size * incr
        if n == 0:
            return _empty_assignment(lower, incr, stride)
        start = tid * chunk
        if start >= n:
            return _empty_assignment(lower, incr, stride)
        first_count = min(chunk, n - start)
        # positions owned: start + k + j*chunk*T for each owned chunk
        count = 0
        pos = start
        while pos < n:
            count += min(chunk, n - pos)
            pos += chunk * team_size
        lo = lower + start * incr
        hi = lower + (start + first_count - 1) * incr
        owner_of_last = ((n - 1) // chunk) % team_size
        return LoopAssignment(lower=lo, upper=hi, stride=stride,
                              last_iter=(tid == owner_of_last),
                              _incr=incr, _chunk=chunk,
                              _final_value=lower + (n - 1) * incr,
                              _count=count)

    raise ValueError(f"static_init requires a static schedule, got {sched}")


class Chunk(NamedTuple):
    """One dynamically claimed run of iterations (value bounds, inclusive)."""

    lower: int
    upper: int
    last_iter: bool


class LoopState:
    """Shared dispatch cursor for one dynamic/guided loop instance."""

    __slots__ = ("sched", "lower", "upper", "incr", "chunk", "team_size",
                 "_n", "_pos", "_lock", "registered", "ordered")

    def __init__(self, sched: SchedKind, lower: int, upper: int, incr: int,
                 chunk: int, team_size: int):
        if sched not in (SchedKind.DYNAMIC, SchedKind.GUIDED):
            raise ValueError(f"dispatch loop requires DYNAMIC or GUIDED, got {sched}")
        if chunk < 1:
            raise ValueError("chunk must be >= 1")
        self.sched = sched
        self.lower = lower
        self.upper = upper
        self.incr = incr
        self.chunk = chunk
        self.team_size = team_size
        self._n = trip_count(lower, upper, incr)
        self._pos = 0
        self._lock = threading.Lock()
        self.registered = 1
        self.ordered = None  # lazily attached ordered-region state

    def matches(self, sched, lower, upper, incr, chunk) -> None:
        if (sched, lower, upper, incr, chunk) != (self.sched, self.lower, self.upper,
                                                  self.incr, self.chunk):
            raise LoopMismatchError(
                "loop registration mismatch: "
                f"have {(self.sched, self.lower, self.upper, self.incr, self.chunk)}, "
                f"got {(sched, lower, upper, incr, chunk)}"
            )

    def next(self) -> Optional[Chunk]:
        """Atomically claim the next run of iterations; None when exhausted."""
        with self._lock:
            n = self._n
            pos = self._pos
            if pos >= n:
                return None
            if self.sched == SchedKind.DYNAMIC:
                take = self.chunk
            else:
                remaining = n - pos
                take = max(-(-remaining // self.team_size), self.chunk)
            end = min(pos + take, n)
            self._pos = end
        lo = self.lower + pos * self.incr
        hi = self.lower + (end - 1) * self.incr
        return Chunk(lo, hi, end >= n)
