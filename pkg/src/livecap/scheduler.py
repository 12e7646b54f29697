"""Timed-callback scheduling over a Clock.

The engine never sleeps or reads wall time directly; it asks a scheduler to
run callbacks at session-relative instants. Two backends share one interface:

* VirtualScheduler — a discrete-event loop over a VirtualClock. Entries run
  in (time, priority, insertion) order and the clock jumps between them, so
  whole sessions replay in milliseconds with a stable event order.
* AsyncioScheduler — maps entries onto a running asyncio loop for live
  serving. Priorities are kept for interface parity; real time breaks ties.
"""

from __future__ import annotations

import asyncio
import heapq
from dataclasses import dataclass, field
from typing import Any, Callable

from .clock import Clock, VirtualClock

# Late-priority band for control actions (e.g. a scheduled capture stop) that
# must run after same-instant pipeline work such as a tick.
PRIORITY_NORMAL = 0
PRIORITY_LATE = 9


@dataclass(order=True)
class _Entry:
    at_ms: int
    priority: int
    serial: int
    fn: Callable[..., None] = field(compare=False)
    args: tuple[Any, ...] = field(compare=False)
    cancelled: bool = field(default=False, compare=False)


class Handle:
    """Cancellation token for a scheduled callback."""

    def __init__(self, entry: _Entry, backend: "Scheduler") -> None:
        self._entry = entry
        self._backend = backend

    def cancel(self) -> None:
        self._backend._cancel(self._entry)

    @property
    def at_ms(self) -> int:
        return self._entry.at_ms


class Scheduler:
    clock: Clock

    def call_at(
        self, at_ms: int, fn: Callable[..., None], *args: Any, priority: int = PRIORITY_NORMAL
    ) -> Handle:
        raise NotImplementedError

    def call_in(
        self, delay_ms: int, fn: Callable[..., None], *args: Any, priority: int = PRIORITY_NORMAL
    ) -> Handle:
        return self.call_at(self.clock.now_ms() + max(0, delay_ms), fn, *args, priority=priority)

    def _cancel(self, entry: _Entry) -> None:
        entry.cancelled = True


class VirtualScheduler(Scheduler):
    """Discrete-event executor on virtual time."""

    def __init__(self, clock: VirtualClock | None = None) -> None:
        self.clock: VirtualClock = clock or VirtualClock()
        self._heap: list[_Entry] = []
        self._serial = 0

    def call_at(
        self, at_ms: int, fn: Callable[..., None], *args: Any, priority: int = PRIORITY_NORMAL
    ) -> Handle:
        at_ms = max(at_ms, self.clock.now_ms())
        self._serial += 1
        entry = _Entry(at_ms, priority, self._serial, fn, args)
        heapq.heappush(self._heap, entry)
        return Handle(entry, self)

    def _pop_next(self) -> _Entry | None:
        while self._heap:
            entry = heapq.heappop(self._heap)
            if not entry.cancelled:
                return entry
        return None

    def run_until_idle(self, max_steps: int = 1_000_000) -> int:
        """Run entries in order until none remain. Returns steps executed."""
        steps = 0
        while True:
            entry = self._pop_next()
            if entry is None:
                return steps
            self.clock.advance_to(entry.at_ms)
            entry.fn(*entry.args)
            steps += 1
            if steps >= max_steps:
                raise RuntimeError(f"scheduler did not go idle within {max_steps} steps")

    def run_until(self, t_ms: int) -> int:
        """Run entries with at_ms <= t_ms, then advance the clock to t_ms."""
        steps = 0
        while self._heap:
            entry = self._heap[0]
            if entry.cancelled:
                heapq.heappop(self._heap)
                continue
            if entry.at_ms > t_ms:
                break
            heapq.heappop(self._heap)
            self.clock.advance_to(entry.at_ms)
            entry.fn(*entry.args)
            steps += 1
        self.clock.advance_to(t_ms)
        return steps

    @property
    def pending(self) -> int:
        return sum(1 for e in self._heap if not e.cancelled)


class AsyncioScheduler(Scheduler):
    """Schedules entries on a live asyncio loop; clock is loop-relative."""

    def __init__(self, loop: asyncio.AbstractEventLoop, clock: Clock) -> None:
        self._loop = loop
        self.clock = clock
        self._timers: dict[int, asyncio.TimerHandle] = {}

    def call_at(
        self, at_ms: int, fn: Callable[..., None], *args: Any, priority: int = PRIORITY_NORMAL
    ) -> Handle:
        entry = _Entry(at_ms, priority, 0, fn, args)

        def _run() -> None:
            if not entry.cancelled:
                entry.fn(*entry.args)

        delay_s = max(0, at_ms - self.clock.now_ms()) / 1000.0
        self._timers[id(entry)] = self._loop.call_later(delay_s, _run)
        return Handle(entry, self)

    def _cancel(self, entry: _Entry) -> None:
        entry.cancelled = True
        timer = self._timers.pop(id(entry), None)
        if timer is not None:
            timer.cancel()
