"""Session clocks.

All timing in the pipeline flows through a Clock so that replays and tests
run on virtual time with identical results. Time is session-relative
milliseconds; it never decreases.
"""

from __future__ import annotations

import time


class Clock:
    """Monotonic session-relative time source in milliseconds."""

    kind: str

    def now_ms(self) -> int:
        raise NotImplementedError


class RealClock(Clock):
    """Wall-clock-backed monotonic time, origin at construction."""

    kind = "real"

    def __init__(self) -> None:
        self._origin = time.monotonic()

    def now_ms(self) -> int:
        return int((time.monotonic() - self._origin) * 1000)


class VirtualClock(Clock):
    """Manually advanced time for deterministic replay.

    Advances only through explicit calls; moving backwards is an error.
    """

    kind = "virtual"

    def __init__(self, start_ms: int = 0) -> None:
        self._now_ms = start_ms

    def now_ms(self) -> int:
        return self._now_ms

    def advance_to(self, target_ms: int) -> int:
        if target_ms < self._now_ms:
            raise ValueError(
                f"clock cannot move backwards: {self._now_ms} -> {target_ms}"
            )
        self._now_ms = target_ms
        return self._now_ms

    def advance(self, delta_ms: int) -> int:
        if delta_ms < 0:
            raise ValueError(f"negative advance: {delta_ms}")
        return self.advance_to(self._now_ms + delta_ms)
