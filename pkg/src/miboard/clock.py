"""Time sources for the server: real time or a manually advanced clock.

The rules engine never reads a clock; timeouts reach it as injected
commands. The hosting layer asks a clock for timestamps (event-record
``wall_time``) and for timers (the discussion timeout). Swapping in
``VirtualClock`` makes every timeout path deterministic: timers fire
only when the test driver advances time across their deadline.
"""

from __future__ import annotations

import asyncio
import heapq
import itertools
import time
from typing import Callable, Optional, Protocol


class Timer(Protocol):
    def cancel(self) -> None: ...


class Clock(Protocol):
    def now(self) -> float: ...

    def call_later(self, delay: float, callback: Callable[[], None]) -> Timer: ...


class WallClock:
    """Real time. Timestamps come from the system clock; timers run on
    the asyncio event loop."""

    def __init__(self, loop: Optional[asyncio.AbstractEventLoop] = None):
        self._loop = loop

    def _get_loop(self) -> asyncio.AbstractEventLoop:
        if self._loop is None:
            self._loop = asyncio.get_running_loop()
        return self._loop

    def now(self) -> float:
        return time.time()

    def call_later(self, delay: float, callback: Callable[[], None]) -> Timer:
        if delay < 0:
            raise ValueError("delay must be non-negative")
        return self._get_loop().call_later(delay, callback)


class _VirtualTimer:
    __slots__ = ("deadline", "callback", "cancelled")

    def __init__(self, deadline: float, callback: Callable[[], None]):
        self.deadline = deadline
        self.callback = callback
        self.cancelled = False

    def cancel(self) -> None:
        self.cancelled = True


class VirtualClock:
    """Deterministic time starting at zero that moves only on advance().

    Timers fire during advance() in deadline order (ties in scheduling
    order), with now() set to each timer's deadline while its callback
    runs, so a callback scheduling a follow-up inside the advanced window
    fires in the same call."""

    def __init__(self, start: float = 0.0):
        self._now = float(start)
        self._heap: list[tuple[float, int, _VirtualTimer]] = []
        self._order = itertools.count()

    def now(self) -> float:
        return self._now

    def call_later(self, delay: float, callback: Callable[[], None]) -> _VirtualTimer:
        if delay < 0:
            raise ValueError("delay must be non-negative")
        timer = _VirtualTimer(self._now + delay, callback)
        heapq.heappush(self._heap, (timer.deadline, next(self._order), timer))
        return timer

    def advance(self, seconds: float) -> int:
        """Move time forward, firing due timers. Returns how many fired."""
        if seconds < 0:
            raise ValueError("cannot advance backwards")
        target = self._now + seconds
        fired = 0
        while self._heap and self._heap[0][0] <= target:
            _, _, timer = heapq.heappop(self._heap)
            if timer.cancelled:
                continue
            self._now = max(self._now, timer.deadline)
            timer.callback()
            fired += 1
        self._now = target
        return fired

    def pending(self) -> int:
        """Live (not yet cancelled or fired) timer count."""
        return sum(1 for _, _, t in self._heap if not t.cancelled)
