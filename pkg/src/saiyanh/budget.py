"""Cooperative wall-clock deadline shared by the learning phases."""

from __future__ import annotations

import time


class Deadline:
    """Polled between atomic steps; never interrupts work in progress."""

    def __init__(self, seconds: float | None = None):
        self.seconds = seconds
        self._end = None if seconds is None else time.perf_counter() + seconds
        self.hit = False

    def expired(self) -> bool:
        if self._end is not None and time.perf_counter() >= self._end:
            self.hit = True
        return self.hit


NEVER = Deadline(None)
