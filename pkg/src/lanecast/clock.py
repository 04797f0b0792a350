"""Session clocks: a monotonic seconds clock shared by simulation and live runs."""

from __future__ import annotations

import time


class SessionClock:
    """Interface: monotonic seconds since session start, as float."""

    def now(self) -> float:
        raise NotImplementedError


class SimulatedClock(SessionClock):
    """Manually advanced clock for deterministic replays."""

    def __init__(self, start: float = 0.0) -> None:
        self._now = float(start)

    def now(self) -> float:
        return self._now

    def advance(self, dt: float) -> float:
        if dt < 0:
            raise ValueError("clock cannot move backwards")
        self._now += dt
        return self._now

    def set(self, t: float) -> None:
        if t < self._now:
            raise ValueError("clock cannot move backwards")
        self._now = t


class RealtimeClock(SessionClock):
    """Wall clock anchored at construction, optionally sped up for demos."""

    def __init__(self, speed: float = 1.0) -> None:
        if speed <= 0:
            raise ValueError("speed must be positive")
        self.speed = speed
        self._t0 = time.monotonic()

    def now(self) -> float:
        return (time.monotonic() - self._t0) * self.speed
