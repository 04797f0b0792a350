"""Constant-velocity danmaku lane scheduler.

Lanes scroll text leftward at a shared velocity. A lane may launch a new
message only once the previous one has fully cleared the right edge plus a
safety gap; that instant is the lane's priority key in a min-heap, so the
scheduler always picks the earliest-available lane. Because all messages in
a lane share one velocity, spatial order is preserved forever and launches
that honor the rule can never collide.
"""

from __future__ import annotations

import heapq
import itertools
import unicodedata
from collections import deque
from dataclasses import dataclass
from enum import Enum

# Positive-length interval intersection, with a small floor so exact
# boundary touches (gap == 0 launched precisely at the available time)
# do not register as collisions through float rounding.
OVERLAP_EPS = 1e-9


@dataclass(frozen=True)
class SchedulerConfig:
    container_width: float = 1920.0
    velocity: float = 110.0
    gap: float = 20.0
    lane_count: int = 4
    glyph_width: float = 12.0
    wide_glyph_factor: float = 2.0

    def __post_init__(self) -> None:
        if self.velocity <= 0:
            raise ValueError("velocity must be > 0")
        if self.gap < 0:
            raise ValueError("gap must be >= 0")
        if self.lane_count < 1:
            raise ValueError("lane_count must be >= 1")
        if self.container_width <= 0:
            raise ValueError("container_width must be > 0")


def measure_text_width(text: str, cfg: SchedulerConfig) -> float:
    """Deterministic two-tier glyph model standing in for font metrics.

    CJK and fullwidth codepoints count wide_glyph_factor glyphs, everything
    else one; replaceable by a real-font backend with the same signature.
    """
    width = 0.0
    for ch in text:
        if unicodedata.east_asian_width(ch) in ("W", "F"):
            width += cfg.glyph_width * cfg.wide_glyph_factor
        else:
            width += cfg.glyph_width
    return width


def available_time(t_s: float, w_s: float, cfg: SchedulerConfig) -> float:
    """Earliest instant a lane can launch again after emitting at t_s with width w_s."""
    return t_s + (w_s + cfg.gap) / cfg.velocity


@dataclass
class LaneState:
    lane: int
    available_time: float = 0.0
    last_width: float = 0.0
    last_emit_time: float = 0.0


@dataclass(frozen=True)
class ActiveDanmaku:
    lane: int
    text: str
    width: float
    emit_time: float
    user: str = ""

    def x_at(self, t: float, cfg: SchedulerConfig) -> float:
        return cfg.container_width - cfg.velocity * (t - self.emit_time)


@dataclass(frozen=True)
class FrameDanmaku:
    """An active message with its position resolved for one sampled frame."""

    lane: int
    text: str
    width: float
    x: float
    emit_time: float


class OverloadPolicy(str, Enum):
    DROP = "drop"
    WAIT = "wait"


class LaneScheduler:
    """Min-heap lane allocator; single-threaded ownership of all mutation."""

    def __init__(
        self,
        cfg: SchedulerConfig | None = None,
        overload: OverloadPolicy = OverloadPolicy.DROP,
        wait_queue_limit: int = 64,
        launch_rule: bool = True,
    ) -> None:
        self.cfg = cfg if cfg is not None else SchedulerConfig()
        self.overload = overload
        self.launch_rule = launch_rule
        self.lanes = [LaneState(lane=k) for k in range(self.cfg.lane_count)]
        self._heap: list[tuple[float, int]] = [(0.0, k) for k in range(self.cfg.lane_count)]
        heapq.heapify(self._heap)
        self._active: list[ActiveDanmaku] = []
        self._wait: deque[tuple[str, str]] = deque(maxlen=wait_queue_limit)
        self._rr = itertools.count()
        self.drops = 0
        self.emitted = 0

    def try_emit(self, text: str, t_now: float, user: str = "") -> int | None:
        """Emit on the earliest-available lane; returns its index, or None on drop.

        Under the WAIT policy an unplaceable message parks in a bounded FIFO
        and is flushed by later try_emit/tick calls; overflow still drops.
        """
        if not self.launch_rule:
            lane = next(self._rr) % self.cfg.lane_count
            self._spawn(text, user, lane, t_now)
            return lane
        self._flush_wait(t_now)
        if self._wait:
            # earlier arrivals keep priority
            return self._park_or_drop(text, user)
        lane = self._emit_if_open(text, user, t_now)
        if lane is not None:
            return lane
        return self._park_or_drop(text, user)

    def tick(self, t_now: float) -> list[FrameDanmaku]:
        """Positions of every live message at t_now; retires fully exited ones."""
        self._flush_wait(t_now)
        frame: list[FrameDanmaku] = []
        survivors: list[ActiveDanmaku] = []
        for msg in self._active:
            x = msg.x_at(t_now, self.cfg)
            if x + msg.width < 0:
                continue
            survivors.append(msg)
            frame.append(FrameDanmaku(msg.lane, msg.text, msg.width, x, msg.emit_time))
        self._active = survivors
        return frame

    def lane_snapshot(self) -> list[LaneState]:
        return [LaneState(s.lane, s.available_time, s.last_width, s.last_emit_time) for s in self.lanes]

    def _emit_if_open(self, text: str, user: str, t_now: float) -> int | None:
        t_min, lane = self._heap[0]
        if t_min > t_now:
            return None
        heapq.heappop(self._heap)
        self._spawn(text, user, lane, t_now)
        return lane

    def _spawn(self, text: str, user: str, lane: int, t_now: float) -> None:
        width = measure_text_width(text, self.cfg)
        avail = available_time(t_now, width, self.cfg)
        state = self.lanes[lane]
        state.available_time = avail
        state.last_width = width
        state.last_emit_time = t_now
        if self.launch_rule:
            heapq.heappush(self._heap, (avail, lane))
        self._active.append(ActiveDanmaku(lane, text, width, t_now, user))
        self.emitted += 1

    def _flush_wait(self, t_now: float) -> None:
        while self._wait:
            text, user = self._wait[0]
            if self._emit_if_open(text, user, t_now) is None:
                break
            self._wait.popleft()

    def _park_or_drop(self, text: str, user: str) -> None:
        if self.overload is OverloadPolicy.WAIT and len(self._wait) < (self._wait.maxlen or 0):
            self._wait.append((text, user))
        else:
            self.drops += 1
        return None


def count_adjacent_overlaps(frame: list[FrameDanmaku], eps: float = OVERLAP_EPS) -> int:
    """Number of adjacent same-lane intersections; zero iff no pair overlaps.

    With intervals sorted by left edge, non-adjacent overlap implies adjacent
    overlap, so this is an O(n log n) existence test used on hot sampling
    paths; check_overlap enumerates the full pair list.
    """
    count = 0
    by_lane: dict[int, list[FrameDanmaku]] = {}
    for msg in frame:
        by_lane.setdefault(msg.lane, []).append(msg)
    for msgs in by_lane.values():
        msgs = sorted(msgs, key=lambda m: m.x)
        for a, b in zip(msgs, msgs[1:]):
            if a.x + a.width - b.x > eps:
                count += 1
    return count


def check_overlap(
    frame: list[FrameDanmaku], eps: float = OVERLAP_EPS
) -> list[tuple[FrameDanmaku, FrameDanmaku]]:
    """Every same-lane pair whose horizontal extents intersect with positive length."""
    by_lane: dict[int, list[FrameDanmaku]] = {}
    for msg in frame:
        by_lane.setdefault(msg.lane, []).append(msg)
    pairs: list[tuple[FrameDanmaku, FrameDanmaku]] = []
    for msgs in by_lane.values():
        msgs = sorted(msgs, key=lambda m: m.x)
        # sorted by left edge: if no adjacent pair intersects, none does
        clean = all(
            msgs[i].x + msgs[i].width <= msgs[i + 1].x + eps for i in range(len(msgs) - 1)
        )
        if clean:
            continue
        for i in range(len(msgs)):
            for j in range(i + 1, len(msgs)):
                a, b = msgs[i], msgs[j]
                span = min(a.x + a.width, b.x + b.width) - max(a.x, b.x)
                if span > eps:
                    pairs.append((a, b))
    return pairs
