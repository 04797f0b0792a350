"""Event model, timestamp-ordered event bus, and sliding-window deduplication.

Producers may publish from any thread; a single consumer drains in timestamp
order. Duplicate events (same dedup key inside the window) are rejected at
publish time so downstream triggers never fire twice for one burst.
"""

from __future__ import annotations

import hashlib
import heapq
import json
import logging
import threading
from dataclasses import dataclass
from enum import Enum

logger = logging.getLogger(__name__)


class EventKind(str, Enum):
    DANMAKU = "danmaku"
    GIFT = "gift"
    LIKE = "like"
    ENTRANCE = "entrance"


class KeyMode(str, Enum):
    CONTENT_ONLY = "content_only"
    USER_AND_CONTENT = "user_and_content"


@dataclass(frozen=True)
class LiveEvent:
    """One interaction event on the session clock (seconds, monotonic)."""

    kind: EventKind
    timestamp: float
    user: str = ""
    content: str = ""
    count: int = 1

    def validate(self) -> None:
        if self.timestamp < 0:
            raise ValueError(f"negative timestamp: {self.timestamp}")
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")
        if self.kind is EventKind.DANMAKU and not self.content:
            raise ValueError("danmaku content must be non-empty")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "timestamp": self.timestamp,
            "user": self.user,
            "content": self.content,
            "count": self.count,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "LiveEvent":
        try:
            event = cls(
                kind=EventKind(payload["kind"]),
                timestamp=float(payload["timestamp"]),
                user=str(payload.get("user", "")),
                content=str(payload.get("content", "")),
                count=int(payload.get("count", 1)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed event payload: {exc}") from exc
        event.validate()
        return event

    @classmethod
    def from_json(cls, text: str) -> "LiveEvent":
        return cls.from_dict(json.loads(text))


# Dedup is aimed at capture jitter on danmaku; gift storms are legitimately
# repetitive, so other kinds are opted in explicitly.
DEFAULT_DEDUP_KINDS = frozenset({EventKind.DANMAKU})


@dataclass(frozen=True)
class DedupConfig:
    window: float = 2.0
    key_mode: KeyMode = KeyMode.CONTENT_ONLY
    kinds: frozenset[EventKind] = DEFAULT_DEDUP_KINDS

    def __post_init__(self) -> None:
        if self.window <= 0:
            raise ValueError("dedup window must be > 0")


def dedup_key(event: LiveEvent, cfg: DedupConfig) -> int:
    """Stable 64-bit key; equal inputs always map to equal keys."""
    if cfg.key_mode is KeyMode.USER_AND_CONTENT:
        material = event.user + "\x00" + event.content
    else:
        material = event.content
    digest = hashlib.blake2b(material.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


@dataclass
class BusCounters:
    published: int = 0
    accepted: int = 0
    rejected_duplicate: int = 0
    delivered: int = 0


class EventBus:
    """Multi-producer, single-consumer bus with buffered timestamp ordering."""

    def __init__(self, dedup: DedupConfig | None = None) -> None:
        self.dedup = dedup if dedup is not None else DedupConfig()
        self._lock = threading.Lock()
        self._heap: list[tuple[float, int, LiveEvent]] = []
        self._seq = 0
        # key -> accept time of the live window entry
        self._seen: dict[int, float] = {}
        self.counters = BusCounters()

    def publish(self, event: LiveEvent) -> bool:
        """Enqueue unless rejected by dedup; returns whether it was accepted."""
        event.validate()
        with self._lock:
            self.counters.published += 1
            if event.kind in self.dedup.kinds:
                key = dedup_key(event, self.dedup)
                accepted_at = self._seen.get(key)
                if accepted_at is not None and event.timestamp - accepted_at < self.dedup.window:
                    self.counters.rejected_duplicate += 1
                    return False
                self._seen[key] = event.timestamp
            heapq.heappush(self._heap, (event.timestamp, self._seq, event))
            self._seq += 1
            self.counters.accepted += 1
            return True

    def drain(self, now: float) -> list[LiveEvent]:
        """All accepted events with timestamp <= now, in timestamp order."""
        with self._lock:
            out: list[LiveEvent] = []
            while self._heap and self._heap[0][0] <= now:
                out.append(heapq.heappop(self._heap)[2])
            self.counters.delivered += len(out)
            self._evict(now)
            return out

    def pending(self) -> int:
        with self._lock:
            return len(self._heap)

    def _evict(self, now: float) -> None:
        if not self._seen:
            return
        horizon = now - self.dedup.window
        stale = [k for k, t in self._seen.items() if t < horizon]
        for k in stale:
            del self._seen[k]
