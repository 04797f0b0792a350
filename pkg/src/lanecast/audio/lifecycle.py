"""Callback-safe audio buffer lifecycle.

Playback-completion callbacks run in a context that must never perform
release work (the real device driver holds a lock there). The callback only
flips state and appends the handle to a concurrent FIFO; a dedicated cleanup
worker drains the FIFO and releases each handle exactly once.
"""

from __future__ import annotations

import itertools
import logging
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

logger = logging.getLogger(__name__)

_callback_ctx = threading.local()


class BufferState(Enum):
    PREPARED = "prepared"
    PLAYING = "playing"
    DONE = "done"
    RELEASED = "released"


class DoubleReleaseError(AssertionError):
    """A handle reached the release path twice; lifecycle invariant breached."""


@dataclass
class BufferHandle:
    handle_id: int
    state: BufferState = BufferState.PREPARED
    release_count: int = 0
    payload_frames: int = 0
    _state_lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


class GarbageBin:
    """Multi-producer single-consumer FIFO of completed handles."""

    def __init__(self) -> None:
        self._bin: deque[BufferHandle] = deque()

    def push(self, handle: BufferHandle) -> None:
        self._bin.append(handle)

    def pop_all(self) -> list[BufferHandle]:
        out = []
        while True:
            try:
                out.append(self._bin.popleft())
            except IndexError:
                return out

    def __len__(self) -> int:
        return len(self._bin)


class AudioLifecycle:
    """Owns handle allocation, the completion callback, and the cleanup drain."""

    def __init__(self) -> None:
        self.bin = GarbageBin()
        self._ids = itertools.count(1)
        self._alloc_lock = threading.Lock()
        self.handles: list[BufferHandle] = []
        self.released_total = 0
        self.releases_in_callback = 0
        self.max_callback_seconds = 0.0

    def prepare(self, payload_frames: int = 0) -> BufferHandle:
        handle = BufferHandle(handle_id=next(self._ids), payload_frames=payload_frames)
        with self._alloc_lock:
            self.handles.append(handle)
        return handle

    def start_playback(self, handle: BufferHandle) -> None:
        with handle._state_lock:
            if handle.state is not BufferState.PREPARED:
                raise ValueError(f"cannot start playback from {handle.state}")
            handle.state = BufferState.PLAYING

    def playback_complete_callback(self, handle: BufferHandle) -> None:
        """Bounded-time completion hook: mark Done and enqueue, nothing else."""
        t0 = time.perf_counter()
        _callback_ctx.active = True
        try:
            with handle._state_lock:
                if handle.state is BufferState.DONE:
                    logger.warning("duplicate completion for buffer %d ignored", handle.handle_id)
                    return
                if handle.state is not BufferState.PLAYING:
                    raise ValueError(f"completion for buffer in state {handle.state}")
                handle.state = BufferState.DONE
            self.bin.push(handle)
        finally:
            _callback_ctx.active = False
            elapsed = time.perf_counter() - t0
            if elapsed > self.max_callback_seconds:
                self.max_callback_seconds = elapsed

    def cleanup_worker_drain(self) -> int:
        """Release every binned handle exactly once; returns the count."""
        released = 0
        for handle in self.bin.pop_all():
            self._release(handle)
            released += 1
        return released

    def _release(self, handle: BufferHandle) -> None:
        if getattr(_callback_ctx, "active", False):
            self.releases_in_callback += 1
            raise DoubleReleaseError("release attempted inside callback context")
        with handle._state_lock:
            if handle.state is not BufferState.DONE:
                raise DoubleReleaseError(
                    f"buffer {handle.handle_id} released from state {handle.state}"
                )
            handle.state = BufferState.RELEASED
            handle.release_count += 1
        self.released_total += 1
