"""Buffer lifecycle: callback discipline and release-exactly-once under races."""

import random
import threading

import pytest

from lanecast.audio.lifecycle import (
    AudioLifecycle,
    BufferState,
    DoubleReleaseError,
)


class TestBasicLifecycle:
    def test_completion_bins_the_handle(self):
        lc = AudioLifecycle()
        handle = lc.prepare()
        lc.start_playback(handle)
        lc.playback_complete_callback(handle)
        assert handle.state is BufferState.DONE
        assert len(lc.bin) == 1

    def test_duplicate_completion_is_noop(self):
        lc = AudioLifecycle()
        handle = lc.prepare()
        lc.start_playback(handle)
        lc.playback_complete_callback(handle)
        lc.playback_complete_callback(handle)
        assert len(lc.bin) == 1

    def test_drain_releases_each_exactly_once(self):
        lc = AudioLifecycle()
        handles = [lc.prepare() for _ in range(5)]
        for h in handles:
            lc.start_playback(h)
            lc.playback_complete_callback(h)
        assert lc.cleanup_worker_drain() == 5
        assert all(h.state is BufferState.RELEASED for h in handles)
        assert all(h.release_count == 1 for h in handles)
        assert lc.cleanup_worker_drain() == 0

    def test_double_release_is_hard_failure(self):
        lc = AudioLifecycle()
        handle = lc.prepare()
        lc.start_playback(handle)
        lc.playback_complete_callback(handle)
        lc.cleanup_worker_drain()
        lc.bin.push(handle)  # simulate a stray re-bin
        with pytest.raises(DoubleReleaseError):
            lc.cleanup_worker_drain()

    def test_rapid_completions_do_no_release_work(self):
        lc = AudioLifecycle()
        for _ in range(1000):
            h = lc.prepare()
            lc.start_playback(h)
            lc.playback_complete_callback(h)
        assert len(lc.bin) == 1000
        assert lc.released_total == 0
        assert lc.releases_in_callback == 0


class TestConcurrentStress:
    def test_randomized_interleaving_releases_exactly_once(self):
        lc = AudioLifecycle()
        cycles = 1000
        stop = threading.Event()

        def playback_thread():
            rng = random.Random(42)
            for _ in range(cycles):
                batch = [lc.prepare() for _ in range(rng.randint(1, 4))]
                for h in batch:
                    lc.start_playback(h)
                for h in batch:
                    lc.playback_complete_callback(h)
            stop.set()

        def cleanup_thread():
            while not stop.is_set():
                lc.cleanup_worker_drain()
            lc.cleanup_worker_drain()

        threads = [
            threading.Thread(target=playback_thread),
            threading.Thread(target=cleanup_thread),
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join(timeout=30)
        assert lc.released_total == len(lc.handles)
        assert all(h.release_count == 1 for h in lc.handles)
        assert all(h.state is BufferState.RELEASED for h in lc.handles)
        assert lc.releases_in_callback == 0
