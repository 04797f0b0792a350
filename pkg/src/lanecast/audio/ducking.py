"""Background-music ducking: attenuate while any speech utterance is active.

Gain transitions use a short linear ramp so renders are click-free. Starts
and stops must be well-nested; the gain stays ducked until the last active
utterance stops.
"""

from __future__ import annotations

import numpy as np

from .pcm import PcmBuffer, duck_gain_factor


class DuckingProtocolError(RuntimeError):
    """A stop event arrived without a matching start."""


class DuckingControl:
    def __init__(self, attenuation_db: float = 12.0, ramp: float = 0.05) -> None:
        if ramp < 0:
            raise ValueError("ramp must be >= 0")
        self.ducked_gain = duck_gain_factor(attenuation_db)
        self.ramp = ramp
        self._active = 0
        # (event time, gain at that instant, ramp target)
        self._transitions: list[tuple[float, float, float]] = [(0.0, 1.0, 1.0)]

    @property
    def active_utterances(self) -> int:
        return self._active

    def on_speech_start(self, t: float) -> None:
        self._active += 1
        if self._active == 1:
            self._retarget(t, self.ducked_gain)

    def on_speech_stop(self, t: float) -> None:
        if self._active == 0:
            raise DuckingProtocolError(f"speech stop at t={t} without a matching start")
        self._active -= 1
        if self._active == 0:
            self._retarget(t, 1.0)

    def gain_at(self, t: float) -> float:
        t_event, g_from, g_to = self._transitions[0]
        for entry in self._transitions:
            if entry[0] <= t:
                t_event, g_from, g_to = entry
            else:
                break
        if self.ramp == 0:
            return g_to
        progress = min(1.0, max(0.0, (t - t_event) / self.ramp))
        return g_from + (g_to - g_from) * progress

    def gain_curve(self, times: np.ndarray) -> np.ndarray:
        return np.array([self.gain_at(float(t)) for t in times])

    def apply(self, bgm: PcmBuffer, start_time: float = 0.0) -> PcmBuffer:
        """Render the gain envelope onto a music buffer aligned at start_time."""
        times = start_time + np.arange(bgm.num_frames) / bgm.sample_rate
        gains = np.interp(times, *self._knots())
        per_sample = np.repeat(gains, bgm.channels)
        scaled = np.rint(bgm.samples.astype(np.float64) * per_sample)
        out = np.clip(scaled, -32768, 32767).astype(np.int16)
        return PcmBuffer(out, channels=bgm.channels, sample_rate=bgm.sample_rate)

    def _retarget(self, t: float, target: float) -> None:
        if t < self._transitions[-1][0]:
            raise ValueError("ducking events must arrive in time order")
        self._transitions.append((t, self.gain_at(t), target))

    def _knots(self) -> tuple[np.ndarray, np.ndarray]:
        xs: list[float] = []
        ys: list[float] = []
        n = len(self._transitions)
        for i, (t_event, g_from, g_to) in enumerate(self._transitions):
            t_next = self._transitions[i + 1][0] if i + 1 < n else None
            xs.append(t_event)
            ys.append(g_from)
            ramp_end = t_event + self.ramp
            # a ramp cut short by the next transition ends on that
            # transition's own starting knot, which lies on the same line
            if t_next is None or ramp_end < t_next:
                xs.append(ramp_end)
                ys.append(g_to)
        # zero-length ramps produce duplicate x; nudge to keep interp monotone
        for i in range(1, len(xs)):
            if xs[i] <= xs[i - 1]:
                xs[i] = np.nextafter(xs[i - 1], np.inf)
        return np.asarray(xs), np.asarray(ys)
