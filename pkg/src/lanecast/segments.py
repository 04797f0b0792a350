"""Per-song four-segment broadcast protocol.

Every song gets an opener (first-play or transition variant), an empathy
segment, a story/production segment, and a closing segment, each triggered
at a fixed fraction of song progress inside its allowed window. A segment
whose speech could not finish before its window closes is skipped rather
than spoken late.
"""

from __future__ import annotations

import hashlib
import logging
import os
import random
import time
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Protocol

import numpy as np

from .audio.pcm import PcmBuffer
from .persona import PersonaConfig, render_template

logger = logging.getLogger(__name__)


class Segment(str, Enum):
    T1A = "T1a"
    T1B = "T1b"
    T2 = "T2"
    T3 = "T3"
    T4 = "T4"


class PlanState(str, Enum):
    PENDING = "Pending"
    INFLIGHT = "Inflight"
    SPOKEN = "Spoken"
    SKIPPED = "Skipped"


# progress-fraction windows; the opener window ends before the empathy window opens
SEGMENT_WINDOWS: dict[Segment, tuple[float, float]] = {
    Segment.T1A: (0.0, 0.10),
    Segment.T1B: (0.0, 0.10),
    Segment.T2: (0.15, 0.25),
    Segment.T3: (0.45, 0.55),
    Segment.T4: (0.85, 0.95),
}

DEFAULT_TRIGGERS: dict[Segment, float] = {
    Segment.T1A: 0.0,
    Segment.T1B: 0.0,
    Segment.T2: 0.20,
    Segment.T3: 0.50,
    Segment.T4: 0.90,
}

TARGET_CHARS: dict[Segment, int] = {
    Segment.T1A: 80,
    Segment.T1B: 60,
    Segment.T2: 100,
    Segment.T3: 80,
    Segment.T4: 80,
}

TOKEN_BUDGETS: dict[Segment, tuple[int, int]] = {
    Segment.T1A: (180, 80),
    Segment.T1B: (130, 60),
    Segment.T2: (220, 100),
    Segment.T3: (200, 80),
    Segment.T4: (210, 80),
}

TEMPLATE_FOR_SEGMENT: dict[Segment, str] = {
    Segment.T1A: "PromptT1_FirstPlay",
    Segment.T1B: "PromptT1_Transition",
    Segment.T2: "PromptT2_Empathy",
    Segment.T3: "PromptT3_Story",
    Segment.T4: "PromptT4_Outro",
}

SECONDS_PER_CHAR = 0.18


@dataclass(frozen=True)
class SongContext:
    song_name: str
    lyrics_lrc: str
    duration: float
    start_time: float
    is_first_song: bool = False

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValueError("song duration must be > 0")


@dataclass
class SegmentPlan:
    segment: Segment
    trigger_time: float
    window_start: float
    window_end: float
    target_chars: int
    input_token_budget: int
    output_token_budget: int
    persona: PersonaConfig
    state: PlanState = PlanState.PENDING
    utterance: str = ""
    llm_latency: float = 0.0
    tts_latency: float = 0.0
    speech: PcmBuffer | None = None
    error: str = ""
    fired_at: float | None = None


@dataclass(frozen=True)
class SegmentTiming:
    """Trigger fraction per segment; must lie inside the segment's window."""

    triggers: dict[Segment, float] = field(default_factory=lambda: dict(DEFAULT_TRIGGERS))

    def __post_init__(self) -> None:
        for segment, fraction in self.triggers.items():
            lo, hi = SEGMENT_WINDOWS[segment]
            if not lo <= fraction <= hi:
                raise ValueError(f"{segment.value} trigger {fraction} outside window [{lo}, {hi}]")


def plan_segments(
    ctx: SongContext, persona: PersonaConfig, timing: SegmentTiming | None = None
) -> list[SegmentPlan]:
    """Schedule T1/T2/T3/T4 for one song, binding the active persona."""
    timing = timing or SegmentTiming()
    opener = Segment.T1A if ctx.is_first_song else Segment.T1B
    plans = []
    for segment in (opener, Segment.T2, Segment.T3, Segment.T4):
        lo, hi = SEGMENT_WINDOWS[segment]
        inp, out = TOKEN_BUDGETS[segment]
        plans.append(
            SegmentPlan(
                segment=segment,
                trigger_time=ctx.start_time + timing.triggers[segment] * ctx.duration,
                window_start=ctx.start_time + lo * ctx.duration,
                window_end=ctx.start_time + hi * ctx.duration,
                target_chars=TARGET_CHARS[segment],
                input_token_budget=inp,
                output_token_budget=out,
                persona=persona,
            )
        )
    return plans


@dataclass(frozen=True)
class LlmResult:
    text: str
    latency: float


class LlmError(RuntimeError):
    pass


class LlmClient(Protocol):
    def complete(self, system_prompt: str, user_prompt: str, max_output_tokens: int) -> LlmResult: ...


class MockLlmClient:
    """Deterministic offline model: echoes a digest of the prompt.

    Latency is sampled from a seeded uniform range (or held fixed) without
    sleeping, so simulated sessions can model real inference delays.
    """

    def __init__(
        self,
        seed: int = 0,
        latency: float = 0.0,
        latency_range: tuple[float, float] | None = None,
    ) -> None:
        self._rng = random.Random(seed)
        self._latency = latency
        self._latency_range = latency_range
        self.calls = 0

    def complete(self, system_prompt: str, user_prompt: str, max_output_tokens: int) -> LlmResult:
        self.calls += 1
        tag = hashlib.blake2b(
            (system_prompt + "\x00" + user_prompt).encode("utf-8"), digest_size=4
        ).hexdigest()
        text = f"(mock-{tag}) {user_prompt[: max_output_tokens]}"
        if self._latency_range is not None:
            lo, hi = self._latency_range
            latency = self._rng.uniform(lo, hi)
        else:
            latency = self._latency
        return LlmResult(text=text, latency=latency)


class HttpLlmClient:
    """Generic chat-completion adapter; API key read from the environment."""

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key_env: str = "LLM_API_KEY",
        timeout: float = 30.0,
        transport=None,
    ) -> None:
        import httpx

        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = os.environ.get(api_key_env, "")
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def complete(self, system_prompt: str, user_prompt: str, max_output_tokens: int) -> LlmResult:
        import httpx

        payload = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": system_prompt},
                {"role": "user", "content": user_prompt},
            ],
            "max_tokens": max_output_tokens,
        }
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        t0 = time.perf_counter()
        try:
            response = self._client.post(
                f"{self.base_url}/chat/completions", json=payload, headers=headers
            )
            response.raise_for_status()
            body = response.json()
            text = body["choices"][0]["message"]["content"]
        except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
            raise LlmError(f"completion request failed: {exc}") from exc
        return LlmResult(text=text, latency=time.perf_counter() - t0)


@dataclass(frozen=True)
class TtsResult:
    buffer: PcmBuffer
    latency: float


class TtsClient(Protocol):
    def synthesize(self, text: str, voice: PersonaConfig) -> TtsResult: ...


class MockTtsSynthesizer:
    """Placeholder synthesis: a tone whose length tracks the character count.

    Pitch follows the voice parameters so swapped personas are audible in
    the rendered output; duration is chars * 0.18 s / SpeedRatio.
    """

    def __init__(self, sample_rate: int = 48000, latency: float = 0.0) -> None:
        self.sample_rate = sample_rate
        self._latency = latency

    def synthesize(self, text: str, voice: PersonaConfig) -> TtsResult:
        chars = max(1, len(text))
        duration = chars * SECONDS_PER_CHAR / voice.SpeedRatio
        base = 200.0 + (int(hashlib.blake2b(voice.VoiceType.encode(), digest_size=2).hexdigest(), 16) % 200)
        freq = base * voice.PitchRatio
        n = int(round(duration * self.sample_rate))
        t = np.arange(n) / self.sample_rate
        tone = 0.3 * np.sin(2 * np.pi * freq * t)
        buf = PcmBuffer.from_float(tone, sample_rate=self.sample_rate)
        return TtsResult(buffer=buf, latency=self._latency)


def run_segment(
    plan: SegmentPlan,
    persona: PersonaConfig,
    ctx: SongContext,
    llm: LlmClient,
    tts: TtsClient | None = None,
    voice_persona: PersonaConfig | None = None,
    wall_now: datetime | None = None,
) -> SegmentPlan:
    """Render, call the model, synthesize, and resolve Spoken vs Skipped.

    The prompt template comes from `persona` (bound at planning time); the
    voice comes from `voice_persona` (the persona active at call time).
    A segment finishing at or past its window end is skipped, never spoken
    late; transport failures also skip so the broadcast never blocks.
    """
    if plan.state is not PlanState.PENDING:
        raise ValueError(f"segment already {plan.state.value}")
    plan.state = PlanState.INFLIGHT
    template = getattr(persona, TEMPLATE_FOR_SEGMENT[plan.segment])
    prompt = render_template(template, ctx, persona, now=wall_now)
    try:
        result = llm.complete(persona.SystemPrompt, prompt, plan.output_token_budget)
    except LlmError as exc:
        plan.state = PlanState.SKIPPED
        plan.error = str(exc)
        logger.warning("segment %s skipped: %s", plan.segment.value, exc)
        return plan
    plan.llm_latency = result.latency
    speech: TtsResult | None = None
    if tts is not None:
        speech = tts.synthesize(result.text, voice_persona or persona)
        plan.tts_latency = speech.latency
    finish = plan.trigger_time + plan.llm_latency + plan.tts_latency
    if finish < plan.window_end:
        plan.state = PlanState.SPOKEN
        plan.utterance = result.text
        plan.speech = speech.buffer if speech else None
    else:
        plan.state = PlanState.SKIPPED
        plan.error = f"deadline exceeded: finish {finish:.3f} >= window end {plan.window_end:.3f}"
    return plan
