"""Session engine: one loop owning the scheduler context.

Events enter through the thread-safe bus; everything else (lane emission,
quick reactions, segment firing, song advancement, frame sampling) happens
on a single logical context stepping the session clock at a fixed frame
rate. Snapshots handed out are plain dicts, safe to ship across threads.
"""

from __future__ import annotations

import threading
import time
from collections import deque
from dataclasses import dataclass, field

from .events import DedupConfig, EventBus, EventKind, LiveEvent
from .lanes import LaneScheduler, OverloadPolicy, SchedulerConfig, count_adjacent_overlaps
from .metrics import MetricsCollector, RunReport, build_report
from .persona import PersonaConfig, PersonaHolder, bundled_persona
from .reactions import CooldownConfig, OutcomeKind, QuickReactionEngine
from .segments import (
    MockLlmClient,
    MockTtsSynthesizer,
    PlanState,
    SegmentPlan,
    SongContext,
    plan_segments,
    run_segment,
)


@dataclass(frozen=True)
class SongSpec:
    """Playlist entry; start times are assigned by the engine."""

    song_name: str
    duration: float
    lyrics_lrc: str = ""

    def to_dict(self) -> dict:
        return {"song_name": self.song_name, "duration": self.duration, "lyrics_lrc": self.lyrics_lrc}

    @classmethod
    def from_dict(cls, payload: dict) -> "SongSpec":
        return cls(
            song_name=str(payload["song_name"]),
            duration=float(payload["duration"]),
            lyrics_lrc=str(payload.get("lyrics_lrc", "")),
        )


@dataclass(frozen=True)
class SpeechEntry:
    t: float
    source: str  # "urgent" | "reaction" | segment value
    text: str
    audio_seconds: float = 0.0


@dataclass
class EngineConfig:
    scheduler: SchedulerConfig = field(default_factory=SchedulerConfig)
    dedup: DedupConfig = field(default_factory=DedupConfig)
    cooldown: CooldownConfig = field(default_factory=CooldownConfig)
    fps: int = 60
    overload: OverloadPolicy = OverloadPolicy.DROP
    launch_rule: bool = True
    llm_seed: int = 7
    llm_latency_range: tuple[float, float] | None = None


class BroadcastEngine:
    def __init__(
        self,
        config: EngineConfig | None = None,
        playlist: list[SongSpec] | None = None,
        persona: PersonaConfig | None = None,
        llm=None,
        tts=None,
    ) -> None:
        self.config = config or EngineConfig()
        self.bus = EventBus(self.config.dedup)
        self.scheduler = LaneScheduler(
            self.config.scheduler,
            overload=self.config.overload,
            launch_rule=self.config.launch_rule,
        )
        self.persona_holder = PersonaHolder(persona or bundled_persona("shiguang"))
        self.llm = llm if llm is not None else MockLlmClient(
            seed=self.config.llm_seed, latency_range=self.config.llm_latency_range
        )
        self.tts = tts if tts is not None else MockTtsSynthesizer()
        self.reactions = QuickReactionEngine(cooldown=self.config.cooldown, llm=self.llm)
        self.metrics = MetricsCollector()
        self.playlist: list[SongSpec] = list(playlist or [])
        self._song_index = -1
        self.current_song: SongContext | None = None
        self.plans: list[SegmentPlan] = []
        self.speech_log: list[SpeechEntry] = []
        self._urgent: deque[str] = deque()
        self._urgent_lock = threading.Lock()
        self.fx_admitted = 0
        self._frame = 0
        self._started = False
        self.recent_events: deque[LiveEvent] = deque(maxlen=256)
        # gateway/console hooks, invoked on the engine context
        self.on_event = None  # (event, t, reaction OutcomeKind | None) -> None
        self.on_speech = None  # (SpeechEntry) -> None

    # ------------------------------------------------------------------ inputs

    def publish(self, event: LiveEvent) -> bool:
        """Thread-safe event ingress; returns dedup acceptance."""
        return self.bus.publish(event)

    def insert_urgent_speech(self, text: str) -> None:
        """Operator override: speaks ahead of scheduled segments, no cooldown."""
        if not text:
            raise ValueError("urgent speech text must be non-empty")
        with self._urgent_lock:
            self._urgent.append(text)

    # ------------------------------------------------------------------ loop

    @property
    def now(self) -> float:
        return self._frame / self.config.fps

    def start(self, t: float = 0.0) -> None:
        if self._started:
            raise RuntimeError("engine already started")
        self._started = True
        self._advance_song(t)

    def step_to(self, t_target: float) -> None:
        """Advance frame by frame (fps cadence) up to and including t_target."""
        if not self._started:
            self.start()
        while (self._frame + 1) / self.config.fps <= t_target:
            self._frame += 1
            self._run_frame(self._frame / self.config.fps)

    def _run_frame(self, t: float) -> None:
        self._advance_song(t)
        for event in self.bus.drain(t):
            self._route(event, t)
        self._speak_urgent(t)
        self._fire_segments(t)
        frame = self.scheduler.tick(t)
        self.metrics.record_frame(count_adjacent_overlaps(frame))

    def _route(self, event: LiveEvent, t: float) -> None:
        self.recent_events.append(event)
        outcome_kind = None
        if event.kind is EventKind.DANMAKU:
            t0 = time.perf_counter_ns()
            self.scheduler.try_emit(event.content, t, user=event.user)
            self.metrics.try_emit_ns.append(time.perf_counter_ns() - t0)
            self.metrics.record_latency("danmaku", event.timestamp, t)
            outcome = self.reactions.maybe_react(event, t)
            outcome_kind = outcome.kind
            if outcome.kind is OutcomeKind.FIRED:
                self._log_speech(SpeechEntry(t, "reaction", outcome.utterance))
        else:
            self.fx_admitted += 1
            self.metrics.record_latency(event.kind.value, event.timestamp, t)
        if self.on_event is not None:
            self.on_event(event, t, outcome_kind)

    def _speak_urgent(self, t: float) -> None:
        while True:
            with self._urgent_lock:
                if not self._urgent:
                    return
                text = self._urgent.popleft()
            self._log_speech(SpeechEntry(t, "urgent", text))

    def _log_speech(self, entry: SpeechEntry) -> None:
        self.speech_log.append(entry)
        if self.on_speech is not None:
            self.on_speech(entry)

    def _fire_segments(self, t: float) -> None:
        for plan in self.plans:
            if plan.state is PlanState.PENDING and t >= plan.trigger_time:
                plan.fired_at = t
                self.metrics.record_trigger(plan.trigger_time, t)
                run_segment(
                    plan,
                    plan.persona,
                    self.current_song,
                    self.llm,
                    tts=self.tts,
                    voice_persona=self.persona_holder.get(),
                )
                self.metrics.record_segment_state(plan.state.value)
                if plan.state is PlanState.SPOKEN:
                    seconds = plan.speech.duration if plan.speech is not None else 0.0
                    # rendered audio is accounted for, then dropped: long
                    # sessions must not accumulate PCM in resolved plans
                    plan.speech = None
                    self._log_speech(SpeechEntry(t, plan.segment.value, plan.utterance, seconds))

    def _advance_song(self, t: float) -> None:
        while True:
            if self.current_song is not None:
                if t < self.current_song.start_time + self.current_song.duration:
                    return
                for plan in self.plans:
                    if plan.state is PlanState.PENDING:
                        plan.state = PlanState.SKIPPED
                        self.metrics.record_segment_state(plan.state.value)
            next_index = self._song_index + 1
            if next_index >= len(self.playlist):
                return
            self._song_index = next_index
            spec = self.playlist[next_index]
            self.current_song = SongContext(
                song_name=spec.song_name,
                lyrics_lrc=spec.lyrics_lrc,
                duration=spec.duration,
                start_time=t,
                is_first_song=(next_index == 0),
            )
            self.plans = plan_segments(self.current_song, self.persona_holder.get())

    # ------------------------------------------------------------------ outputs

    def lane_snapshot_dict(self) -> dict:
        t = self.now
        frame = self.scheduler.tick(t)
        return {
            "t": t,
            "lanes": [{"k": s.lane, "avail": s.available_time} for s in self.scheduler.lane_snapshot()],
            "active": [
                {"lane": m.lane, "x": m.x, "width": m.width, "text": m.text} for m in frame
            ],
            "drops": self.scheduler.drops,
        }

    def segment_snapshot(self) -> list[dict]:
        return [
            {
                "segment": p.segment.value,
                "state": p.state.value,
                "trigger_time": p.trigger_time,
                "window": [p.window_start, p.window_end],
            }
            for p in self.plans
        ]

    def duplicate_rate(self) -> float:
        published = self.bus.counters.published
        if published == 0:
            return 0.0
        return self.bus.counters.rejected_duplicate / published

    def build_report(self, config_echo: dict, wall_seconds: float = 0.0) -> RunReport:
        return build_report(
            self.metrics,
            duplicate_rate=self.duplicate_rate(),
            drop_count=self.scheduler.drops,
            delivered=self.bus.counters.delivered,
            published=self.bus.counters.published,
            config_echo=config_echo,
            wall_seconds=wall_seconds,
        )
