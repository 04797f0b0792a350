"""Operator gateway: HTTP control verbs plus a WebSocket state stream.

A supervisor thread owns the engine and is its only driver; handlers talk
to it through a command queue (or the thread-safe bus for event ingress),
so no control call ever blocks the scheduler context. Stream subscribers
get bounded buffers with drop-oldest and explicit gap notices.
"""

from __future__ import annotations

import itertools
import json
import queue
import threading
import time
import uuid
from collections import deque
from enum import Enum

import anyio
from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect

from .engine import BroadcastEngine, EngineConfig, SongSpec, SpeechEntry
from .events import LiveEvent
from .loadgen import LoadProfile, generate_workload
from .persona import PersonaValidationError, bundled_persona, bundled_persona_names, load_persona
from .reactions import OutcomeKind

PUSH_INTERVAL = 0.05  # 20 Hz, above the 10 Hz floor
SCHEMA_VERSION = 1


class SessionState(str, Enum):
    IDLE = "Idle"
    RUNNING = "Running"
    STOPPED = "Stopped"


class Subscriber:
    """Bounded per-connection buffer; overflow drops oldest and notes a gap."""

    def __init__(self, maxlen: int = 512) -> None:
        self._dq: deque[dict] = deque()
        self._maxlen = maxlen
        self._cond = threading.Condition()
        self._pending_gap = 0

    def push(self, message: dict) -> None:
        with self._cond:
            if len(self._dq) >= self._maxlen:
                self._dq.popleft()
                self._pending_gap += 1
            self._dq.append(message)
            self._cond.notify()

    def pop(self, timeout: float) -> dict | None:
        with self._cond:
            if self._pending_gap:
                notice = {"v": SCHEMA_VERSION, "type": "gap", "data": {"dropped": self._pending_gap}}
                self._pending_gap = 0
                return notice
            if not self._dq:
                self._cond.wait(timeout)
            if self._dq:
                return self._dq.popleft()
            return None


class SessionSupervisor:
    """Owns the engine thread; one session at a time."""

    def __init__(self) -> None:
        self.state = SessionState.IDLE
        self.engine: BroadcastEngine | None = None
        self.session_id: str | None = None
        self.clock_mode = "simulated"
        self.speed = 1.0
        self._commands: queue.Queue = queue.Queue()
        self._subscribers: list[Subscriber] = []
        self._sub_lock = threading.Lock()
        self._seq = itertools.count(1)
        self._thread: threading.Thread | None = None
        self._stop_loop = False
        self._idle_persona = bundled_persona("shiguang")
        self._last_segments: list[dict] = []
        threading.Thread(target=self._idle_heartbeat, daemon=True).start()

    # ---------------------------------------------------------------- control

    def start_session(
        self,
        profile: LoadProfile | None,
        playlist: list[SongSpec],
        clock_mode: str = "simulated",
        speed: float = 1.0,
    ) -> dict:
        if self.state is SessionState.RUNNING:
            raise RuntimeError("session already running")
        if clock_mode not in ("simulated", "realtime"):
            raise ValueError(f"unknown clock mode: {clock_mode}")
        if speed <= 0:
            raise ValueError("speed must be positive")
        engine = BroadcastEngine(EngineConfig(), playlist=playlist, persona=self._idle_persona)
        if profile is not None:
            for event in generate_workload(profile):
                engine.publish(event)
        engine.on_event = self._on_engine_event
        engine.on_speech = self._on_engine_speech
        self.engine = engine
        self.session_id = uuid.uuid4().hex[:12]
        self.clock_mode = clock_mode
        self.speed = speed if clock_mode == "simulated" else 1.0
        self.state = SessionState.RUNNING
        self._stop_loop = False
        self._last_segments = []
        self._thread = threading.Thread(target=self._loop, daemon=True)
        self._thread.start()
        self._broadcast("session", self.session_dict())
        return self.session_dict()

    def stop_session(self) -> dict:
        if self.state is not SessionState.RUNNING:
            raise RuntimeError("no running session")
        self._stop_loop = True
        if self._thread is not None:
            self._thread.join(timeout=5.0)
        self.state = SessionState.STOPPED
        self._broadcast("session", self.session_dict())
        return self.session_dict()

    def inject_event(self, payload: dict) -> bool:
        if self.state is not SessionState.RUNNING or self.engine is None:
            raise RuntimeError("no running session")
        if "timestamp" not in payload or payload["timestamp"] is None:
            payload = dict(payload)
            payload["timestamp"] = self.engine.now
        event = LiveEvent.from_dict(payload)
        return self.engine.publish(event)

    def swap_persona(self, name: str | None, config_payload: dict | None) -> str:
        if config_payload is not None:
            persona = load_persona(json.dumps(config_payload))
        elif name:
            try:
                persona = bundled_persona(name)
            except KeyError as exc:
                raise PersonaValidationError(str(exc)) from exc
        else:
            raise PersonaValidationError("provide a persona name or config")
        if self.state is SessionState.RUNNING and self.engine is not None:
            self._command("swap", persona)
        else:
            self._idle_persona = persona
        self._broadcast("persona", {"name": persona.PersonaName})
        return persona.PersonaName

    def insert_urgent_speech(self, text: str) -> None:
        if self.state is not SessionState.RUNNING or self.engine is None:
            raise RuntimeError("no running session")
        if not text:
            raise ValueError("urgent speech text must be non-empty")
        self.engine.insert_urgent_speech(text)

    def report(self) -> dict:
        if self.engine is None:
            raise RuntimeError("no session")
        if self.state is SessionState.RUNNING:
            return self._command("report", None)
        return self._report_now()

    # ---------------------------------------------------------------- stream

    def subscribe(self) -> Subscriber:
        sub = Subscriber()
        with self._sub_lock:
            self._subscribers.append(sub)
        sub.push(self._state_sync())
        return sub

    def unsubscribe(self, sub: Subscriber) -> None:
        with self._sub_lock:
            if sub in self._subscribers:
                self._subscribers.remove(sub)

    def session_dict(self) -> dict:
        engine = self.engine
        song = engine.current_song if engine else None
        return {
            "session_id": self.session_id,
            "state": self.state.value,
            "persona": (engine.persona_holder.get() if engine else self._idle_persona).PersonaName,
            "current_song": song.song_name if song else None,
            "song_started_at": song.start_time if song else None,
            "song_duration": song.duration if song else None,
            "clock_mode": self.clock_mode,
            "speed": self.speed,
            "t": engine.now if engine else 0.0,
        }

    def _state_sync(self) -> dict:
        engine = self.engine
        data = {
            "session": self.session_dict(),
            "personas": bundled_persona_names(),
            "lanes": engine.lane_snapshot_dict() if engine else None,
            "segments": engine.segment_snapshot() if engine else [],
            "ticker": [e.to_dict() for e in engine.recent_events] if engine else [],
            "metrics": self._metrics_delta() if engine else None,
        }
        return {"v": SCHEMA_VERSION, "seq": next(self._seq), "type": "state_sync", "data": data}

    def _broadcast(self, msg_type: str, data: dict) -> None:
        message = {"v": SCHEMA_VERSION, "seq": next(self._seq), "type": msg_type, "data": data}
        with self._sub_lock:
            for sub in self._subscribers:
                sub.push(message)

    def _metrics_delta(self) -> dict:
        engine = self.engine
        return {
            "drops": engine.scheduler.drops,
            "emitted": engine.scheduler.emitted,
            "delivered": engine.bus.counters.delivered,
            "published": engine.bus.counters.published,
            "duplicate_rate": engine.duplicate_rate(),
            "overlap_rate": engine.metrics.overlap_rate,
            "fx_admitted": engine.fx_admitted,
            "reactions": engine.reactions.engagement_counters(),
        }

    # ---------------------------------------------------------------- loop

    def _command(self, op: str, arg):
        reply: queue.Queue = queue.Queue()
        self._commands.put((op, arg, reply))
        status, value = reply.get(timeout=10.0)
        if status == "error":
            raise value
        return value

    def _loop(self) -> None:
        wall0 = time.monotonic()
        last_push = 0.0
        engine = self.engine
        engine.start()
        while not self._stop_loop:
            self._process_commands(engine)
            target = (time.monotonic() - wall0) * self.speed
            engine.step_to(target)
            now_wall = time.monotonic()
            if now_wall - last_push >= PUSH_INTERVAL:
                last_push = now_wall
                self._broadcast("lane_snapshot", engine.lane_snapshot_dict())
                self._broadcast("metrics", self._metrics_delta())
                segments = engine.segment_snapshot()
                if segments != self._last_segments:
                    self._last_segments = segments
                    self._broadcast("segments", {"song": self.session_dict(), "plans": segments})
            time.sleep(0.005)
        self._process_commands(engine)

    def _process_commands(self, engine: BroadcastEngine) -> None:
        while True:
            try:
                op, arg, reply = self._commands.get_nowait()
            except queue.Empty:
                return
            try:
                if op == "swap":
                    engine.persona_holder.swap(arg)
                    reply.put(("ok", arg.PersonaName))
                elif op == "report":
                    reply.put(("ok", self._report_now()))
                else:
                    reply.put(("error", ValueError(f"unknown command {op}")))
            except Exception as exc:  # surfaced to the calling handler
                reply.put(("error", exc))

    def _report_now(self) -> dict:
        echo = {"session_id": self.session_id, "clock_mode": self.clock_mode, "speed": self.speed}
        return self.engine.build_report(config_echo=echo).to_dict()

    def _on_engine_event(self, event: LiveEvent, t: float, outcome: OutcomeKind | None) -> None:
        data = {"event": event.to_dict(), "admitted_at": t}
        if outcome is not None:
            data["reaction"] = outcome.value
        self._broadcast("event", data)

    def _on_engine_speech(self, entry: SpeechEntry) -> None:
        self._broadcast("speech", {"t": entry.t, "source": entry.source, "text": entry.text})

    def _idle_heartbeat(self) -> None:
        while True:
            if self.state is not SessionState.RUNNING:
                self._broadcast("heartbeat", {"state": self.state.value})
            time.sleep(0.5)


def create_app(supervisor: SessionSupervisor | None = None) -> FastAPI:
    app = FastAPI(title="lanecast gateway")
    sup = supervisor or SessionSupervisor()
    app.state.supervisor = sup

    @app.post("/session/start")
    def session_start(payload: dict | None = None):
        payload = payload or {}
        profile = None
        if payload.get("profile") is not None:
            try:
                profile = LoadProfile(**payload["profile"])
                profile.validate()
            except (TypeError, ValueError) as exc:
                raise HTTPException(status_code=400, detail=str(exc))
        try:
            playlist = [SongSpec.from_dict(s) for s in payload.get("playlist", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=f"bad playlist: {exc}")
        try:
            return sup.start_session(
                profile,
                playlist,
                clock_mode=payload.get("clock", "simulated"),
                speed=float(payload.get("speed", 1.0)),
            )
        except RuntimeError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.post("/session/stop")
    def session_stop():
        try:
            return sup.stop_session()
        except RuntimeError as exc:
            raise HTTPException(status_code=409, detail=str(exc))

    @app.get("/session")
    def session_get():
        return sup.session_dict()

    @app.post("/event")
    def inject(payload: dict):
        try:
            accepted = sup.inject_event(payload)
        except RuntimeError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"accepted": accepted}

    @app.post("/persona/swap")
    def persona_swap(payload: dict):
        try:
            name = sup.swap_persona(payload.get("name"), payload.get("config"))
        except PersonaValidationError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"ok": True, "persona": name}

    @app.post("/speech/urgent")
    def speech_urgent(payload: dict):
        try:
            sup.insert_urgent_speech(str(payload.get("text", "")))
        except RuntimeError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"ok": True}

    @app.get("/report")
    def report():
        try:
            return sup.report()
        except RuntimeError as exc:
            raise HTTPException(status_code=409, detail=str(exc))

    @app.websocket("/ws")
    async def ws_stream(ws: WebSocket):
        await ws.accept()
        sub = sup.subscribe()
        try:
            while True:
                message = await anyio.to_thread.run_sync(sub.pop, 0.25)
                if message is not None:
                    await ws.send_json(message)
        except WebSocketDisconnect:
            pass
        finally:
            sup.unsubscribe(sub)

    return app
