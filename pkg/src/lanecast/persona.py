"""Host persona configuration: JSON schema, template rendering, hot-swap.

Field names match the persona file format exactly (one portable JSON file
per host identity); attribute names mirror the wire keys on purpose.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import asdict, dataclass
from datetime import datetime
from importlib import resources
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .segments import SongContext

TEMPLATE_FIELDS = (
    "PromptT1_FirstPlay",
    "PromptT1_Transition",
    "PromptT2_Empathy",
    "PromptT3_Story",
    "PromptT4_Outro",
)

TIME_FORMAT = "%Y-%m-%d %H:%M"


class PersonaValidationError(ValueError):
    pass


@dataclass(frozen=True)
class PersonaConfig:
    PersonaName: str
    Description: str
    SystemPrompt: str
    VoiceType: str
    SpeedRatio: float
    PitchRatio: float
    PromptT1_FirstPlay: str
    PromptT1_Transition: str
    PromptT2_Empathy: str
    PromptT3_Story: str
    PromptT4_Outro: str

    def validate(self) -> None:
        if not self.PersonaName:
            raise PersonaValidationError("PersonaName must be non-empty")
        if self.SpeedRatio <= 0:
            raise PersonaValidationError(f"SpeedRatio must be > 0, got {self.SpeedRatio}")
        if self.PitchRatio <= 0:
            raise PersonaValidationError(f"PitchRatio must be > 0, got {self.PitchRatio}")
        for name in TEMPLATE_FIELDS:
            if not getattr(self, name):
                raise PersonaValidationError(f"template {name} must be present and non-empty")

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False, indent=2)


def load_persona(text: str) -> PersonaConfig:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PersonaValidationError(f"invalid persona JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise PersonaValidationError("persona JSON must be an object")
    missing = [f.name for f in PersonaConfig.__dataclass_fields__.values() if f.name not in payload]
    if missing:
        raise PersonaValidationError(f"missing persona fields: {', '.join(missing)}")
    try:
        config = PersonaConfig(
            **{k: payload[k] for k in PersonaConfig.__dataclass_fields__},
        )
    except TypeError as exc:
        raise PersonaValidationError(str(exc)) from exc
    config.validate()
    return config


def load_persona_file(path: str) -> PersonaConfig:
    with open(path, encoding="utf-8") as fh:
        return load_persona(fh.read())


def save_persona_file(path: str, config: PersonaConfig) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(config.to_json())


def bundled_persona(name: str) -> PersonaConfig:
    """Load one of the packaged persona fixtures ("shiguang", "suwanli")."""
    ref = resources.files("lanecast").joinpath(f"data/personas/{name}.json")
    try:
        return load_persona(ref.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise KeyError(f"no bundled persona named {name!r}") from None


def bundled_persona_names() -> list[str]:
    root = resources.files("lanecast").joinpath("data/personas")
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def render_template(
    template: str,
    ctx: "SongContext",
    persona: PersonaConfig,
    now: datetime | None = None,
) -> str:
    """Substitute {Time}/{SongName}/{Lrc}/{AnchorName}; unknown tokens pass through."""
    stamp = (now or datetime.now()).strftime(TIME_FORMAT)
    return (
        template.replace("{Time}", stamp)
        .replace("{SongName}", ctx.song_name)
        .replace("{Lrc}", ctx.lyrics_lrc)
        .replace("{AnchorName}", persona.PersonaName)
    )


class PersonaHolder:
    """Atomically swappable active persona.

    Readers always observe a complete config. Swaps take effect for voice
    parameters at the next synthesis call and for prompt templates at the
    next song's planning pass; plans already made keep the persona they
    were bound to.
    """

    def __init__(self, initial: PersonaConfig) -> None:
        initial.validate()
        self._lock = threading.Lock()
        self._active = initial
        self.last_swap_seconds = 0.0

    def get(self) -> PersonaConfig:
        return self._active

    def swap(self, config: PersonaConfig) -> float:
        """Validate then replace; returns the swap latency in seconds."""
        t0 = time.perf_counter()
        config.validate()
        with self._lock:
            self._active = config
        self.last_swap_seconds = time.perf_counter() - t0
        return self.last_swap_seconds

    def swap_from_json(self, text: str) -> float:
        return self.swap(load_persona(text))

    def swap_from_file(self, path: str) -> float:
        config = load_persona_file(path)
        return self.swap(config)
