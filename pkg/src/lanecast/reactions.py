"""Danmaku quick reactions: keyword routing, cooldown, urgent utterances.

Rules are an ordered list; the first rule with any matching keyword wins.
Matching is plain substring containment, case-insensitive for ASCII. A
cooldown (global by default, per-category optionally) caps the response
rate so comment bursts trigger at most one reaction per window.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources

from .events import EventKind, LiveEvent
from .segments import LlmClient, LlmError


class Category(str, Enum):
    TECHNICAL = "technical"
    EMOTIONAL = "emotional"
    COCREATION = "cocreation"


class ReactionMode(str, Enum):
    STATIC_SPEECH = "static_speech"
    LLM_EMPATHY = "llm_empathy"


class CooldownScope(str, Enum):
    GLOBAL = "global"
    PER_CATEGORY = "per_category"


@dataclass(frozen=True)
class ReactionRule:
    category: Category
    keywords: tuple[str, ...]
    mode: ReactionMode
    template: str

    def matches(self, content: str) -> bool:
        lowered = content.lower()
        return any(kw.lower() in lowered for kw in self.keywords)


def load_rules(text: str) -> list[ReactionRule]:
    rules = []
    for item in json.loads(text):
        rules.append(
            ReactionRule(
                category=Category(item["category"]),
                keywords=tuple(item["keywords"]),
                mode=ReactionMode(item["mode"]),
                template=item["template"],
            )
        )
    return rules


def default_rules() -> list[ReactionRule]:
    text = resources.files("lanecast").joinpath("data/reaction_rules.json").read_text("utf-8")
    return load_rules(text)


def classify(content: str, rules: list[ReactionRule]) -> Category | None:
    for rule in rules:
        if rule.matches(content):
            return rule.category
    return None


@dataclass(frozen=True)
class CooldownConfig:
    scope: CooldownScope = CooldownScope.GLOBAL
    window: float = 30.0

    def __post_init__(self) -> None:
        if self.window <= 0:
            raise ValueError("cooldown window must be > 0")


class OutcomeKind(str, Enum):
    FIRED = "Fired"
    COOLING_DOWN = "CoolingDown"
    NO_MATCH = "NoMatch"


@dataclass(frozen=True)
class ReactionOutcome:
    kind: OutcomeKind
    category: Category | None = None
    utterance: str = ""


@dataclass
class ReactionCounters:
    fired_by_category: dict[str, int] = field(default_factory=dict)
    suppressed: int = 0
    no_match: int = 0


class QuickReactionEngine:
    def __init__(
        self,
        rules: list[ReactionRule] | None = None,
        cooldown: CooldownConfig | None = None,
        llm: LlmClient | None = None,
    ) -> None:
        self.rules = rules if rules is not None else default_rules()
        self.cooldown = cooldown or CooldownConfig()
        self.llm = llm
        self._last_fire: dict[str, float] = {}
        self.counters = ReactionCounters()

    def maybe_react(self, event: LiveEvent, now: float) -> ReactionOutcome:
        """Classify a danmaku and fire at most one reaction per cooldown window."""
        if event.kind is not EventKind.DANMAKU:
            raise ValueError("quick reactions handle danmaku events only")
        rule = self._first_match(event.content)
        if rule is None:
            self.counters.no_match += 1
            return ReactionOutcome(OutcomeKind.NO_MATCH)
        key = rule.category.value if self.cooldown.scope is CooldownScope.PER_CATEGORY else ""
        last = self._last_fire.get(key)
        if last is not None and now - last < self.cooldown.window:
            self.counters.suppressed += 1
            return ReactionOutcome(OutcomeKind.COOLING_DOWN, rule.category)
        self._last_fire[key] = now
        utterance = self._render(rule, event)
        by_cat = self.counters.fired_by_category
        by_cat[rule.category.value] = by_cat.get(rule.category.value, 0) + 1
        return ReactionOutcome(OutcomeKind.FIRED, rule.category, utterance)

    def engagement_counters(self) -> dict:
        return {
            "fired_by_category": dict(self.counters.fired_by_category),
            "suppressed": self.counters.suppressed,
            "no_match": self.counters.no_match,
        }

    def _first_match(self, content: str) -> ReactionRule | None:
        for rule in self.rules:
            if rule.matches(content):
                return rule
        return None

    def _render(self, rule: ReactionRule, event: LiveEvent) -> str:
        text = rule.template.replace("{user}", event.user).replace("{content}", event.content)
        if rule.mode is ReactionMode.LLM_EMPATHY and self.llm is not None:
            try:
                return self.llm.complete("", text, 80).text
            except LlmError:
                # fall back to the rendered prompt as spoken text
                return text
        return text
