"""Synthetic interaction workload: Poisson danmaku plus periodic gift storms.

Each whole second draws a Poisson count of danmaku with uniform sub-second
offsets; at storm boundaries a burst of gifts is emitted at constant spacing.
Identical seeds reproduce identical event lists (Mersenne Twister via
random.Random, so determinism holds within this implementation).
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass

from .events import EventKind, LiveEvent

GIFT_NAMES = ("玫瑰", "小心心", "棒棒糖")
STORM_SPAN_SECONDS = 60.0


@dataclass(frozen=True)
class LoadProfile:
    duration: float = 3600.0
    dmk_rate: float = 12.0
    gift_peak: int = 50
    storm_period: float = 600.0
    storm_probability: float = 0.15
    seed: int = 42

    def validate(self) -> None:
        if self.duration < 0:
            raise ValueError("duration must be >= 0")
        if self.dmk_rate < 0:
            raise ValueError("dmk_rate must be >= 0")
        if self.gift_peak < 0:
            raise ValueError("gift_peak must be >= 0")
        if not 0.0 <= self.storm_probability <= 1.0:
            raise ValueError("storm_probability must be in [0, 1]")
        if self.storm_period <= 0:
            raise ValueError("storm_period must be > 0")


def poisson_sample(lam: float, rng: random.Random) -> int:
    """Knuth's product method; large rates split by Poisson additivity."""
    if lam < 0:
        raise ValueError("rate must be >= 0")
    if lam == 0:
        return 0
    if lam > 500:
        # exp(-lam) underflows past ~745; halves are independent Poissons
        half = lam / 2.0
        return poisson_sample(half, rng) + poisson_sample(lam - half, rng)
    threshold = math.exp(-lam)
    count = 0
    product = rng.random()
    while product > threshold:
        count += 1
        product *= rng.random()
    return count


def generate_workload(profile: LoadProfile) -> list[LiveEvent]:
    """Timestamp-sorted event list for the profile; deterministic per seed."""
    profile.validate()
    rng = random.Random(profile.seed)
    events: list[LiveEvent] = []
    seq = 0
    t = 0.0
    while t < profile.duration:
        n = poisson_sample(profile.dmk_rate, rng)
        for _ in range(n):
            events.append(
                LiveEvent(
                    kind=EventKind.DANMAKU,
                    timestamp=t + rng.random(),
                    user=f"u{seq % 50:02d}",
                    content=f"dmk-{seq:06d}",
                )
            )
            seq += 1
        if math.floor(t) % profile.storm_period == 0 and rng.random() < profile.storm_probability:
            spacing = STORM_SPAN_SECONDS / profile.gift_peak if profile.gift_peak else 0.0
            for i in range(profile.gift_peak):
                events.append(
                    LiveEvent(
                        kind=EventKind.GIFT,
                        timestamp=t + i * spacing,
                        user=f"g{i % 20:02d}",
                        content=GIFT_NAMES[i % len(GIFT_NAMES)],
                    )
                )
        t += 1.0
    events.sort(key=lambda e: e.timestamp)
    return events


def stress_profile_testcase1() -> LoadProfile:
    """100 danmaku/s for 60 s, storms disabled, seed 42."""
    return LoadProfile(duration=60.0, dmk_rate=100.0, storm_probability=0.0, seed=42)


def workload_to_json(profile: LoadProfile, events: list[LiveEvent]) -> str:
    doc = {
        "profile": asdict(profile),
        "count": len(events),
        "events": [e.to_dict() for e in events],
    }
    return json.dumps(doc, ensure_ascii=False, indent=None)


def workload_from_json(text: str) -> list[LiveEvent]:
    doc = json.loads(text)
    raw = doc["events"] if isinstance(doc, dict) else doc
    return [LiveEvent.from_dict(item) for item in raw]
