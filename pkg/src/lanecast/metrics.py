"""Measurement harness: percentiles, overlap-rate sampling, jitter, reports.

Latency figures are engine-side (bus receipt to queue admission on the
simulated clock) and are not comparable to wall-clock numbers measured
through a real render pipeline.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass


def percentile(samples: list[float], p: float) -> float:
    """Nearest-rank percentile: the value at index ceil(p/100 * n) when sorted."""
    if not samples:
        raise ValueError("percentile of empty sample list")
    if not 0 < p <= 100:
        raise ValueError(f"percentile p must be in (0, 100], got {p}")
    ordered = sorted(samples)
    rank = math.ceil(p / 100.0 * len(ordered))
    return ordered[rank - 1]


@dataclass(frozen=True)
class JitterSummary:
    median_ms: float
    q1_ms: float
    q3_ms: float
    max_ms: float
    count: int

    def to_dict(self) -> dict:
        return {
            "median_ms": self.median_ms,
            "q1_ms": self.q1_ms,
            "q3_ms": self.q3_ms,
            "max_ms": self.max_ms,
            "count": self.count,
        }


def jitter_summary(intended: list[float], actual: list[float]) -> JitterSummary:
    """Distribution of |actual - intended| trigger offsets, in milliseconds."""
    if len(intended) != len(actual):
        raise ValueError("intended and actual trigger lists must align")
    if not intended:
        return JitterSummary(0.0, 0.0, 0.0, 0.0, 0)
    deltas = [abs(a - i) * 1000.0 for i, a in zip(intended, actual)]
    return JitterSummary(
        median_ms=percentile(deltas, 50),
        q1_ms=percentile(deltas, 25),
        q3_ms=percentile(deltas, 75),
        max_ms=max(deltas),
        count=len(deltas),
    )


class MetricsCollector:
    """Append-only sinks filled during a run; summarized once at the end."""

    def __init__(self) -> None:
        self.latency_ms: dict[str, list[float]] = {}
        self.frames_sampled = 0
        self.frames_with_overlap = 0
        self.overlap_pairs_total = 0
        self.intended_triggers: list[float] = []
        self.actual_triggers: list[float] = []
        self.segment_states: dict[str, int] = {}
        self.try_emit_ns: list[int] = []

    def record_latency(self, kind: str, receipt: float, admitted: float) -> None:
        delta_ms = (admitted - receipt) * 1000.0
        if delta_ms < 0:
            raise ValueError("admission precedes receipt")
        self.latency_ms.setdefault(kind, []).append(delta_ms)

    def record_frame(self, overlap_pairs: int) -> None:
        self.frames_sampled += 1
        if overlap_pairs > 0:
            self.frames_with_overlap += 1
            self.overlap_pairs_total += overlap_pairs

    def record_trigger(self, intended: float, actual: float) -> None:
        self.intended_triggers.append(intended)
        self.actual_triggers.append(actual)

    def record_segment_state(self, state: str) -> None:
        self.segment_states[state] = self.segment_states.get(state, 0) + 1

    @property
    def overlap_rate(self) -> float:
        if self.frames_sampled == 0:
            return 0.0
        return self.frames_with_overlap / self.frames_sampled


@dataclass
class RunReport:
    overlap_rate: float
    duplicate_rate: float
    drop_count: int
    delivered: int
    published: int
    latency_percentiles: dict[str, dict[str, float]]
    jitter: JitterSummary
    segment_states: dict[str, int]
    config_echo: dict
    frames_sampled: int = 0
    wall_seconds: float = 0.0
    loudness: dict | None = None

    def validate(self) -> None:
        for rate in (self.overlap_rate, self.duplicate_rate):
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"rate out of range: {rate}")
        for kind, pcts in self.latency_percentiles.items():
            if not pcts["p50"] <= pcts["p95"] <= pcts["p99"]:
                raise ValueError(f"non-monotone percentiles for {kind}: {pcts}")

    def to_dict(self) -> dict:
        return {
            "overlap_rate": self.overlap_rate,
            "duplicate_rate": self.duplicate_rate,
            "drop_count": self.drop_count,
            "delivered": self.delivered,
            "published": self.published,
            "latency_percentiles": self.latency_percentiles,
            "jitter": self.jitter.to_dict(),
            "segment_states": self.segment_states,
            "frames_sampled": self.frames_sampled,
            "wall_seconds": self.wall_seconds,
            "loudness": self.loudness,
            "config_echo": self.config_echo,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "RunReport":
        jitter = JitterSummary(**payload["jitter"])
        fields = {k: payload[k] for k in payload if k != "jitter"}
        return cls(jitter=jitter, **fields)


def build_report(
    collector: MetricsCollector,
    duplicate_rate: float,
    drop_count: int,
    delivered: int,
    published: int,
    config_echo: dict,
    wall_seconds: float = 0.0,
    loudness: dict | None = None,
) -> RunReport:
    percentiles = {}
    for kind, samples in collector.latency_ms.items():
        if samples:
            percentiles[kind] = {
                "p50": percentile(samples, 50),
                "p95": percentile(samples, 95),
                "p99": percentile(samples, 99),
            }
    report = RunReport(
        overlap_rate=collector.overlap_rate,
        duplicate_rate=duplicate_rate,
        drop_count=drop_count,
        delivered=delivered,
        published=published,
        latency_percentiles=percentiles,
        jitter=jitter_summary(collector.intended_triggers, collector.actual_triggers),
        segment_states=dict(collector.segment_states),
        config_echo=config_echo,
        frames_sampled=collector.frames_sampled,
        wall_seconds=wall_seconds,
        loudness=loudness,
    )
    report.validate()
    return report


def emit_report(report: RunReport, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, ensure_ascii=False, indent=2)
        fh.write("\n")


def load_report(path: str) -> RunReport:
    with open(path, encoding="utf-8") as fh:
        return RunReport.from_dict(json.load(fh))
