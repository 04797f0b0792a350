"""Benchmark and replay harness: workload replays, the soak run, kernel timings."""

from __future__ import annotations

import math
import time
from dataclasses import asdict

import numpy as np

from .engine import BroadcastEngine, EngineConfig, SongSpec
from .loadgen import LoadProfile, generate_workload, stress_profile_testcase1
from .metrics import RunReport

SOAK_PLAYLIST = [
    SongSpec("夜航", 190.0, "[00:12.00]灯一盏一盏地灭"),
    SongSpec("群星备份", 205.0, "[00:09.40]把昨天存进硬盘"),
    SongSpec("白噪温柔", 180.0, "[00:15.10]雨声盖过了消息提示音"),
]


def replay_workload(
    profile: LoadProfile,
    config: EngineConfig | None = None,
    playlist: list[SongSpec] | None = None,
    engine: BroadcastEngine | None = None,
) -> tuple[RunReport, BroadcastEngine]:
    """Feed a generated workload through a fresh engine at frame cadence."""
    engine = engine or BroadcastEngine(config or EngineConfig(), playlist=playlist)
    events = generate_workload(profile)
    wall0 = time.perf_counter()
    for event in events:
        engine.publish(event)
    engine.start()
    engine.step_to(profile.duration)
    wall = time.perf_counter() - wall0
    report = engine.build_report(config_echo={"profile": asdict(profile)}, wall_seconds=wall)
    return report, engine


def run_testcase1(launch_rule: bool = True) -> tuple[RunReport, BroadcastEngine]:
    """100 msg/s for 60 s; launch_rule=False replays the naive ablation."""
    config = EngineConfig(launch_rule=launch_rule)
    return replay_workload(stress_profile_testcase1(), config)


def run_soak(
    duration: float = 600.0,
    profile: LoadProfile | None = None,
    rss_sampler=None,
) -> tuple[RunReport, BroadcastEngine, list[int]]:
    """Default-rate simulated soak with the demo playlist cycling.

    rss_sampler, when given, is called at one-minute simulated intervals and
    its values returned (the CLI passes a process-RSS probe).
    """
    profile = profile or LoadProfile(duration=duration, seed=42)
    playlist = [
        SongSpec(s.song_name, s.duration, s.lyrics_lrc)
        for _ in range(math.ceil(duration / sum(x.duration for x in SOAK_PLAYLIST)) + 1)
        for s in SOAK_PLAYLIST
    ]
    engine = BroadcastEngine(
        EngineConfig(llm_latency_range=(0.4, 1.9)), playlist=playlist
    )
    for event in generate_workload(profile):
        engine.publish(event)
    engine.start()
    rss: list[int] = []
    wall0 = time.perf_counter()
    step = 60.0
    t = 0.0
    while t < duration:
        t = min(duration, t + step)
        engine.step_to(t)
        if rss_sampler is not None:
            rss.append(rss_sampler())
    wall = time.perf_counter() - wall0
    report = engine.build_report(
        config_echo={"profile": asdict(profile), "soak": True}, wall_seconds=wall
    )
    return report, engine, rss


def process_rss_bytes() -> int:
    import psutil

    return psutil.Process().memory_info().rss


def bench_kernels(seconds: float = 10.0, sample_rate: int = 48000) -> list[dict]:
    """Time each kernel on each available backend over a shared test signal."""
    from . import kernels
    from .audio.loudness import k_weighting_sos, true_peak_taps

    rng = np.random.default_rng(42)
    float_sig = np.clip(rng.normal(0, 0.25, int(seconds * sample_rate)), -0.999, 0.999)
    int_sig = (float_sig * 32767).astype(np.int16)
    sos = k_weighting_sos(sample_rate)
    taps = true_peak_taps()
    block = int(0.4 * sample_rate)
    hop = int(0.1 * sample_rate)

    cases = {
        "gain_i16": lambda mod: mod.gain_i16(int_sig, 2.0),
        "sosfilt": lambda mod: mod.sosfilt(sos, float_sig),
        "block_mean_square": lambda mod: mod.block_mean_square(float_sig, block, hop),
        "upsampled_peak": lambda mod: mod.upsampled_peak(float_sig, taps, 4),
    }
    rows = []
    backends = kernels.backends()
    for name, fn in cases.items():
        row: dict = {"kernel": name, "signal_seconds": seconds}
        for backend_name, mod in backends.items():
            fn(mod)  # warm up
            t0 = time.perf_counter()
            fn(mod)
            row[f"{backend_name}_ms"] = (time.perf_counter() - t0) * 1000.0
        if "cython_ms" in row and "numpy_ms" in row and row["cython_ms"] > 0:
            row["speedup_numpy_over"] = row["numpy_ms"] / row["cython_ms"]
        rows.append(row)
    return rows
