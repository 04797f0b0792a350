"""Audio pipeline: PCM numerics, ducking, buffer lifecycle, loudness metering."""

from .pcm import GainConfig, PcmBuffer, apply_gain, duck_gain_factor, read_wav, write_wav
from .ducking import DuckingControl
from .lifecycle import AudioLifecycle, BufferHandle, BufferState, GarbageBin
from .loudness import (
    LoudnessReport,
    integrated_loudness,
    k_weighting_sos,
    limit_true_peak,
    true_peak,
)

__all__ = [
    "GainConfig",
    "PcmBuffer",
    "apply_gain",
    "duck_gain_factor",
    "read_wav",
    "write_wav",
    "DuckingControl",
    "AudioLifecycle",
    "BufferHandle",
    "BufferState",
    "GarbageBin",
    "LoudnessReport",
    "integrated_loudness",
    "k_weighting_sos",
    "limit_true_peak",
    "true_peak",
]
