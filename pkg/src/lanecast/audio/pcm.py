"""16-bit PCM buffers, digital gain with hard clip, and WAV container I/O."""

from __future__ import annotations

import wave
from dataclasses import dataclass

import numpy as np

from .. import kernels

FULL_SCALE = 32768.0
INT16_MIN = -32768
INT16_MAX = 32767


@dataclass(frozen=True)
class GainConfig:
    """Speech-mix levels: permanent digital boost and BGM duck depth."""

    boost_multiplier: float = 2.0
    duck_attenuation_db: float = 12.0

    def __post_init__(self) -> None:
        if self.boost_multiplier <= 0:
            raise ValueError("boost_multiplier must be > 0")
        if self.duck_attenuation_db < 0:
            raise ValueError("duck_attenuation_db must be >= 0")


@dataclass(frozen=True)
class PcmBuffer:
    """Interleaved signed 16-bit samples; little-endian when serialized."""

    samples: np.ndarray
    channels: int = 1
    sample_rate: int = 48000

    def __post_init__(self) -> None:
        if self.samples.dtype != np.int16 or self.samples.ndim != 1:
            raise ValueError("samples must be a 1-D int16 array")
        if self.channels not in (1, 2):
            raise ValueError("channels must be 1 or 2")
        if len(self.samples) % self.channels != 0:
            raise ValueError("sample count must divide evenly into channels")

    @property
    def num_frames(self) -> int:
        return len(self.samples) // self.channels

    @property
    def duration(self) -> float:
        return self.num_frames / self.sample_rate

    def channel(self, index: int) -> np.ndarray:
        if not 0 <= index < self.channels:
            raise IndexError(f"channel {index} of {self.channels}")
        return self.samples[index :: self.channels]

    def to_float(self) -> np.ndarray:
        """(frames, channels) float64 in [-1, 1), full scale 32768."""
        deinterleaved = self.samples.astype(np.float64).reshape(-1, self.channels)
        return deinterleaved / FULL_SCALE

    @classmethod
    def from_float(cls, data: np.ndarray, sample_rate: int = 48000) -> "PcmBuffer":
        """Quantize (frames,) or (frames, channels) float in [-1, 1) to int16."""
        if data.ndim == 1:
            data = data[:, np.newaxis]
        scaled = np.rint(data * FULL_SCALE)
        clipped = np.clip(scaled, INT16_MIN, INT16_MAX).astype(np.int16)
        return cls(samples=clipped.reshape(-1), channels=data.shape[1], sample_rate=sample_rate)


def sine(
    freq: float,
    duration: float,
    amplitude: float = 1.0,
    sample_rate: int = 48000,
    channels: int = 1,
) -> PcmBuffer:
    """Test tone; amplitude 1.0 peaks at 32767 (one LSB under full scale)."""
    t = np.arange(int(round(duration * sample_rate))) / sample_rate
    wave_ = np.sin(2 * np.pi * freq * t) * amplitude * (INT16_MAX / FULL_SCALE)
    if channels == 2:
        wave_ = np.column_stack([wave_, wave_])
    return PcmBuffer.from_float(wave_, sample_rate=sample_rate)


def silence(duration: float, sample_rate: int = 48000, channels: int = 1) -> PcmBuffer:
    n = int(round(duration * sample_rate)) * channels
    return PcmBuffer(np.zeros(n, dtype=np.int16), channels=channels, sample_rate=sample_rate)


def apply_gain(buf: PcmBuffer, multiplier: float) -> PcmBuffer:
    """clamp(trunc(s * multiplier)) per sample; returns a new buffer."""
    if multiplier <= 0:
        raise ValueError("multiplier must be > 0")
    out = kernels.gain_i16(buf.samples, float(multiplier))
    return PcmBuffer(out, channels=buf.channels, sample_rate=buf.sample_rate)


def scale(buf: PcmBuffer, factor: float) -> PcmBuffer:
    """Round-to-nearest scaling used by the limiter and ducking renders."""
    scaled = np.rint(buf.samples.astype(np.float64) * factor)
    out = np.clip(scaled, INT16_MIN, INT16_MAX).astype(np.int16)
    return PcmBuffer(out, channels=buf.channels, sample_rate=buf.sample_rate)


def duck_gain_factor(attenuation_db: float) -> float:
    """Linear gain for an attenuation depth in dB (12 dB -> 0.25119)."""
    if attenuation_db < 0:
        raise ValueError("attenuation must be >= 0 dB")
    return 10.0 ** (-attenuation_db / 20.0)


def read_wav(path: str) -> PcmBuffer:
    with wave.open(path, "rb") as wav:
        if wav.getsampwidth() != 2:
            raise ValueError("only 16-bit PCM WAV is supported")
        channels = wav.getnchannels()
        if channels not in (1, 2):
            raise ValueError("only mono or stereo WAV is supported")
        rate = wav.getframerate()
        raw = wav.readframes(wav.getnframes())
    samples = np.frombuffer(raw, dtype="<i2").astype(np.int16)
    return PcmBuffer(samples, channels=channels, sample_rate=rate)


def write_wav(path: str, buf: PcmBuffer) -> None:
    with wave.open(path, "wb") as wav:
        wav.setnchannels(buf.channels)
        wav.setsampwidth(2)
        wav.setframerate(buf.sample_rate)
        wav.writeframes(buf.samples.astype("<i2").tobytes())
