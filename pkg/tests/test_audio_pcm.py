"""PCM gain, buffer validation, ducking math, WAV round-trip."""

import numpy as np
import pytest

from lanecast.audio.pcm import (
    GainConfig,
    PcmBuffer,
    apply_gain,
    duck_gain_factor,
    read_wav,
    silence,
    sine,
    write_wav,
)


def brute_force_gain(samples, multiplier):
    out = []
    for s in samples:
        amplified = int(float(s) * multiplier)  # int() truncates toward zero
        out.append(max(-32768, min(32767, amplified)))
    return out


class TestApplyGain:
    def test_plain_double(self):
        buf = PcmBuffer(np.array([1000], dtype=np.int16))
        assert apply_gain(buf, 2.0).samples[0] == 2000

    def test_clip_high(self):
        buf = PcmBuffer(np.array([30000], dtype=np.int16))
        assert apply_gain(buf, 2.0).samples[0] == 32767

    def test_clip_low(self):
        buf = PcmBuffer(np.array([-30000], dtype=np.int16))
        assert apply_gain(buf, 2.0).samples[0] == -32768

    def test_zero_stays_zero(self):
        buf = PcmBuffer(np.array([0], dtype=np.int16))
        for m in (0.5, 1.0, 7.3):
            assert apply_gain(buf, m).samples[0] == 0

    def test_truncation_toward_zero(self):
        buf = PcmBuffer(np.array([3, -3], dtype=np.int16))
        out = apply_gain(buf, 0.5).samples
        assert list(out) == [1, -1]

    def test_non_positive_multiplier_rejected(self):
        buf = silence(0.01)
        with pytest.raises(ValueError):
            apply_gain(buf, 0.0)

    def test_matches_brute_force_oracle_on_random_buffers(self):
        rng = np.random.default_rng(1234)
        for _ in range(500):
            n = int(rng.integers(1, 64))
            samples = rng.integers(-32768, 32768, n).astype(np.int16)
            multiplier = float(rng.uniform(0.01, 4.0))
            buf = PcmBuffer(samples.copy())
            got = list(apply_gain(buf, multiplier).samples)
            assert got == brute_force_gain(samples, multiplier)


class TestPcmBuffer:
    def test_channel_length_invariant(self):
        with pytest.raises(ValueError):
            PcmBuffer(np.zeros(3, dtype=np.int16), channels=2)

    def test_float_round_trip(self):
        buf = sine(440.0, 0.1, amplitude=0.5)
        back = PcmBuffer.from_float(buf.to_float(), sample_rate=buf.sample_rate)
        assert np.array_equal(back.samples, buf.samples)

    def test_stereo_views(self):
        samples = np.array([1, 2, 3, 4], dtype=np.int16)
        buf = PcmBuffer(samples, channels=2)
        assert list(buf.channel(0)) == [1, 3]
        assert list(buf.channel(1)) == [2, 4]
        assert buf.num_frames == 2


class TestGainConfig:
    def test_defaults(self):
        cfg = GainConfig()
        assert cfg.boost_multiplier == 2.0
        assert cfg.duck_attenuation_db == 12.0

    def test_invariants(self):
        with pytest.raises(ValueError):
            GainConfig(boost_multiplier=0.0)
        with pytest.raises(ValueError):
            GainConfig(duck_attenuation_db=-1.0)


class TestDuckFactor:
    def test_12db(self):
        assert duck_gain_factor(12.0) == pytest.approx(0.25119, abs=1e-5)

    def test_0db(self):
        assert duck_gain_factor(0.0) == 1.0

    def test_half(self):
        assert duck_gain_factor(6.0206) == pytest.approx(0.5, abs=1e-4)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            duck_gain_factor(-1.0)


class TestWav:
    def test_round_trip(self, tmp_path):
        buf = sine(997.0, 0.25, amplitude=0.8, channels=2)
        path = str(tmp_path / "tone.wav")
        write_wav(path, buf)
        back = read_wav(path)
        assert back.channels == 2
        assert back.sample_rate == buf.sample_rate
        assert np.array_equal(back.samples, buf.samples)
