"""Loudness meter calibration against published filter tables and analytic oracles.

The reference path never touches the meter's own filter design: expected
sine loudness is computed from the independently published K-weighting
coefficient tables via scipy's frequency response.
"""

import math

import numpy as np
import pytest
from scipy import signal

from lanecast.audio.loudness import (
    BS1770_SUM_WEIGHTS,
    integrated_loudness,
    k_weighting_sos,
    limit_true_peak,
    true_peak,
)
from lanecast.audio.pcm import PcmBuffer, apply_gain, scale, silence, sine

# Published K-weighting biquad tables (shelf stage then high-pass stage).
PUBLISHED_SOS = {
    48000: [
        [1.53512485958697, -2.69169618940638, 1.19839281085285,
         1.0, -1.69065929318241, 0.73248077421585],
        [1.0, -2.0, 1.0, 1.0, -1.99004745483398, 0.99007225036621],
    ],
    44100: [
        [1.5308412300498355, -2.6509799951536985, 1.1690790799210682,
         1.0, -1.6636551132560204, 0.7125954280732254],
        [1.0, -2.0, 1.0, 1.0, -1.9891696736297957, 0.9891990357870394],
    ],
}


def published_gain(freq: float, rate: int) -> float:
    """|H(freq)| straight from the frozen published tables."""
    gain = 1.0
    for section in PUBLISHED_SOS[rate]:
        _, h = signal.freqz(section[:3], section[3:], worN=[freq], fs=rate)
        gain *= abs(h[0])
    return float(gain)


def analytic_sine_loudness(freq: float, amplitude: float, rate: int) -> float:
    """Expected integrated loudness of a steady sine, single/mean channel."""
    mean_square = 0.5 * amplitude**2 * published_gain(freq, rate) ** 2
    return -0.691 + 10 * math.log10(mean_square)


class TestFilterDesign:
    @pytest.mark.parametrize("rate", [48000, 44100])
    def test_parametric_design_reproduces_published_tables(self, rate):
        designed = k_weighting_sos(rate)
        assert np.allclose(designed, np.array(PUBLISHED_SOS[rate]), atol=1e-9)


class TestCalibration:
    def test_full_scale_997hz_stereo_sine(self):
        buf = sine(997.0, 10.0, amplitude=1.0, channels=2)
        report = integrated_loudness(buf)
        assert report.below_gate is False
        assert report.integrated_lufs == pytest.approx(-3.01, abs=0.1)

    def test_mono_reads_same_as_dual_mono(self):
        mono = sine(997.0, 5.0, amplitude=0.7, channels=1)
        stereo = sine(997.0, 5.0, amplitude=0.7, channels=2)
        a = integrated_loudness(mono).integrated_lufs
        b = integrated_loudness(stereo).integrated_lufs
        assert a == pytest.approx(b, abs=1e-6)

    def test_channel_sum_mode_reads_3lu_higher_on_dual_mono(self):
        stereo = sine(997.0, 5.0, amplitude=0.7, channels=2)
        mean_mode = integrated_loudness(stereo).integrated_lufs
        sum_mode = integrated_loudness(stereo, channel_weights=BS1770_SUM_WEIGHTS).integrated_lufs
        assert sum_mode - mean_mode == pytest.approx(10 * math.log10(2), abs=1e-6)

    @pytest.mark.parametrize("freq", [100.0, 500.0, 997.0, 2000.0, 8000.0])
    @pytest.mark.parametrize("rate", [48000, 44100])
    def test_sine_matches_analytic_oracle_across_band(self, freq, rate):
        buf = sine(freq, 6.0, amplitude=0.6, sample_rate=rate)
        report = integrated_loudness(buf)
        assert report.integrated_lufs == pytest.approx(
            analytic_sine_loudness(freq, 0.6 * 32767 / 32768, rate), abs=0.05
        )

    def test_half_amplitude_shifts_by_6db(self):
        rng = np.random.default_rng(5)
        noise = rng.normal(0, 0.15, 48000 * 5).clip(-0.5, 0.5)
        loud = PcmBuffer.from_float(noise)
        quiet = scale(loud, 0.5)
        delta = integrated_loudness(loud).integrated_lufs - integrated_loudness(quiet).integrated_lufs
        assert delta == pytest.approx(6.0206, abs=0.05)

    def test_gain_shifts_loudness_by_20log10(self):
        base = sine(440.0, 4.0, amplitude=0.1)
        for multiplier in (1.5, 2.0, 3.0):
            boosted = apply_gain(base, multiplier)
            delta = (
                integrated_loudness(boosted).integrated_lufs
                - integrated_loudness(base).integrated_lufs
            )
            assert delta == pytest.approx(20 * math.log10(multiplier), abs=0.05)

    def test_loudness_monotone_in_gain_even_through_clipping(self):
        base = sine(440.0, 3.0, amplitude=0.5)
        readings = [
            integrated_loudness(apply_gain(base, m)).integrated_lufs
            for m in (1.0, 1.5, 2.0, 4.0, 8.0)  # clipping starts past 2.0
        ]
        assert readings == sorted(readings)


class TestGating:
    def test_silence_is_below_gate(self):
        report = integrated_loudness(silence(2.0))
        assert report.below_gate is True
        assert report.integrated_lufs == float("-inf")
        assert report.gated_block_count == 0

    def test_too_short_input_below_gate(self):
        report = integrated_loudness(sine(440.0, 0.2))
        assert report.below_gate is True

    def test_relative_gate_excludes_quiet_tail(self):
        loud = sine(440.0, 4.0, amplitude=0.5).samples
        faint = (sine(440.0, 4.0, amplitude=0.5).samples * 0.001).astype(np.int16)
        buf = PcmBuffer(np.concatenate([loud, faint]))
        report = integrated_loudness(buf)
        loud_only = integrated_loudness(PcmBuffer(loud))
        # quiet half gated away: reading close to the loud half alone
        assert report.integrated_lufs == pytest.approx(loud_only.integrated_lufs, abs=0.3)
        assert report.gated_block_count < 76  # 8 s of blocks would be ~77


class TestTruePeak:
    def test_silence_sentinel(self):
        assert true_peak(silence(1.0)) == float("-inf")

    def test_half_scale_sine(self):
        assert true_peak(sine(997.0, 3.0, amplitude=0.5)) == pytest.approx(-6.02, abs=0.2)

    def test_intersample_overs_on_step(self):
        data = np.zeros(48000, dtype=np.int16)
        data[10000:10100] = 32767
        data[10100:10200] = -32768
        tp = true_peak(PcmBuffer(data))
        assert tp > -0.1  # inter-sample interpolation may exceed sample peak

    def test_stereo_uses_max_channel(self):
        left = sine(440.0, 1.0, amplitude=0.9).samples
        right = (left * 0.1).astype(np.int16)
        buf = PcmBuffer(np.column_stack([left, right]).reshape(-1), channels=2)
        assert true_peak(buf) == pytest.approx(20 * math.log10(0.9), abs=0.2)


class TestTruePeakCeiling:
    @pytest.mark.parametrize("make_signal", [
        lambda: sine(997.0, 2.0, amplitude=1.0),
        lambda: sine(6123.0, 2.0, amplitude=0.98, channels=2),
        lambda: PcmBuffer.from_float(
            np.random.default_rng(0).uniform(-0.999, 0.999, 96000)
        ),
    ])
    def test_limited_output_never_exceeds_ceiling(self, make_signal):
        limited = limit_true_peak(make_signal(), ceiling_dbtp=-1.0)
        assert true_peak(limited) <= -0.9

    def test_quiet_signal_untouched(self):
        buf = sine(440.0, 1.0, amplitude=0.25)
        assert limit_true_peak(buf) is buf
