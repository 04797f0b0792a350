"""NumPy implementations of the hot audio kernels.

Selected when the compiled extension is unavailable (or forced via
LANECAST_PURE_PYTHON=1). Signatures and numerics mirror lanecast._kernels;
gain_i16 is bit-identical, the float kernels agree to ~1e-12.
"""

from __future__ import annotations

import numpy as np
from scipy import signal

BACKEND = "numpy"


def gain_i16(samples: np.ndarray, multiplier: float) -> np.ndarray:
    """Per-sample gain with truncation toward zero and hard clip to int16."""
    amplified = np.trunc(samples.astype(np.float64) * multiplier)
    return np.clip(amplified, -32768, 32767).astype(np.int16)


def sosfilt(sos: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Cascade of biquad sections (direct form II transposed)."""
    return signal.sosfilt(sos, x)


def block_mean_square(x: np.ndarray, block: int, hop: int) -> np.ndarray:
    """Mean square of each length-`block` window at stride `hop`."""
    n = x.shape[0]
    if n < block:
        return np.empty(0, dtype=np.float64)
    count = 1 + (n - block) // hop
    csum = np.concatenate(([0.0], np.cumsum(np.square(x, dtype=np.float64))))
    starts = np.arange(count) * hop
    return (csum[starts + block] - csum[starts]) / block


def upsampled_peak(x: np.ndarray, taps: np.ndarray, up: int) -> float:
    """Max |value| of the polyphase-FIR upsampled signal."""
    if x.size == 0:
        return 0.0
    y = signal.upfirdn(taps, x, up=up)
    return float(np.max(np.abs(y)))
