"""Kernel backend selection: compiled extension when present, NumPy otherwise.

Set LANECAST_PURE_PYTHON=1 to force the NumPy backend (used by the kernel
benchmark to time both paths in one process).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("LANECAST_PURE_PYTHON") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND
gain_i16 = _impl.gain_i16
sosfilt = _impl.sosfilt
block_mean_square = _impl.block_mean_square
upsampled_peak = _impl.upsampled_peak


def backends() -> dict[str, object]:
    """All importable backends by name, for parity tests and benchmarks."""
    available: dict[str, object] = {"numpy": _kernels_py}
    try:
        from . import _kernels

        available["cython"] = _kernels
    except ImportError:
        pass
    return available
