# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled audio kernels: per-sample gain, biquad cascade, block energy, oversampled peak."""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, trunc

cnp.import_array()

BACKEND = "cython"


def gain_i16(cnp.ndarray[cnp.int16_t, ndim=1] samples, double multiplier):
    """Per-sample gain with truncation toward zero and hard clip to int16."""
    cdef Py_ssize_t n = samples.shape[0]
    cdef cnp.ndarray[cnp.int16_t, ndim=1] out = np.empty(n, dtype=np.int16)
    cdef Py_ssize_t i
    cdef double amplified
    for i in range(n):
        amplified = trunc(samples[i] * multiplier)
        if amplified > 32767.0:
            amplified = 32767.0
        elif amplified < -32768.0:
            amplified = -32768.0
        out[i] = <short>amplified
    return out


def sosfilt(cnp.ndarray[cnp.float64_t, ndim=2] sos, cnp.ndarray[cnp.float64_t, ndim=1] x):
    """Cascade of biquad sections (direct form II transposed)."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t sections = sos.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y = x.copy()
    cdef Py_ssize_t s, i
    cdef double b0, b1, b2, a1, a2, z1, z2, xi, yi
    for s in range(sections):
        b0 = sos[s, 0]; b1 = sos[s, 1]; b2 = sos[s, 2]
        a1 = sos[s, 4]; a2 = sos[s, 5]
        z1 = 0.0; z2 = 0.0
        for i in range(n):
            xi = y[i]
            yi = b0 * xi + z1
            z1 = b1 * xi - a1 * yi + z2
            z2 = b2 * xi - a2 * yi
            y[i] = yi
    return y


def block_mean_square(cnp.ndarray[cnp.float64_t, ndim=1] x, Py_ssize_t block, Py_ssize_t hop):
    """Mean square of each length-`block` window at stride `hop`."""
    cdef Py_ssize_t n = x.shape[0]
    if n < block:
        return np.empty(0, dtype=np.float64)
    cdef Py_ssize_t count = 1 + (n - block) // hop
    cdef cnp.ndarray[cnp.float64_t, ndim=1] csum = np.empty(n + 1, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(count, dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef double acc = 0.0
    csum[0] = 0.0
    for i in range(n):
        acc += x[i] * x[i]
        csum[i + 1] = acc
    for j in range(count):
        out[j] = (csum[j * hop + block] - csum[j * hop]) / block
    return out


def upsampled_peak(cnp.ndarray[cnp.float64_t, ndim=1] x, cnp.ndarray[cnp.float64_t, ndim=1] taps, int up):
    """Max |value| of the polyphase-FIR upsampled signal."""
    cdef Py_ssize_t n = x.shape[0]
    if n == 0:
        return 0.0
    # pad taps to a whole number of phases: y[m*up+p] = sum_j h[j*up+p] x[m-j]
    cdef Py_ssize_t tpp = (taps.shape[0] + up - 1) // up
    cdef cnp.ndarray[cnp.float64_t, ndim=1] h = np.zeros(tpp * up, dtype=np.float64)
    h[: taps.shape[0]] = taps
    cdef Py_ssize_t m, p, j, j_lo, j_hi
    cdef double acc, peak = 0.0
    for m in range(n + tpp - 1):
        j_lo = m - (n - 1) if m >= n else 0
        j_hi = m + 1 if m + 1 < tpp else tpp
        for p in range(up):
            acc = 0.0
            for j in range(j_lo, j_hi):
                acc += h[j * up + p] * x[m - j]
            if fabs(acc) > peak:
                peak = fabs(acc)
    return peak
