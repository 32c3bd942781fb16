# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the INT8 inference path.

Semantics are pinned by the numpy fallback in feedguard.kernels: the two
backends must produce bit-identical outputs (exact integer accumulation,
round-half-away-from-zero quantization).
"""

import numpy as np

cdef extern from "math.h" nogil:
    float fabsf(float)
    long lroundf(float)


def gemm_s8_s32(const signed char[:, ::1] a, const signed char[:, ::1] b):
    """C[i, j] = sum_k a[i, k] * b[j, k], accumulated in int32.

    `a` is (m, k) row-major, `b` is (n, k) row-major (one row per output
    channel), result is (m, n) int32.
    """
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t k = a.shape[1]
    cdef Py_ssize_t n = b.shape[0]
    if b.shape[1] != k:
        raise ValueError(f"inner dimensions differ: {k} vs {b.shape[1]}")

    out = np.empty((m, n), dtype=np.int32)
    cdef int[:, ::1] c = out
    cdef Py_ssize_t i, j, p
    cdef int acc
    with nogil:
        for i in range(m):
            for j in range(n):
                acc = 0
                for p in range(k):
                    acc += <int> a[i, p] * <int> b[j, p]
                c[i, j] = acc
    return out


def quantize_rows(const float[:, ::1] x):
    """Symmetric per-row INT8 quantization.

    scale_r = max(|row|) / 127 (1.0 for an all-zero row); q = round(x / scale)
    with ties away from zero, clamped to [-127, 127].  Returns (q, scales).
    """
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t k = x.shape[1]
    q_arr = np.empty((m, k), dtype=np.int8)
    s_arr = np.empty(m, dtype=np.float32)
    cdef signed char[:, ::1] q = q_arr
    cdef float[::1] s = s_arr
    cdef Py_ssize_t i, j
    cdef float amax, scale, v
    cdef long r
    with nogil:
        for i in range(m):
            amax = 0.0
            for j in range(k):
                v = fabsf(x[i, j])
                if v > amax:
                    amax = v
            scale = amax / 127.0
            if scale == 0.0:  # all-zero row, or amax so small the scale underflows
                scale = 1.0
            s[i] = scale
            for j in range(k):
                r = lroundf(x[i, j] / scale)
                if r > 127:
                    r = 127
                elif r < -127:
                    r = -127
                q[i, j] = <signed char> r
    return q_arr, s_arr
