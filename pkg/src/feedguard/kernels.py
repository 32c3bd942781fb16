"""INT8 matmul and activation-quantization kernels with backend selection.

The quantized matmul is the hot loop of the deployed inference path, so it
ships as a Cython extension; a pure numpy implementation with identical
semantics is selected at import time when the extension is unavailable.
Both backends must agree bit-for-bit: integer accumulation is exact and the
float steps use the same single-precision operations.
"""

from __future__ import annotations

import numpy as np

try:
    from feedguard import _kernels as _compiled
except ImportError:  # extension not built; numpy fallback takes over
    _compiled = None

BACKENDS = ("compiled", "numpy")


def have_compiled() -> bool:
    return _compiled is not None


def active_backend() -> str:
    return "compiled" if _compiled is not None else "numpy"


def _resolve(backend: str | None) -> str:
    if backend is None:
        return active_backend()
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "compiled" and _compiled is None:
        raise RuntimeError("compiled kernels are not available in this install")
    return backend


def _gemm_numpy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"inner dimensions differ: {a.shape[1]} vs {b.shape[1]}")
    return a.astype(np.int32) @ b.astype(np.int32).T


def _quantize_rows_numpy(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    amax = np.abs(x).max(axis=1)
    raw = (amax / np.float32(127.0)).astype(np.float32)
    # raw == 0 covers both all-zero rows and subnormal rows whose scale
    # underflows; either way the row quantizes to zeros under scale 1
    scales = np.where(raw > 0.0, raw, np.float32(1.0)).astype(np.float32)
    ratio = x / scales[:, None]
    # round half away from zero; |ratio| <= 127 by construction so the +0.5
    # addition is exact in float32
    q = np.sign(ratio) * np.floor(np.abs(ratio) + np.float32(0.5))
    q = np.clip(q, -127, 127).astype(np.int8)
    return q, scales


def int8_matmul(a: np.ndarray, b_rows: np.ndarray, *,
                backend: str | None = None) -> np.ndarray:
    """Exact int8 x int8 -> int32 product: out[i, j] = sum_k a[i,k]*b_rows[j,k].

    `a` is the (m, k) activation matrix, `b_rows` the (n, k) weight matrix
    stored one output channel per row.
    """
    a = np.ascontiguousarray(a, dtype=np.int8)
    b_rows = np.ascontiguousarray(b_rows, dtype=np.int8)
    if _resolve(backend) == "compiled":
        return _compiled.gemm_s8_s32(a, b_rows)
    return _gemm_numpy(a, b_rows)


def quantize_rows(x: np.ndarray, *,
                  backend: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric per-row INT8 quantization of a float32 matrix.

    Returns (q, scales) with scale_r = max(|row|)/127 (1.0 for all-zero rows)
    and q = round-half-away-from-zero of x/scale clamped to [-127, 127].
    """
    x = np.ascontiguousarray(x, dtype=np.float32)
    if not np.isfinite(x).all():
        raise ValueError("quantize_rows requires finite input")
    if _resolve(backend) == "compiled":
        return _compiled.quantize_rows(x)
    return _quantize_rows_numpy(x)
