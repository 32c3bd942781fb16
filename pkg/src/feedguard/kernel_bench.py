"""Benchmark the compiled INT8 kernels against the numpy fallback.

Shapes default to the matmuls the quantized encoder actually issues at the
feed-listener truncation length (280 tokens).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from feedguard import kernels

DEFAULT_SHAPES = ((280, 64, 64), (280, 64, 128), (280, 128, 64), (280, 768, 768))


@dataclass(frozen=True)
class KernelTiming:
    shape: tuple[int, int, int]   # (m, k, n)
    backend: str
    gemm_us: float
    quantize_us: float

    def as_dict(self) -> dict:
        m, k, n = self.shape
        return {"m": m, "k": k, "n": n, "backend": self.backend,
                "gemm_us": self.gemm_us, "quantize_us": self.quantize_us}


def _time_us(fn, repeat: int) -> float:
    fn()  # warm up
    start = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - start) / repeat * 1e6


def run_benchmark(shapes=DEFAULT_SHAPES, repeat: int = 50,
                  seed: int = 0) -> list[KernelTiming]:
    rng = np.random.default_rng(seed)
    rows = []
    backends = [b for b in kernels.BACKENDS
                if b != "compiled" or kernels.have_compiled()]
    for shape in shapes:
        m, k, n = shape
        x = rng.standard_normal((m, k)).astype(np.float32)
        a = rng.integers(-127, 128, size=(m, k), dtype=np.int8)
        b = rng.integers(-127, 128, size=(n, k), dtype=np.int8)
        for backend in backends:
            gemm_us = _time_us(
                lambda: kernels.int8_matmul(a, b, backend=backend), repeat)
            quant_us = _time_us(
                lambda: kernels.quantize_rows(x, backend=backend), repeat)
            rows.append(KernelTiming(shape=shape, backend=backend,
                                     gemm_us=gemm_us, quantize_us=quant_us))
    return rows


def format_table(rows: list[KernelTiming]) -> str:
    lines = [f"{'shape (m,k,n)':>18}  {'backend':>8}  {'gemm us':>10}  {'quantize us':>12}"]
    for r in rows:
        lines.append(f"{str(r.shape):>18}  {r.backend:>8}  "
                     f"{r.gemm_us:>10.1f}  {r.quantize_us:>12.1f}")
    by_shape: dict[tuple, dict[str, float]] = {}
    for r in rows:
        by_shape.setdefault(r.shape, {})[r.backend] = r.gemm_us
    for shape, t in by_shape.items():
        if {"compiled", "numpy"} <= set(t):
            lines.append(f"{str(shape):>18}  speedup (gemm): "
                         f"{t['numpy'] / t['compiled']:.2f}x compiled vs numpy")
    if not kernels.have_compiled():
        lines.append("compiled kernels unavailable; numpy fallback only")
    return "\n".join(lines)
