"""Backend dispatch and the kernel benchmark harness."""

import numpy as np
import pytest

from feedguard import kernels
from feedguard.kernel_bench import format_table, run_benchmark


class TestDispatch:
    def test_active_backend_name(self):
        assert kernels.active_backend() in kernels.BACKENDS

    def test_unknown_backend_rejected(self):
        with pytest.raises(ValueError):
            kernels.int8_matmul(np.zeros((1, 1), dtype=np.int8),
                                np.zeros((1, 1), dtype=np.int8),
                                backend="fortran")

    def test_gemm_known_values(self):
        a = np.array([[1, -2, 3]], dtype=np.int8)
        b = np.array([[4, 5, 6], [-1, 0, 2]], dtype=np.int8)
        out = kernels.int8_matmul(a, b)
        np.testing.assert_array_equal(out, [[12, 5]])
        assert out.dtype == np.int32

    def test_gemm_extreme_values_accumulate_exactly(self):
        # 127 * 127 * 512 = 8,258,048 fits int32 with room to spare
        a = np.full((2, 512), 127, dtype=np.int8)
        b = np.full((3, 512), 127, dtype=np.int8)
        out = kernels.int8_matmul(a, b)
        assert (out == 127 * 127 * 512).all()

    def test_quantize_rows_requires_finite(self):
        with pytest.raises(ValueError):
            kernels.quantize_rows(np.array([[np.nan]], dtype=np.float32))


class TestBenchmark:
    def test_runs_and_formats(self):
        rows = run_benchmark(shapes=((8, 16, 8),), repeat=2)
        expected_backends = 2 if kernels.have_compiled() else 1
        assert len(rows) == expected_backends
        table = format_table(rows)
        assert "gemm us" in table
        if kernels.have_compiled():
            assert "speedup" in table

    def test_timings_positive(self):
        rows = run_benchmark(shapes=((8, 16, 8),), repeat=2)
        assert all(r.gemm_us > 0 and r.quantize_us > 0 for r in rows)
