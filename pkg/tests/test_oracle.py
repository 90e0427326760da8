"""Reference arithmetic and benchmark sweep tests.

gemv itself is validated two independent ways: against hand-computed
products and against a reversed-order Python-integer summation, which
would diverge from a buggy vectorized path on overflow or sign errors.
"""

import csv

import numpy as np
import pytest

from serialforge import (
    IntMatrix,
    gemv,
    gen_element_sparse,
    latency_formula,
    pn_split,
    run_batch_sweep,
    run_latency_sweep,
    write_bench_csv,
)


class TestGemv:
    def test_hand_computed(self):
        m = IntMatrix(2, 3, 4, True, np.array([[1, -2, 0], [3, 4, -8]]))
        assert gemv([2, -1], m) == [2 * 1 - 3, 2 * -2 - 4, 8]

    def test_identity(self):
        m = IntMatrix(3, 3, 2, False, np.eye(3, dtype=int))
        assert gemv([5, -6, 7], m) == [5, -6, 7]

    def test_accepts_pair_and_array(self):
        m = gen_element_sparse(4, 4, 4, True, 0.25, seed=1)
        vec = [1, -2, 3, -4]
        from_matrix = gemv(vec, m)
        assert gemv(vec, pn_split(m)) == from_matrix
        assert gemv(vec, m.data) == from_matrix

    def test_matches_reversed_summation(self):
        m = gen_element_sparse(9, 7, 8, True, 0.4, seed=2)
        vec = list(range(-4, 5))
        expect = [
            sum(vec[r] * int(m.data[r, c]) for r in reversed(range(9)))
            for c in range(7)
        ]
        assert gemv(vec, m) == expect

    def test_wide_values_use_exact_arithmetic(self):
        # large enough that a narrow accumulator would overflow
        big = (1 << 31) - 1
        m = IntMatrix(2, 1, 32, True, np.array([[big], [big]]))
        vec = [big, big]
        assert gemv(vec, m) == [2 * big * big]

    def test_rejects_length_mismatch(self):
        m = gen_element_sparse(3, 3, 4, True, 0.0, seed=0)
        with pytest.raises(ValueError, match="length"):
            gemv([1, 2], m)


class TestLatencySweep:
    def test_rows_carry_verified_timing(self):
        rows = run_latency_sweep([16, 64], sparsity=0.95, seed=0)
        assert [r.dim for r in rows] == [16, 64]
        for row in rows:
            assert row.scheme == "csd"
            assert row.batch == 1
            # csd pairs are 9 bits wide for 8-bit weights
            assert row.cycles == latency_formula(row.dim, 8, 9)
            assert row.latency_ns == pytest.approx(row.cycles * 1000.0 / row.fmax_mhz)
            assert len(row.checksum) == 64

    def test_dim_64_takes_25_cycles(self):
        (row,) = run_latency_sweep([64], sparsity=0.98, seed=0)
        assert row.cycles == 25

    def test_scheme_pn(self):
        (row,) = run_latency_sweep([16], sparsity=0.9, seed=0, scheme="pn")
        assert row.cycles == latency_formula(16, 8, 8)

    def test_deterministic(self):
        a = run_latency_sweep([16, 32], sparsity=0.95, seed=3)
        b = run_latency_sweep([16, 32], sparsity=0.95, seed=3)
        assert a == b

    def test_parallel_jobs_match_serial(self):
        a = run_latency_sweep([16, 32], sparsity=0.95, seed=4, jobs=1)
        b = run_latency_sweep([16, 32], sparsity=0.95, seed=4, jobs=2)
        assert a == b

    def test_large_dims_are_gated(self):
        with pytest.raises(ValueError, match="allow_large"):
            run_latency_sweep([4096], sparsity=0.99, seed=0)

    def test_rejects_unknown_scheme(self):
        with pytest.raises(ValueError, match="scheme"):
            run_latency_sweep([8], sparsity=0.9, seed=0, scheme="magic")


class TestBatchSweep:
    def test_cycles_grow_exactly_linearly(self):
        rows = run_batch_sweep(16, 0.9, [1, 2, 4, 8], seed=0)
        single = rows[0].cycles
        assert single == latency_formula(16, 8, 9)
        for row, b in zip(rows, [1, 2, 4, 8]):
            assert row.batch == b
            assert row.cycles == b * single

    def test_batches_share_matrix_but_not_checksums(self):
        rows = run_batch_sweep(8, 0.8, [1, 2], seed=5)
        assert rows[0].checksum != rows[1].checksum
        assert rows[0].fmax_mhz == rows[1].fmax_mhz

    def test_deterministic(self):
        a = run_batch_sweep(8, 0.8, [1, 4], seed=6)
        b = run_batch_sweep(8, 0.8, [1, 4], seed=6)
        assert a == b

    def test_rejects_bad_batch(self):
        with pytest.raises(ValueError, match="batch"):
            run_batch_sweep(8, 0.8, [0], seed=0)

    def test_large_dim_gated(self):
        with pytest.raises(ValueError, match="allow_large"):
            run_batch_sweep(5000, 0.99, [1], seed=0)


class TestBenchCsv:
    def test_round_trip_columns(self, tmp_path):
        rows = run_latency_sweep([8], sparsity=0.9, seed=1)
        path = str(tmp_path / "bench.csv")
        write_bench_csv(rows, path)
        with open(path, newline="") as fh:
            parsed = list(csv.DictReader(fh))
        assert len(parsed) == 1
        assert parsed[0]["dim"] == "8"
        assert parsed[0]["scheme"] == "csd"
        assert set(parsed[0]) == {
            "dim", "sparsity", "batch", "scheme",
            "cycles", "fmax_mhz", "latency_ns", "checksum",
        }
