"""Simulator tests.

The arithmetic oracle is an integer dot product: for every column c the
captured word must equal sum_r a[r] * (P - N)[r, c], reduced into the
signed output window.  Inputs and weights are generated over full
signed ranges so sign extension, carry seeding, and window wraparound
all get exercised.
"""

import numpy as np
import pytest

from serialforge import (
    IntMatrix,
    MatrixPair,
    adder_trace,
    compile_netlist,
    csd_transform,
    gen_element_sparse,
    pn_split,
    simulate,
    simulate_batch,
)


def _signed_mod(value, window):
    return (value + (1 << (window - 1))) % (1 << window) - (1 << (window - 1))


def _pair(p_rows, n_rows, bitwidth):
    p = np.array(p_rows)
    n = np.array(n_rows)
    return MatrixPair(
        IntMatrix(p.shape[0], p.shape[1], bitwidth, False, p),
        IntMatrix(n.shape[0], n.shape[1], bitwidth, False, n),
    )


class TestAdderTrace:
    def test_known_trace(self):
        assert adder_trace(3, 7) == [
            (0, 1, 1, 0, 1),
            (1, 1, 1, 1, 1),
            (1, 0, 1, 0, 1),
            (1, 0, 0, 1, 0),
        ]

    def test_sum_reconstructs(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            a, b = int(rng.integers(0, 256)), int(rng.integers(0, 256))
            rows = adder_trace(a, b)
            total = sum(r[3] << k for k, r in enumerate(rows))
            assert total == a + b

    def test_truncated_run_wraps(self):
        rows = adder_trace(3, 7, cycles=3)
        total = sum(r[3] << k for k, r in enumerate(rows))
        assert total == (3 + 7) % 8

    def test_zero_plus_zero(self):
        assert adder_trace(0, 0) == [(0, 0, 0, 0, 0), (0, 0, 0, 0, 0)]

    def test_rejects_negative(self):
        with pytest.raises(ValueError, match="non-negative"):
            adder_trace(-1, 2)


class TestKnownCircuits:
    def test_identity_passthrough(self):
        net = compile_netlist(_pair([[1]], [[0]], 1), input_bitwidth=8)
        for v in (-128, -1, 0, 1, 57, 127):
            assert simulate(net, [v]).outputs == [v]

    def test_negation(self):
        net = compile_netlist(_pair([[0]], [[1]], 1), input_bitwidth=8)
        for v in (-128, -3, 0, 5, 127):
            assert simulate(net, [v]).outputs == [-v]

    def test_weight_two_doubles(self):
        net = compile_netlist(_pair([[2]], [[0]], 2), input_bitwidth=6)
        for v in (-32, -7, 0, 11, 31):
            assert simulate(net, [v]).outputs == [2 * v]

    def test_row_sum(self):
        net = compile_netlist(_pair([[1], [1], [1]], [[0], [0], [0]], 1), input_bitwidth=5)
        assert simulate(net, [3, -4, 9]).outputs == [8]

    def test_two_columns_are_independent(self):
        net = compile_netlist(_pair([[1, 0], [0, 3]], [[0, 2], [0, 0]], 2), input_bitwidth=4)
        assert simulate(net, [5, -2]).outputs == [5, -16]

    def test_zero_matrix_outputs_zero(self):
        net = compile_netlist(_pair([[0, 0]], [[0, 0]], 3), input_bitwidth=4)
        assert simulate(net, [7]).outputs == [0, 0]


class TestEquivalence:
    def test_random_instances_match_dot_product(self):
        rng = np.random.default_rng(42)
        for trial in range(30):
            rows = int(rng.integers(1, 20))
            cols = int(rng.integers(1, 12))
            bww = int(rng.integers(1, 9))
            bwi = int(rng.integers(1, 9))
            m = gen_element_sparse(rows, cols, bww, True, 0.6, seed=trial)
            vec = rng.integers(-(1 << (bwi - 1)), 1 << (bwi - 1), size=rows).tolist()
            expect = m.data.T @ np.array(vec)
            for pair in (pn_split(m), csd_transform(m, seed=trial)):
                net = compile_netlist(pair, input_bitwidth=bwi)
                result = simulate(net, vec)
                window = result.window_bits
                for c in range(cols):
                    assert result.outputs[c] == _signed_mod(int(expect[c]), window)

    def test_exact_when_window_fits(self):
        m = gen_element_sparse(8, 8, 4, True, 0.8, seed=1)
        vec = [3, -2, 1, 0, -1, 2, -3, 1]
        pair = pn_split(m)
        net = compile_netlist(pair, input_bitwidth=4, extra_extension=8)
        expect = (m.data.T @ np.array(vec)).tolist()
        assert simulate(net, vec).outputs == expect

    def test_wraparound_is_modular(self):
        # 255 + 255 weights against max positive inputs overflows a
        # 16-bit window; the captured value must wrap, not saturate
        pair = _pair([[255], [255]], [[0], [0]], 8)
        net = compile_netlist(pair, input_bitwidth=8)
        result = simulate(net, [127, 127])
        true_value = 255 * 127 * 2
        assert result.window_bits == 16
        assert result.outputs == [_signed_mod(true_value, 16)]
        assert result.outputs != [true_value]

    def test_extension_recovers_exact_value(self):
        pair = _pair([[255], [255]], [[0], [0]], 8)
        net = compile_netlist(pair, input_bitwidth=8)
        result = simulate(net, [127, 127], extension=4)
        assert result.outputs == [255 * 127 * 2]

    def test_netlist_default_extension_applies(self):
        pair = _pair([[255], [255]], [[0], [0]], 8)
        net = compile_netlist(pair, input_bitwidth=8, extra_extension=4)
        assert simulate(net, [127, 127]).outputs == [255 * 127 * 2]

    def test_linearity(self):
        m = gen_element_sparse(6, 5, 6, True, 0.5, seed=7)
        net = compile_netlist(pn_split(m), input_bitwidth=8)
        rng = np.random.default_rng(7)
        for _ in range(10):
            u = rng.integers(-64, 64, size=6)
            v = rng.integers(-63, 63, size=6)
            su = simulate(net, u.tolist()).outputs
            sv = simulate(net, v.tolist()).outputs
            suv = simulate(net, (u + v).tolist()).outputs
            window = 8 + 6
            for c in range(5):
                assert suv[c] == _signed_mod(su[c] + sv[c], window)


class TestLatency:
    def test_latency_formula(self):
        for rows, depth in ((1, 0), (2, 1), (5, 3), (16, 4), (100, 7)):
            m = gen_element_sparse(rows, 2, 3, True, 0.5, seed=rows)
            net = compile_netlist(pn_split(m), input_bitwidth=6)
            result = simulate(net, [0] * rows)
            assert result.latency_cycles == 6 + 3 + depth + 2
            assert result.window_bits == 6 + 3

    def test_extension_adds_cycles(self):
        m = gen_element_sparse(4, 1, 2, True, 0.5, seed=0)
        net = compile_netlist(pn_split(m), input_bitwidth=4)
        base = simulate(net, [0, 0, 0, 0])
        longer = simulate(net, [0, 0, 0, 0], extension=5)
        assert longer.latency_cycles == base.latency_cycles + 5

    def test_explicit_cycle_budget(self):
        net = compile_netlist(_pair([[1]], [[0]], 1), input_bitwidth=4)
        result = simulate(net, [3], cycles=3)
        assert result.latency_cycles == 3


class TestBatch:
    def test_batch_matches_single_runs(self):
        m = gen_element_sparse(5, 4, 4, True, 0.5, seed=3)
        net = compile_netlist(pn_split(m), input_bitwidth=5)
        rng = np.random.default_rng(3)
        vectors = [rng.integers(-16, 16, size=5).tolist() for _ in range(6)]
        batch = simulate_batch(net, vectors)
        singles = [simulate(net, v) for v in vectors]
        assert batch.outputs == [s.outputs for s in singles]
        assert batch.total_cycles == sum(s.latency_cycles for s in singles)

    def test_state_fully_resets_between_vectors(self):
        # a lingering register or subtractor carry would corrupt the
        # second item, so it must match an isolated single run
        net = compile_netlist(_pair([[170]], [[85]], 8), input_bitwidth=8)
        batch = simulate_batch(net, [[127], [-128]])
        assert batch.outputs[1] == simulate(net, [-128]).outputs

    def test_empty_batch(self):
        net = compile_netlist(_pair([[1]], [[0]], 1), input_bitwidth=4)
        batch = simulate_batch(net, [])
        assert batch.outputs == [] and batch.total_cycles == 0


class TestTrace:
    def test_trace_rows_cover_state_nodes(self):
        m = gen_element_sparse(4, 2, 3, True, 0.3, seed=2)
        net = compile_netlist(pn_split(m), input_bitwidth=4)
        result = simulate(net, [1, -2, 3, 0], trace=True)
        assert result.trace
        cycles = {row[0] for row in result.trace}
        assert cycles == set(range(result.latency_cycles))
        for cycle, node, total, carry in result.trace:
            assert 0 <= node < net.num_nodes
            assert total in (0, 1)
            assert carry in (0, 1, None)

    def test_dff_rows_have_no_carry(self):
        from serialforge import Kind

        net = compile_netlist(_pair([[1]], [[0]], 1), input_bitwidth=4)
        result = simulate(net, [5], trace=True)
        for _, node, _, carry in result.trace:
            if net.kind[node] == Kind.DFF:
                assert carry is None
            else:
                assert carry is not None

    def test_trace_off_by_default(self):
        net = compile_netlist(_pair([[1]], [[0]], 1), input_bitwidth=4)
        assert simulate(net, [5]).trace is None


class TestValidation:
    def test_wrong_vector_length(self):
        net = compile_netlist(_pair([[1]], [[0]], 1), input_bitwidth=4)
        with pytest.raises(ValueError, match="length"):
            simulate(net, [1, 2])

    def test_input_out_of_range(self):
        net = compile_netlist(_pair([[1]], [[0]], 1), input_bitwidth=4)
        with pytest.raises(ValueError, match="range"):
            simulate(net, [8])
        with pytest.raises(ValueError, match="range"):
            simulate(net, [-9])

    def test_window_limit(self):
        net = compile_netlist(_pair([[1]], [[0]], 1), input_bitwidth=32)
        with pytest.raises(ValueError, match="window"):
            simulate(net, [0], extension=40)

    def test_negative_extension(self):
        net = compile_netlist(_pair([[1]], [[0]], 1), input_bitwidth=4)
        with pytest.raises(ValueError, match="extension"):
            simulate(net, [0], extension=-1)
