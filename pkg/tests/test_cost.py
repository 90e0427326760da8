"""Cost model tests.

The resource model is closed-form, so most oracles are arithmetic done
by hand in the test: LUTs equal set bits, flip-flops double that, SLR
count is a ceiling division against usable capacity, and frequency
falls out of a fixed bucket table.
"""

import csv

import numpy as np
import pytest

from serialforge import (
    DeviceProfile,
    IntMatrix,
    MatrixPair,
    census,
    compile_netlist,
    cost_sweep,
    csd_transform,
    default_profile,
    estimate,
    gen_bit_sparse,
    gen_element_sparse,
    latency_formula,
    load_profile,
    pn_split,
    save_profile,
    stats,
    write_cost_csv,
)


def _pair_ones(pair):
    return stats(pair.p).ones_count + stats(pair.n).ones_count


class TestDeviceProfile:
    def test_default_buckets(self):
        prof = default_profile()
        assert prof.luts_per_slr == 425_000
        assert prof.slr_count == 4
        assert prof.occupancy_threshold == 0.82
        assert prof.fmax_mhz(1) == 500.0
        assert prof.fmax_mhz(2) == 350.0
        assert prof.fmax_mhz(3) == 237.5
        assert prof.fmax_mhz(4) == 237.5

    def test_fmax_clamps_to_bucket_range(self):
        prof = default_profile()
        assert prof.fmax_mhz(0) == 500.0  # empty design clocks at the top bucket
        assert prof.fmax_mhz(9) == 237.5  # overflow pays the widest penalty

    def test_rejects_missing_buckets(self):
        with pytest.raises(ValueError, match="missing SLR counts"):
            DeviceProfile(slr_count=3, freq_buckets_mhz={1: 500.0, 3: 200.0})

    def test_rejects_bad_threshold(self):
        with pytest.raises(ValueError, match="occupancy_threshold"):
            DeviceProfile(occupancy_threshold=0.0)

    def test_round_trip(self, tmp_path):
        prof = DeviceProfile(
            name="small",
            luts_per_slr=1000,
            slr_count=2,
            occupancy_threshold=0.9,
            freq_buckets_mhz={1: 400.0, 2: 300.0},
        )
        path = str(tmp_path / "device.json")
        save_profile(prof, path)
        loaded = load_profile(path)
        assert loaded == prof

    def test_load_rejects_missing_field(self, tmp_path):
        path = tmp_path / "device.json"
        path.write_text('{"name": "x"}')
        with pytest.raises(ValueError, match="device profile"):
            load_profile(str(path))


class TestLatencyFormula:
    def test_known_values(self):
        # 8-bit inputs, 8-bit weights, 1024 rows: 8 + 8 + 10 + 2
        assert latency_formula(1024, 8, 8) == 28
        assert latency_formula(1, 4, 1) == 7
        assert latency_formula(64, 8, 9) == 25

    def test_matches_simulation(self):
        from serialforge import simulate

        for rows in (1, 2, 5, 16, 100):
            m = gen_element_sparse(rows, 2, 3, True, 0.5, seed=rows)
            pair = pn_split(m)
            net = compile_netlist(pair, input_bitwidth=6)
            measured = simulate(net, [0] * rows).latency_cycles
            assert measured == latency_formula(rows, 6, pair.bitwidth)


class TestEstimate:
    def test_zero_matrix(self):
        pair = pn_split(IntMatrix(4, 4, 8, True, np.zeros((4, 4), dtype=int)))
        report = estimate(pair, input_bitwidth=8)
        assert report.lut_estimate == 0
        assert report.ff_estimate == 0
        assert report.slrs_used == 0
        assert report.fits
        assert report.latency_cycles == latency_formula(4, 8, 8)

    def test_luts_equal_pair_ones(self):
        for seed in range(5):
            m = gen_element_sparse(16, 16, 8, True, 0.5, seed=seed)
            pair = pn_split(m)
            report = estimate(pair, input_bitwidth=8)
            assert report.lut_estimate == _pair_ones(pair)
            assert report.ff_estimate == 2 * report.lut_estimate

    def test_slr_boundaries(self):
        prof = DeviceProfile(
            name="tiny",
            luts_per_slr=100,
            slr_count=2,
            occupancy_threshold=0.5,
            freq_buckets_mhz={1: 500.0, 2: 350.0},
        )
        # capacity is 50 usable LUTs per SLR
        ones_to_slrs = {+50: 1, +51: 2, +100: 2, +101: 3}
        for ones, slrs in ones_to_slrs.items():
            data = np.zeros((ones, 1), dtype=int)
            data[:, 0] = 1
            pair = MatrixPair(
                IntMatrix(ones, 1, 1, False, data),
                IntMatrix(ones, 1, 1, False, np.zeros((ones, 1), dtype=int)),
            )
            report = estimate(pair, input_bitwidth=4, profile=prof)
            assert report.slrs_used == slrs
            assert report.fits == (slrs <= 2)

    def test_latency_ns_consistent(self):
        m = gen_element_sparse(64, 64, 8, True, 0.9, seed=1)
        report = estimate(pn_split(m), input_bitwidth=8)
        assert report.latency_ns == pytest.approx(
            report.latency_cycles * 1000.0 / report.fmax_mhz
        )

    def test_large_dense_design_spills_over(self):
        # 1024x1024 at 60% element sparsity carries about 1.47M set
        # bits, past the 82% occupancy line of four 425k SLRs
        m = gen_element_sparse(1024, 1024, 8, True, 0.6, seed=0)
        report = estimate(pn_split(m), input_bitwidth=8)
        assert 1_300_000 < report.lut_estimate < 1_600_000
        assert report.slrs_used >= 4
        assert report.fmax_mhz == 237.5

    def test_exact_counts_ride_along(self):
        m = gen_element_sparse(12, 8, 6, True, 0.5, seed=2)
        pair = pn_split(m)
        net = compile_netlist(pair, input_bitwidth=8)
        st = census(net)
        report = estimate(pair, input_bitwidth=8, netlist_stats=st)
        assert report.exact_adders == st.adders + st.subtractors
        assert report.exact_ffs == 2 * (st.adders + st.subtractors) + st.delay_ffs
        assert report.exact_adders <= report.lut_estimate

    def test_exact_adders_track_ones_for_split_pairs(self):
        # a PN split never puts a set bit in both halves of an element,
        # so every set bit lands its own adder or subtractor cell
        for seed in range(4):
            m = gen_bit_sparse(32, 32, 8, 0.9, seed=seed)
            pair = pn_split(m)
            st = census(compile_netlist(pair, input_bitwidth=8))
            report = estimate(pair, input_bitwidth=8, netlist_stats=st)
            assert report.exact_adders <= report.lut_estimate

    def test_rejects_bad_input_bitwidth(self):
        pair = pn_split(gen_element_sparse(2, 2, 2, True, 0.5, seed=0))
        with pytest.raises(ValueError, match="input_bitwidth"):
            estimate(pair, input_bitwidth=0)


class TestCostSweep:
    def test_single_cell_rows(self):
        rows = cost_sweep([16], [0.9], [8], schemes=("pn", "csd"), seed=1)
        assert len(rows) == 2
        assert [r["scheme"] for r in rows] == ["pn", "csd"]
        pn, csd = rows
        assert pn["dim"] == csd["dim"] == 16
        assert pn["ones"] == csd["ones"]  # same source matrix
        assert csd["luts"] <= pn["luts"]

    def test_luts_fall_with_sparsity(self):
        rows = cost_sweep([32], [0.5, 0.9, 0.99], [8], schemes=("pn",), seed=2)
        luts = [r["luts"] for r in rows]
        assert luts == sorted(luts, reverse=True)

    def test_csd_never_beats_pn_on_latency_but_costs_less(self):
        rows = cost_sweep([16, 32], [0.8], [8], schemes=("pn", "csd"), seed=3)
        cells = {}
        for r in rows:
            cells.setdefault(r["dim"], {})[r["scheme"]] = r
        for dim, by_scheme in cells.items():
            assert by_scheme["csd"]["luts"] <= by_scheme["pn"]["luts"]
            # the recode widens the pair one bit, costing one cycle
            assert by_scheme["csd"]["cycles"] == by_scheme["pn"]["cycles"] + 1

    def test_cycles_match_formula(self):
        rows = cost_sweep([16], [0.9], [4, 8], schemes=("pn",), seed=4)
        for r in rows:
            assert r["cycles"] == latency_formula(16, r["width"], r["width"])

    def test_deterministic(self):
        a = cost_sweep([8, 16], [0.8], [4], seed=5)
        b = cost_sweep([8, 16], [0.8], [4], seed=5)
        assert a == b

    def test_parallel_jobs_preserve_rows(self):
        serial = cost_sweep([8, 16], [0.7, 0.9], [4], seed=6, jobs=1)
        parallel = cost_sweep([8, 16], [0.7, 0.9], [4], seed=6, jobs=2)
        assert serial == parallel

    def test_rejects_unknown_scheme(self):
        with pytest.raises(ValueError, match="scheme"):
            cost_sweep([4], [0.5], [4], schemes=("ternary",))

    def test_csv_output(self, tmp_path):
        rows = cost_sweep([8], [0.9], [4], seed=7)
        path = str(tmp_path / "sweep.csv")
        write_cost_csv(rows, path)
        with open(path, newline="") as fh:
            parsed = list(csv.DictReader(fh))
        assert len(parsed) == len(rows)
        assert set(parsed[0].keys()) == {
            "dim", "sparsity", "width", "scheme", "ones",
            "luts", "ffs", "slrs", "fmax_mhz", "cycles", "ns", "fits",
        }
        assert parsed[0]["fits"] in ("true", "false")
        assert parsed[0]["dim"] == "8"
