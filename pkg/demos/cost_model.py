"""The closed-form cost model: set bits in, LUTs and nanoseconds out.

One set weight bit costs at most one serial adder cell, so LUT count is
simply the pair's total set bits, flip-flops twice that, and frequency
falls out of how many super logic regions the design spills across.
The sweep below shows cost falling linearly as sparsity rises while
latency stays frozen, and the compiled netlist census confirms the
linear model against exact cell counts.
"""

from serialforge import (
    census,
    compile_netlist,
    cost_sweep,
    estimate,
    gen_bit_sparse,
    gen_element_sparse,
    pn_split,
    stats,
)


def main():
    print("cost sweep, 64x64 8-bit signed, both lowering schemes:")
    rows = cost_sweep([64], [0.5, 0.75, 0.9, 0.98], [8], seed=1)
    header = f"{'sparsity':>8}  {'scheme':>6}  {'luts':>6}  {'ffs':>7}  {'slrs':>4}  {'mhz':>6}  {'ns':>6}"
    print(header)
    for row in rows:
        print(f"{row['sparsity']:>8}  {row['scheme']:>6}  {row['luts']:>6}  "
              f"{row['ffs']:>7}  {row['slrs']:>4}  {row['fmax_mhz']:>6}  {row['ns']:>6.1f}")
    print()

    print("exact adder cells track set bits (bit-sparsity sweep):")
    print(f"{'ones':>6}  {'exact cells':>11}")
    for i, sparsity in enumerate((0.5, 0.7, 0.9, 0.98)):
        m = gen_bit_sparse(64, 64, 8, sparsity, seed=100 + i)
        pair = pn_split(m)
        counts = census(compile_netlist(pair, input_bitwidth=8))
        print(f"{stats(m).ones_count:>6}  {counts.adders + counts.subtractors:>11}")
    print()

    m = gen_element_sparse(1024, 1024, 8, True, 0.6, seed=0)
    report = estimate(pn_split(m), input_bitwidth=8)
    print("a dense 1024x1024 point for scale:")
    print(f"  luts={report.lut_estimate} ffs={report.ff_estimate} "
          f"slrs={report.slrs_used} fits={report.fits}")
    print(f"  fmax={report.fmax_mhz} MHz, "
          f"latency {report.latency_cycles} cycles = {report.latency_ns:.1f} ns")


if __name__ == "__main__":
    main()
