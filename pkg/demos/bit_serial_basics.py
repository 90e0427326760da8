"""The building block: a serial full adder, one bit per cycle.

Bit-serial arithmetic streams values least-significant-bit first
through a single full adder whose carry is held in a register.  Adding
3 + 7 therefore takes four cycles: three for the operand bits and one
more to flush the final carry.  This script prints that trace, then
compiles the smallest possible matrix circuit and walks its structure.
"""

from serialforge import adder_trace, census, compile_netlist, dump_structure, pn_split, simulate
from serialforge.matrix import IntMatrix

import numpy as np


def main():
    print("serial addition of 3 + 7, LSb first")
    print(f"{'cycle':>5}  {'c_in':>4}  a  b  {'sum':>3}  {'c_out':>5}")
    for t, (c_in, a, b, s, c_out) in enumerate(adder_trace(3, 7), start=1):
        print(f"{t:>5}  {c_in:>4}  {a}  {b}  {s:>3}  {c_out:>5}")
    print("sum bits LSb first: 0101 -> 1010b = 10")
    print()

    # The simplest matrix circuit: one weight of 1 passes its input
    # through.  One flip-flop for the single tapped bit, one subtractor
    # forming P - N, one capture.
    m = IntMatrix(1, 1, 1, False, np.array([[1]]))
    netlist = compile_netlist(pn_split(m), input_bitwidth=8)
    print("netlist for the 1x1 identity weight:")
    print(dump_structure(netlist), end="")
    counts = census(netlist)
    print(f"census: adders={counts.adders} subtractors={counts.subtractors} "
          f"delay_ffs={counts.delay_ffs}")
    for value in (-128, -5, 0, 77, 127):
        result = simulate(netlist, [value])
        print(f"input {value:>5} -> output {result.outputs[0]:>5} "
              f"({result.latency_cycles} cycles)")


if __name__ == "__main__":
    main()
