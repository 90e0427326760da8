"""serialforge: fixed matrices compiled into bit-serial circuits.

A weight matrix that never changes does not need multipliers: each set
bit of each weight wires an input row into a tree of one-bit serial
adders, values stream through least-significant-bit first, and the
whole vector-matrix product costs one LUT per set bit.  This package
compiles sparse signed integer matrices into such circuits, recodes
weights into canonical signed digits to thin the hardware further,
simulates the result cycle-accurately, estimates FPGA cost, and drives
an integer echo state network on top as an end-to-end demo.
"""

__version__ = "0.1.0"

from .circuit import (
    Kind,
    Netlist,
    NetlistFormatError,
    NetlistStats,
    census,
    compile_netlist,
    dump_structure,
    export_netlist,
    import_netlist,
)
from .cost import (
    CostReport,
    DeviceProfile,
    cost_sweep,
    default_profile,
    estimate,
    latency_formula,
    load_profile,
    save_profile,
    write_cost_csv,
)
from .csd import convert_to_csd, csd_savings, csd_transform
from .esn import EchoStateNetwork, EsnConfig, demo_task, init, train_readout
from .matrix import (
    IntMatrix,
    MatrixFormatError,
    MatrixPair,
    SparsityStats,
    gen_bit_sparse,
    gen_element_sparse,
    pn_split,
    read_matrix,
    stats,
    write_matrix,
)
from .oracle import (
    BenchRow,
    gemv,
    run_batch_sweep,
    run_latency_sweep,
    write_bench_csv,
)
from .rng import derive_seed, stream
from .sim import (
    BatchResult,
    SimResult,
    SimState,
    adder_trace,
    simulate,
    simulate_batch,
)

__all__ = [
    "__version__",
    "Kind",
    "Netlist",
    "NetlistFormatError",
    "NetlistStats",
    "census",
    "compile_netlist",
    "dump_structure",
    "export_netlist",
    "import_netlist",
    "CostReport",
    "DeviceProfile",
    "cost_sweep",
    "default_profile",
    "estimate",
    "latency_formula",
    "load_profile",
    "save_profile",
    "write_cost_csv",
    "convert_to_csd",
    "csd_savings",
    "csd_transform",
    "EchoStateNetwork",
    "EsnConfig",
    "demo_task",
    "init",
    "train_readout",
    "IntMatrix",
    "MatrixFormatError",
    "MatrixPair",
    "SparsityStats",
    "gen_bit_sparse",
    "gen_element_sparse",
    "pn_split",
    "read_matrix",
    "stats",
    "write_matrix",
    "BenchRow",
    "gemv",
    "run_batch_sweep",
    "run_latency_sweep",
    "write_bench_csv",
    "derive_seed",
    "stream",
    "BatchResult",
    "SimResult",
    "SimState",
    "adder_trace",
    "simulate",
    "simulate_batch",
]
