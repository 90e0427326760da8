"""An echo state network whose reservoir update is a compiled netlist.

The reservoir is a quantized random matrix; each timestep is one
matrix-vector product followed by a shift-and-clamp activation. The
reference backend does the product with plain integer math, the
netlist backend runs the compiled bit-serial circuit, and the two
must agree bit for bit. A ridge-regression readout is then trained
on the recorded states for a sine wave and a delayed-recall task.
"""

import numpy as np

from serialforge import EchoStateNetwork, EsnConfig, demo_task, stream


def main():
    config = EsnConfig(reservoir_dim=64, weight_bitwidth=4, state_bitwidth=4,
                       element_sparsity=0.75, shift=4, scheme="csd", seed=0)

    esn = EchoStateNetwork(config)
    rng = stream(99, "demo-input")
    inputs = rng.integers(-8, 8, size=(40, 1))
    ref_states = esn.run(inputs, backend="reference")
    esn.reset()
    hw_states = esn.run(inputs, backend="netlist")
    print(f"backend agreement over {inputs.shape[0]} steps: "
          f"{bool(np.array_equal(ref_states, hw_states))}")
    print(f"state range observed: [{ref_states.min()}, {ref_states.max()}] "
          f"(clamp at +/-{2 ** (config.state_bitwidth - 1)})")
    print()

    for task in ("sine", "recall:0", "recall:2"):
        report = demo_task(config, task, backend="netlist")
        print(f"task {task}:")
        print(f"  train mse {report['train_mse']:.6f}  "
              f"test mse {report['test_mse']:.6f}  "
              f"target variance {report['target_variance']:.4f}")


if __name__ == "__main__":
    main()
