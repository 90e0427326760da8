"""Latency stays flat in the matrix dimension and linear in batch size.

Every multiply-accumulate happens in the same serial window, so a
1024-row product answers only a handful of cycles after a 64-row one
(the adder tree deepens logarithmically). Streaming vectors back to
back costs exactly one window each: no pipeline bubbles, no drain.
Every data point below is checked against an exact integer product
before it is reported.
"""

from serialforge import run_batch_sweep, run_latency_sweep


def main():
    print("single-vector latency, 98% element sparsity, 8-bit weights:")
    print(f"{'dim':>5}  {'cycles':>6}  {'mhz':>6}  {'ns':>7}")
    for row in run_latency_sweep([64, 128, 256, 512, 1024], sparsity=0.98, seed=3):
        print(f"{row.dim:>5}  {row.cycles:>6}  {row.fmax_mhz:>6}  {row.latency_ns:>7.1f}")
    print()

    print("batch streaming at dim 64 (cycles scale with batch, checksum per batch):")
    print(f"{'batch':>5}  {'cycles':>6}  {'ns':>8}  checksum")
    for row in run_batch_sweep(64, 0.98, [1, 2, 4, 8, 16, 32], seed=3):
        print(f"{row.batch:>5}  {row.cycles:>6}  {row.latency_ns:>8.1f}  {row.checksum[:12]}")


if __name__ == "__main__":
    main()
