"""Cycle-accurate simulation of compiled bit-serial netlists.

Values travel least-significant-bit first, one bit per cycle.  Each
input row presents its two's-complement bits for input_bitwidth cycles
and then repeats its sign bit, so arithmetic keeps working while the
deeper circuit paths drain.  Every adder, subtractor, and flip-flop
output is a register: all next states are computed from the current
outputs and committed together, so evaluation order never matters.

A serial adder registers sum and carry with carry cleared at reset; a
serial subtractor inverts its second operand and seeds the carry with 1,
the classic two's-complement identity a - b = a + ~b + 1.  The zeros
that precede real data through the tree leave a subtractor's seed carry
undisturbed (0 + ~0 + 1 re-arms it every cycle), so the seed is intact
when the streams arrive.

Each output column captures S = input_bitwidth + weight_bitwidth +
extension bits starting at cycle tree_depth + 2: the result's LSb
crosses tree_depth tree registers, one accumulate register, and one
subtract register.  Results are exact modulo 2^S, interpreted as signed;
extension cycles widen the window when full precision is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .circuit import Kind, Netlist

MAX_WINDOW_BITS = 62

TraceRow = tuple[int, int, int, Optional[int]]


def _full_add(a: int, b: int, c: int) -> tuple[int, int]:
    return a ^ b ^ c, (a & b) | (c & (a | b))


def adder_trace(a: int, b: int, cycles: int | None = None) -> list[tuple[int, int, int, int, int]]:
    """Stream two unsigned values through one serial full adder.

    :return: one row per cycle: (carry_in, a_bit, b_bit, sum_bit,
        carry_out).  The sum bits, LSb first, reconstruct a + b modulo
        2^cycles.  Default cycle count is one past the wider operand, so
        the final carry is absorbed.
    """
    if a < 0 or b < 0:
        raise ValueError("adder_trace operands must be non-negative")
    if cycles is None:
        cycles = max(a.bit_length(), b.bit_length(), 1) + 1
    if cycles < 1:
        raise ValueError(f"cycles must be positive, got {cycles}")
    rows = []
    carry = 0
    for t in range(cycles):
        a_bit = (a >> t) & 1
        b_bit = (b >> t) & 1
        s, carry_out = _full_add(a_bit, b_bit, carry)
        rows.append((carry, a_bit, b_bit, s, carry_out))
        carry = carry_out
    return rows


@dataclass
class SimResult:
    outputs: list[int]
    latency_cycles: int
    window_bits: int
    trace: Optional[list[TraceRow]] = None


@dataclass
class BatchResult:
    outputs: list[list[int]]
    total_cycles: int


@dataclass
class SimState:
    """Registers and schedule for one run; step() advances one cycle."""

    netlist: Netlist
    window_bits: int
    capture_start: int
    total_cycles: int
    schedule: np.ndarray
    bits: np.ndarray
    carries: np.ndarray
    captured: np.ndarray
    cycle: int = 0
    trace: Optional[list[TraceRow]] = None
    _packed: dict = field(default_factory=dict, repr=False)

    def step(self) -> None:
        p = self._packed
        out = self.bits
        t = self.cycle
        out[p["tap_ids"]] = self.schedule[:, t]
        idx = t - self.capture_start
        if 0 <= idx < self.window_bits:
            self.captured[:, idx] = out[p["cap_src"]]
        a0, a1 = out[p["add_a"]], out[p["add_b"]]
        ac = self.carries[p["add_ids"]]
        add_sum = a0 ^ a1 ^ ac
        add_carry = (a0 & a1) | (ac & (a0 | a1))
        s0, s1 = out[p["sub_a"]], out[p["sub_b"]] ^ 1
        sc = self.carries[p["sub_ids"]]
        sub_sum = s0 ^ s1 ^ sc
        sub_carry = (s0 & s1) | (sc & (s0 | s1))
        dff_next = out[p["dff_in"]]
        if self.trace is not None:
            self._record_trace()
        out[p["add_ids"]] = add_sum
        self.carries[p["add_ids"]] = add_carry
        out[p["sub_ids"]] = sub_sum
        self.carries[p["sub_ids"]] = sub_carry
        out[p["dff_ids"]] = dff_next
        self.cycle = t + 1

    def _record_trace(self) -> None:
        p = self._packed
        for i in p["add_ids"]:
            self.trace.append((self.cycle, int(i), int(self.bits[i]), int(self.carries[i])))
        for i in p["sub_ids"]:
            self.trace.append((self.cycle, int(i), int(self.bits[i]), int(self.carries[i])))
        for i in p["dff_ids"]:
            self.trace.append((self.cycle, int(i), int(self.bits[i]), None))


def _build_schedule(
    netlist: Netlist, input_vector: Sequence[int], total_cycles: int
) -> np.ndarray:
    bw = netlist.input_bitwidth
    if len(input_vector) != netlist.rows:
        raise ValueError(
            f"input vector length {len(input_vector)} does not match {netlist.rows} rows"
        )
    values = np.asarray(list(input_vector), dtype=np.int64)
    lo, hi = -(1 << (bw - 1)), (1 << (bw - 1)) - 1
    if values.size and (values.min() < lo or values.max() > hi):
        bad = values[(values < lo) | (values > hi)][0]
        raise ValueError(f"input {bad} out of signed {bw}-bit range [{lo}, {hi}]")
    twos = values & ((1 << bw) - 1)
    # Reading past the top bit repeats it: two's-complement sign extension.
    shifts = np.minimum(np.arange(total_cycles, dtype=np.int64), bw - 1)
    return ((twos[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def _init_state(
    netlist: Netlist,
    input_vector: Sequence[int],
    cycles: int | None,
    extension: int | None,
    trace: bool,
) -> SimState:
    ext = netlist.extra_extension if extension is None else extension
    if ext < 0:
        raise ValueError(f"extension must be non-negative, got {ext}")
    window = netlist.input_bitwidth + netlist.weight_bitwidth + ext
    if window > MAX_WINDOW_BITS:
        raise ValueError(f"output window of {window} bits exceeds {MAX_WINDOW_BITS}")
    capture_start = netlist.tree_depth + 2
    full = capture_start + window
    total = full if cycles is None else cycles
    if total < 1:
        raise ValueError(f"cycles must be positive, got {total}")
    schedule = _build_schedule(netlist, input_vector, total)
    kind = netlist.kind
    tap_ids = np.flatnonzero(kind == Kind.INPUT)
    tap_ids = tap_ids[np.argsort(netlist.arg[tap_ids])]
    add_ids = np.flatnonzero(kind == Kind.ADD)
    sub_ids = np.flatnonzero(kind == Kind.SUB)
    dff_ids = np.flatnonzero(kind == Kind.DFF)
    cap_ids = netlist.capture_ids()
    carries = np.zeros(netlist.num_nodes, dtype=np.uint8)
    carries[sub_ids] = 1
    return SimState(
        netlist=netlist,
        window_bits=window,
        capture_start=capture_start,
        total_cycles=total,
        schedule=schedule,
        bits=np.zeros(netlist.num_nodes, dtype=np.uint8),
        carries=carries,
        captured=np.zeros((netlist.cols, window), dtype=np.uint8),
        trace=[] if trace else None,
        _packed={
            "tap_ids": tap_ids,
            "add_ids": add_ids,
            "add_a": netlist.in0[add_ids],
            "add_b": netlist.in1[add_ids],
            "sub_ids": sub_ids,
            "sub_a": netlist.in0[sub_ids],
            "sub_b": netlist.in1[sub_ids],
            "dff_ids": dff_ids,
            "dff_in": netlist.in0[dff_ids],
            "cap_src": netlist.in0[cap_ids],
        },
    )


def _decode(captured: np.ndarray, window: int) -> list[int]:
    weights = np.int64(1) << np.arange(window, dtype=np.int64)
    raw = captured.astype(np.int64) @ weights
    raw[captured[:, -1] == 1] -= np.int64(1) << window
    return [int(v) for v in raw]


def simulate(
    netlist: Netlist,
    input_vector: Sequence[int],
    cycles: int | None = None,
    extension: int | None = None,
    trace: bool = False,
) -> SimResult:
    """Run one input vector through the netlist.

    :param cycles: run exactly this many cycles instead of to
        completion; outputs are only fully formed on a complete run.
    :param extension: override the netlist's recorded extra extension.
    :return: signed outputs per column, exact modulo 2^window_bits, and
        the measured first-input-bit-to-last-output-bit cycle count.
    """
    state = _init_state(netlist, input_vector, cycles, extension, trace)
    for _ in range(state.total_cycles):
        state.step()
    return SimResult(
        outputs=_decode(state.captured, state.window_bits),
        latency_cycles=state.cycle,
        window_bits=state.window_bits,
        trace=state.trace,
    )


def simulate_batch(
    netlist: Netlist,
    vectors: Sequence[Sequence[int]],
    extension: int | None = None,
) -> BatchResult:
    """Run a batch of input vectors back to back with full state resets.

    Total cycle count is exactly batch size times the single-vector
    latency; there is no pipelining across vectors.
    """
    outputs = []
    total = 0
    for vec in vectors:
        result = simulate(netlist, vec, extension=extension)
        outputs.append(result.outputs)
        total += result.latency_cycles
    return BatchResult(outputs=outputs, total_cycles=total)
