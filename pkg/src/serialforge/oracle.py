"""Exact reference arithmetic and self-verifying benchmark sweeps.

gemv is the ground truth the simulator is held to: plain wide-integer
row-vector-times-matrix with no modular window.  The sweep drivers
compile random sparse matrices, stream random vectors through the
simulator, check every output against gemv under the simulator's
modulus, and only then report timing, so a benchmark table can never
quietly desynchronize from functional correctness.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .circuit import compile_netlist
from .cost import DeviceProfile, _pmap, default_profile, estimate
from .csd import csd_transform
from .matrix import IntMatrix, MatrixPair, gen_element_sparse, pn_split
from .rng import derive_seed, stream
from .sim import simulate, simulate_batch

LARGE_DIM_LIMIT = 2048

MatrixLike = Union[IntMatrix, MatrixPair, np.ndarray]


def _as_array(matrix: MatrixLike) -> np.ndarray:
    if isinstance(matrix, MatrixPair):
        return matrix.difference()
    if isinstance(matrix, IntMatrix):
        return matrix.data
    return np.asarray(matrix, dtype=np.int64)


def gemv(vector: Sequence[int], matrix: MatrixLike) -> list[int]:
    """Exact o = a'V with wide integers; the simulator's ground truth.

    Uses int64 matrix arithmetic when a conservative bound proves no
    intermediate can overflow, otherwise falls back to Python integers.
    """
    values = _as_array(matrix)
    a = np.asarray(list(vector), dtype=np.int64)
    if len(a) != values.shape[0]:
        raise ValueError(
            f"vector length {len(a)} does not match {values.shape[0]} rows"
        )
    if a.size == 0:
        return []
    bound = len(a) * int(np.abs(a).max(initial=0)) * int(np.abs(values).max(initial=0))
    if bound < 2**62:
        return [int(v) for v in a @ values]
    cols = values.shape[1]
    out = []
    for c in range(cols):
        out.append(sum(int(a[r]) * int(values[r, c]) for r in range(len(a))))
    return out


@dataclass
class BenchRow:
    dim: int
    sparsity: float
    batch: int
    scheme: str
    cycles: int
    fmax_mhz: float
    latency_ns: float
    checksum: str


BENCH_CSV_COLUMNS = (
    "dim",
    "sparsity",
    "batch",
    "scheme",
    "cycles",
    "fmax_mhz",
    "latency_ns",
    "checksum",
)


def _checksum(outputs) -> str:
    return hashlib.sha256(json.dumps(outputs).encode("ascii")).hexdigest()


def _make_pair(m: IntMatrix, scheme: str, seed: int, tag: str) -> MatrixPair:
    if scheme == "pn":
        return pn_split(m)
    if scheme == "csd":
        return csd_transform(m, derive_seed(seed, tag))
    raise ValueError(f"unknown scheme {scheme!r}")


def _check_outputs(outputs: list[int], expected: list[int], window: int, what: str) -> None:
    modulus = 1 << window
    half = modulus >> 1
    for got, exact in zip(outputs, expected):
        want = (exact + half) % modulus - half
        if got != want:
            raise RuntimeError(
                f"{what}: simulator output {got} != oracle {exact} (mod 2^{window})"
            )


def _guard_dims(dims: Iterable[int], allow_large: bool) -> None:
    big = [d for d in dims if d > LARGE_DIM_LIMIT]
    if big and not allow_large:
        raise ValueError(
            f"dims {big} exceed {LARGE_DIM_LIMIT}; pass allow_large (--large) to run them"
        )


def _latency_cell(task: tuple) -> BenchRow:
    dim, sparsity, width, scheme, profile, seed = task
    m = gen_element_sparse(
        dim, dim, width, True, sparsity, derive_seed(seed, f"latency-m-{dim}")
    )
    pair = _make_pair(m, scheme, seed, f"latency-csd-{dim}")
    netlist = compile_netlist(pair, width)
    rng = stream(seed, f"latency-vec-{dim}")
    lo, hi = -(1 << (width - 1)), (1 << (width - 1)) - 1
    vec = rng.integers(lo, hi, size=dim, endpoint=True, dtype=np.int64).tolist()
    result = simulate(netlist, vec)
    _check_outputs(
        result.outputs, gemv(vec, m), result.window_bits, f"latency sweep dim {dim}"
    )
    report = estimate(pair, width, profile)
    return BenchRow(
        dim=dim,
        sparsity=sparsity,
        batch=1,
        scheme=scheme,
        cycles=result.latency_cycles,
        fmax_mhz=report.fmax_mhz,
        latency_ns=result.latency_cycles * 1000.0 / report.fmax_mhz,
        checksum=_checksum(result.outputs),
    )


def run_latency_sweep(
    dims: Sequence[int],
    sparsity: float = 0.98,
    seed: int = 0,
    profile: DeviceProfile | None = None,
    scheme: str = "csd",
    width: int = 8,
    jobs: int = 1,
    allow_large: bool = False,
) -> list[BenchRow]:
    """Compile, verify, and time one random matrix per dimension.

    Every simulated output is checked against gemv before timing is
    reported.  Dimensions above the desk-scale limit are refused unless
    allow_large is set.
    """
    _guard_dims(dims, allow_large)
    profile = profile or default_profile()
    tasks = [(dim, sparsity, width, scheme, profile, seed) for dim in dims]
    return _pmap(_latency_cell, tasks, jobs)


def _batch_cell(task: tuple) -> BenchRow:
    dim, sparsity, width, scheme, batch, profile, seed = task
    m = gen_element_sparse(
        dim, dim, width, True, sparsity, derive_seed(seed, f"batch-m-{dim}")
    )
    pair = _make_pair(m, scheme, seed, f"batch-csd-{dim}")
    netlist = compile_netlist(pair, width)
    rng = stream(seed, f"batch-vec-{dim}")
    lo, hi = -(1 << (width - 1)), (1 << (width - 1)) - 1
    vectors = [
        rng.integers(lo, hi, size=dim, endpoint=True, dtype=np.int64).tolist()
        for _ in range(batch)
    ]
    result = simulate_batch(netlist, vectors)
    expected = [gemv(vec, m) for vec in vectors]
    window = netlist.input_bitwidth + netlist.weight_bitwidth + netlist.extra_extension
    for b, (got, want) in enumerate(zip(result.outputs, expected)):
        _check_outputs(got, want, window, f"batch sweep dim {dim} vector {b}")
    report = estimate(pair, width, profile)
    return BenchRow(
        dim=dim,
        sparsity=sparsity,
        batch=batch,
        scheme=scheme,
        cycles=result.total_cycles,
        fmax_mhz=report.fmax_mhz,
        latency_ns=result.total_cycles * 1000.0 / report.fmax_mhz,
        checksum=_checksum(result.outputs),
    )


def run_batch_sweep(
    dim: int,
    sparsity: float,
    batches: Sequence[int],
    seed: int = 0,
    profile: DeviceProfile | None = None,
    scheme: str = "csd",
    width: int = 8,
    jobs: int = 1,
    allow_large: bool = False,
) -> list[BenchRow]:
    """Time back-to-back batches through one compiled matrix.

    Batch b re-streams the first b vectors of a fixed per-seed sequence,
    so cycle counts grow exactly linearly and checksums are stable for a
    given seed.
    """
    _guard_dims([dim], allow_large)
    if any(b < 1 for b in batches):
        raise ValueError("batch sizes must be positive")
    profile = profile or default_profile()
    tasks = [(dim, sparsity, width, scheme, b, profile, seed) for b in batches]
    return _pmap(_batch_cell, tasks, jobs)


def write_bench_csv(rows: Iterable[BenchRow], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(BENCH_CSV_COLUMNS)
        for row in rows:
            writer.writerow([getattr(row, col) for col in BENCH_CSV_COLUMNS])
