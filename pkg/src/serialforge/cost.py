"""Area, frequency, and latency estimates for compiled circuits.

The resource model is deliberately simple: one LUT per set weight bit
(each set bit becomes at most one serial adder or subtractor cell) and
two registers per LUT.  Device occupancy is bucketed by super logic
region: a design confined to one SLR clocks fastest, spanning two costs
a step, and anything wider pays the full crossing penalty.  Defaults
model a 4-SLR part with 425k LUTs per SLR, usable to 82% occupancy.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, TypeVar

from .circuit import NetlistStats
from .csd import csd_transform
from .matrix import MatrixPair, gen_element_sparse, pn_split, stats
from .rng import derive_seed

_T = TypeVar("_T")
_U = TypeVar("_U")


def _pmap(fn: Callable[[_T], _U], items: Sequence[_T], jobs: int) -> list[_U]:
    # Deterministic output order regardless of worker count.
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


@dataclass
class DeviceProfile:
    """FPGA sizing knobs; frequency buckets are keyed by SLRs used."""

    name: str = "4-slr-default"
    luts_per_slr: int = 425_000
    slr_count: int = 4
    occupancy_threshold: float = 0.82
    freq_buckets_mhz: dict[int, float] = field(
        default_factory=lambda: {1: 500.0, 2: 350.0, 3: 237.5, 4: 237.5}
    )

    def __post_init__(self) -> None:
        if self.luts_per_slr < 1 or self.slr_count < 1:
            raise ValueError("device must have positive LUTs and SLR count")
        if not 0.0 < self.occupancy_threshold <= 1.0:
            raise ValueError(
                f"occupancy_threshold must be in (0, 1], got {self.occupancy_threshold}"
            )
        missing = [k for k in range(1, self.slr_count + 1) if k not in self.freq_buckets_mhz]
        if missing:
            raise ValueError(f"freq_buckets_mhz missing SLR counts {missing}")

    def fmax_mhz(self, slrs_used: int) -> float:
        return self.freq_buckets_mhz[min(max(slrs_used, 1), self.slr_count)]


def default_profile() -> DeviceProfile:
    return DeviceProfile()


def load_profile(path: str) -> DeviceProfile:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    try:
        buckets = {int(k): float(v) for k, v in doc["freq_buckets_mhz"].items()}
        return DeviceProfile(
            name=str(doc.get("name", "custom")),
            luts_per_slr=int(doc["luts_per_slr"]),
            slr_count=int(doc["slr_count"]),
            occupancy_threshold=float(doc["occupancy_threshold"]),
            freq_buckets_mhz=buckets,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path}: bad device profile: {exc}") from exc


def save_profile(profile: DeviceProfile, path: str) -> None:
    doc = {
        "name": profile.name,
        "luts_per_slr": profile.luts_per_slr,
        "slr_count": profile.slr_count,
        "occupancy_threshold": profile.occupancy_threshold,
        "freq_buckets_mhz": {str(k): v for k, v in profile.freq_buckets_mhz.items()},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


@dataclass
class CostReport:
    lut_estimate: int
    ff_estimate: int
    slrs_used: int
    fmax_mhz: float
    latency_cycles: int
    latency_ns: float
    fits: bool
    exact_adders: Optional[int] = None
    exact_ffs: Optional[int] = None

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def latency_formula(rows: int, input_bitwidth: int, weight_bitwidth: int) -> int:
    """Streaming latency in cycles: input width + output width + tree
    depth + one accumulate cycle + one subtract cycle."""
    depth = (rows - 1).bit_length()
    return input_bitwidth + weight_bitwidth + depth + 2


def estimate(
    pair: MatrixPair,
    input_bitwidth: int,
    profile: DeviceProfile | None = None,
    netlist_stats: NetlistStats | None = None,
) -> CostReport:
    """Estimate resources and speed for the circuit a pair compiles to.

    The LUT estimate is the total set-bit count of the pair; exact
    counts from a compiled netlist's census can ride along for
    comparison (exact adders include subtractors, and exact flip-flops
    count two per adder cell plus each demoted delay element).
    """
    if input_bitwidth < 1:
        raise ValueError(f"input_bitwidth must be positive, got {input_bitwidth}")
    profile = profile or default_profile()
    luts = stats(pair.p).ones_count + stats(pair.n).ones_count
    capacity = profile.occupancy_threshold * profile.luts_per_slr
    slrs = math.ceil(luts / capacity) if luts else 0
    fmax = profile.fmax_mhz(slrs)
    cycles = latency_formula(pair.rows, input_bitwidth, pair.bitwidth)
    report = CostReport(
        lut_estimate=luts,
        ff_estimate=2 * luts,
        slrs_used=slrs,
        fmax_mhz=fmax,
        latency_cycles=cycles,
        latency_ns=cycles * 1000.0 / fmax,
        fits=slrs <= profile.slr_count,
    )
    if netlist_stats is not None:
        report.exact_adders = netlist_stats.adders + netlist_stats.subtractors
        report.exact_ffs = (
            2 * (netlist_stats.adders + netlist_stats.subtractors)
            + netlist_stats.delay_ffs
        )
    return report


COST_CSV_COLUMNS = (
    "dim",
    "sparsity",
    "width",
    "scheme",
    "ones",
    "luts",
    "ffs",
    "slrs",
    "fmax_mhz",
    "cycles",
    "ns",
    "fits",
)


def _cost_cell(task: tuple) -> list[dict]:
    dim, sparsity, width, schemes, profile, seed = task
    m = gen_element_sparse(
        dim, dim, width, True, sparsity, derive_seed(seed, f"cost-{dim}-{sparsity}-{width}")
    )
    source_ones = stats(m).ones_count
    rows = []
    for scheme in schemes:
        if scheme == "pn":
            pair = pn_split(m)
        elif scheme == "csd":
            pair = csd_transform(m, derive_seed(seed, f"cost-csd-{dim}-{sparsity}-{width}"))
        else:
            raise ValueError(f"unknown scheme {scheme!r}")
        report = estimate(pair, width, profile)
        rows.append(
            {
                "dim": dim,
                "sparsity": sparsity,
                "width": width,
                "scheme": scheme,
                "ones": source_ones,
                "luts": report.lut_estimate,
                "ffs": report.ff_estimate,
                "slrs": report.slrs_used,
                "fmax_mhz": report.fmax_mhz,
                "cycles": report.latency_cycles,
                "ns": report.latency_ns,
                "fits": report.fits,
            }
        )
    return rows


def cost_sweep(
    dims: Sequence[int],
    sparsities: Sequence[float],
    widths: Sequence[int],
    schemes: Sequence[str] = ("pn", "csd"),
    profile: DeviceProfile | None = None,
    seed: int = 0,
    jobs: int = 1,
) -> list[dict]:
    """Cartesian cost sweep over square random matrices.

    One matrix is generated per (dim, sparsity, width) cell and costed
    under each scheme, so the scheme rows of a cell are directly
    comparable.  Row order is the cartesian product order regardless of
    worker count.
    """
    profile = profile or default_profile()
    tasks = [
        (dim, sparsity, width, tuple(schemes), profile, seed)
        for dim in dims
        for sparsity in sparsities
        for width in widths
    ]
    rows: list[dict] = []
    for cell_rows in _pmap(_cost_cell, tasks, jobs):
        rows.extend(cell_rows)
    return rows


def write_cost_csv(rows: Iterable[dict], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=COST_CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _csv_value(row[k]) for k in COST_CSV_COLUMNS})


def _csv_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    return value
