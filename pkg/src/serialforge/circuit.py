"""Compile a fixed (P, N) matrix pair into a bit-serial netlist.

The input vector is shared across every column, so nothing multiplies at
run time: a weight bit that is set wires the corresponding input row
straight into an adder tree, and a weight bit that is clear contributes
a constant zero that folds away entirely.  Per column, per matrix of the
pair, per weight bit position:

* a balanced binary tree of depth exactly D = ceil(log2 rows) reduces
  the tapped rows.  A tree node with two live inputs is a serial adder;
  with one live input it demotes to a single flip-flop so every live
  path keeps the same registered depth; with none it folds to the
  constant and vanishes.

* the per-bit-position partial sums then merge through a chain of
  serial adders, most significant position first.  Each chain link
  registers its output, so the position-k sum reaches the column output
  delayed k cycles relative to the LSb position, which in serial
  arithmetic is exactly a weight of 2^k.  The head link would add the
  top position to zero, so it degrades to a flip-flop.  Links whose
  inputs fold to constants degrade the same way.

* one serial subtractor forms P - N for the column (kept whenever
  either side is live, since subtracting zero still needs the register
  and a live N must be negated), followed by the output capture.

The LSb of every column's result therefore crosses D tree registers,
one chain register, and one subtractor register: output capture starts
at cycle D + 2 for every column, and higher result bits absorb the
longer paths of higher bit positions.  Node ids are assigned in
construction order, so inputs always precede consumers and the id
sequence is already a topological order.  Node 0 is always the shared
constant zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .matrix import MatrixPair


class Kind(IntEnum):
    ZERO = 0
    INPUT = 1
    ADD = 2
    SUB = 3
    DFF = 4
    OUTPUT = 5


_KIND_NAMES = {
    Kind.ZERO: "zero",
    Kind.INPUT: "input",
    Kind.ADD: "add",
    Kind.SUB: "sub",
    Kind.DFF: "dff",
    Kind.OUTPUT: "output",
}
_NAME_KINDS = {name: kind for kind, name in _KIND_NAMES.items()}


class NetlistFormatError(ValueError):
    """Raised when a netlist file cannot be parsed or fails validation."""


@dataclass(eq=False)
class Netlist:
    """A compiled bit-serial circuit.

    Parallel arrays describe one node per index: its kind, up to two
    input node ids (-1 when absent), and an argument (input row for
    INPUT nodes, output column for OUTPUT nodes, -1 otherwise).
    """

    kind: np.ndarray
    in0: np.ndarray
    in1: np.ndarray
    arg: np.ndarray
    rows: int
    cols: int
    input_bitwidth: int
    weight_bitwidth: int
    tree_depth: int
    extra_extension: int

    @property
    def num_nodes(self) -> int:
        return len(self.kind)

    def capture_ids(self) -> np.ndarray:
        """Ids of the OUTPUT nodes, ordered by column."""
        ids = np.flatnonzero(self.kind == Kind.OUTPUT)
        return ids[np.argsort(self.arg[ids])]

    def stages(self) -> np.ndarray:
        """Registered path length from the inputs to each node's output.

        Inputs and the constant are stage 0; every adder, subtractor,
        and flip-flop adds one; captures sit at their source's stage.
        """
        stage = np.zeros(self.num_nodes, dtype=np.int64)
        for i in range(self.num_nodes):
            k = self.kind[i]
            if k in (Kind.ZERO, Kind.INPUT):
                continue
            s = stage[self.in0[i]]
            if self.in1[i] >= 0:
                s = max(s, stage[self.in1[i]])
            stage[i] = s if k == Kind.OUTPUT else s + 1
        return stage

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Netlist):
            return NotImplemented
        return (
            np.array_equal(self.kind, other.kind)
            and np.array_equal(self.in0, other.in0)
            and np.array_equal(self.in1, other.in1)
            and np.array_equal(self.arg, other.arg)
            and (self.rows, self.cols, self.input_bitwidth) ==
                (other.rows, other.cols, other.input_bitwidth)
            and (self.weight_bitwidth, self.tree_depth, self.extra_extension) ==
                (other.weight_bitwidth, other.tree_depth, other.extra_extension)
        )


@dataclass
class NetlistStats:
    adders: int
    subtractors: int
    delay_ffs: int
    total_nodes: int


def compile_netlist(
    pair: MatrixPair, input_bitwidth: int, extra_extension: int = 0
) -> Netlist:
    """Compile a matrix pair into a netlist for o = a'P - a'N.

    :param pair: the fixed weights.
    :param input_bitwidth: width of the signed serial input elements.
    :param extra_extension: default extra sign-extension cycles recorded
        for the simulator (widens the output window).
    """
    if input_bitwidth < 1:
        raise ValueError(f"input_bitwidth must be positive, got {input_bitwidth}")
    if extra_extension < 0:
        raise ValueError(f"extra_extension must be non-negative, got {extra_extension}")
    rows, cols, bw = pair.rows, pair.cols, pair.bitwidth
    depth = (rows - 1).bit_length()

    kinds = [int(Kind.ZERO)]
    in0 = [-1]
    in1 = [-1]
    arg = [-1]
    for r in range(rows):
        kinds.append(int(Kind.INPUT))
        in0.append(-1)
        in1.append(-1)
        arg.append(r)

    def new(kind: Kind, a: int = -1, b: int = -1, g: int = -1) -> int:
        kinds.append(int(kind))
        in0.append(a)
        in1.append(b)
        arg.append(g)
        return len(kinds) - 1

    def tree(live: list[int], lo: int, hi: int, i0: int, i1: int) -> int:
        # live[i0:i1] holds the set rows inside slot range [lo, hi);
        # returns a node id, with 0 (the constant) for a dead subtree.
        if i1 == i0:
            return 0
        if hi - lo == 1:
            return live[i0] + 1
        mid = (lo + hi) >> 1
        im = i0
        while im < i1 and live[im] < mid:
            im += 1
        a = tree(live, lo, mid, i0, im)
        b = tree(live, mid, hi, im, i1)
        if a == 0:
            return new(Kind.DFF, b)
        if b == 0:
            return new(Kind.DFF, a)
        return new(Kind.ADD, a, b)

    slots = 1 << depth
    shifts = np.arange(bw, dtype=np.int64)
    for c in range(cols):
        side_accs = []
        for mat in (pair.p, pair.n):
            col_bits = (mat.data[:, c : c + 1] >> shifts) & 1
            acc = 0
            for k in range(bw - 1, -1, -1):
                live = np.flatnonzero(col_bits[:, k]).tolist()
                plane = tree(live, 0, slots, 0, len(live))
                if plane == 0 and acc == 0:
                    continue
                if plane == 0 or acc == 0:
                    acc = new(Kind.DFF, plane or acc)
                else:
                    acc = new(Kind.ADD, plane, acc)
            side_accs.append(acc)
        p_acc, n_acc = side_accs
        src = 0 if p_acc == 0 and n_acc == 0 else new(Kind.SUB, p_acc, n_acc)
        new(Kind.OUTPUT, src, -1, c)

    return Netlist(
        kind=np.array(kinds, dtype=np.int8),
        in0=np.array(in0, dtype=np.int32),
        in1=np.array(in1, dtype=np.int32),
        arg=np.array(arg, dtype=np.int32),
        rows=rows,
        cols=cols,
        input_bitwidth=input_bitwidth,
        weight_bitwidth=bw,
        tree_depth=depth,
        extra_extension=extra_extension,
    )


def census(netlist: Netlist) -> NetlistStats:
    """Exact node counts for the compiled circuit."""
    kind = netlist.kind
    return NetlistStats(
        adders=int((kind == Kind.ADD).sum()),
        subtractors=int((kind == Kind.SUB).sum()),
        delay_ffs=int((kind == Kind.DFF).sum()),
        total_nodes=netlist.num_nodes,
    )


_META_FIELDS = (
    "rows",
    "cols",
    "input_bitwidth",
    "weight_bitwidth",
    "tree_depth",
    "extra_extension",
)


def export_netlist(netlist: Netlist, path: str) -> None:
    nodes = []
    for i in range(netlist.num_nodes):
        kind = Kind(netlist.kind[i])
        node: dict = {"id": i, "kind": _KIND_NAMES[kind]}
        if kind in (Kind.INPUT, Kind.OUTPUT):
            node["args"] = [int(netlist.arg[i])]
        inputs = [int(v) for v in (netlist.in0[i], netlist.in1[i]) if v >= 0]
        if inputs:
            node["inputs"] = inputs
        nodes.append(node)
    doc = {
        "meta": {f: int(getattr(netlist, f)) for f in _META_FIELDS},
        "nodes": nodes,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


_EXPECTED_INPUTS = {
    Kind.ZERO: 0,
    Kind.INPUT: 0,
    Kind.ADD: 2,
    Kind.SUB: 2,
    Kind.DFF: 1,
    Kind.OUTPUT: 1,
}


def import_netlist(path: str) -> Netlist:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise NetlistFormatError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    try:
        meta = doc["meta"]
        raw_nodes = doc["nodes"]
        fields = {f: int(meta[f]) for f in _META_FIELDS}
    except (KeyError, TypeError, ValueError) as exc:
        raise NetlistFormatError(f"{path}: bad meta section: {exc}") from exc
    count = len(raw_nodes)
    kind = np.zeros(count, dtype=np.int8)
    in0 = np.full(count, -1, dtype=np.int32)
    in1 = np.full(count, -1, dtype=np.int32)
    arg = np.full(count, -1, dtype=np.int32)
    seen_cols = set()
    for i, node in enumerate(raw_nodes):
        if node.get("id") != i:
            raise NetlistFormatError(f"{path}: node {i}: ids must be dense and ordered")
        name = node.get("kind")
        if name not in _NAME_KINDS:
            raise NetlistFormatError(f"{path}: node {i}: unknown kind {name!r}")
        k = _NAME_KINDS[name]
        kind[i] = k
        inputs = node.get("inputs", [])
        if len(inputs) != _EXPECTED_INPUTS[k]:
            raise NetlistFormatError(
                f"{path}: node {i}: {name} takes {_EXPECTED_INPUTS[k]} inputs"
            )
        for dest, value in zip((in0, in1), inputs):
            if not 0 <= value < i:
                raise NetlistFormatError(
                    f"{path}: node {i}: input {value} must reference an earlier node"
                )
            dest[i] = value
        if k == Kind.INPUT:
            row = node.get("args", [None])[0]
            if not isinstance(row, int) or not 0 <= row < fields["rows"]:
                raise NetlistFormatError(f"{path}: node {i}: bad input row {row!r}")
            arg[i] = row
        elif k == Kind.OUTPUT:
            col = node.get("args", [None])[0]
            if not isinstance(col, int) or not 0 <= col < fields["cols"]:
                raise NetlistFormatError(f"{path}: node {i}: bad output column {col!r}")
            if col in seen_cols:
                raise NetlistFormatError(f"{path}: node {i}: duplicate output column {col}")
            seen_cols.add(col)
            arg[i] = col
    if seen_cols != set(range(fields["cols"])):
        raise NetlistFormatError(f"{path}: every column needs exactly one output node")
    return Netlist(kind=kind, in0=in0, in1=in1, arg=arg, **fields)


def dump_structure(netlist: Netlist) -> str:
    """Line-based structural dump for diffing: NODE <id> <KIND> <in0> <in1>."""
    lines = []
    for i in range(netlist.num_nodes):
        kind = Kind(netlist.kind[i])
        label = kind.name
        if kind in (Kind.INPUT, Kind.OUTPUT):
            label = f"{kind.name}({int(netlist.arg[i])})"
        a = str(int(netlist.in0[i])) if netlist.in0[i] >= 0 else "-"
        b = str(int(netlist.in1[i])) if netlist.in1[i] >= 0 else "-"
        lines.append(f"NODE {i} {label} {a} {b}")
    return "\n".join(lines) + "\n"
