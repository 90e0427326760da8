"""Fixed-point integer matrices, sparsity metrics, and on-disk formats.

Matrices here are small dense arrays of bounded integers: the weights
that get frozen into a bit-serial circuit.  A signed matrix V is always
lowered to a pair of unsigned matrices (P, N) with V = P - N before
compilation, so the hardware only ever sums positive partial products
and subtracts once at the end.

Supported file formats:

* JSON object with keys rows, cols, bitwidth, signed, data (row-major).
* Matrix Market "coordinate integer" files, read-only, for importing
  sparse matrices from other tools.  Absent entries are zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .rng import stream

MAX_BITWIDTH = 32


class MatrixFormatError(ValueError):
    """Raised when a matrix file cannot be parsed or fails validation."""


def _value_range(bitwidth: int, signed: bool) -> tuple[int, int]:
    if signed:
        return -(1 << (bitwidth - 1)), (1 << (bitwidth - 1)) - 1
    return 0, (1 << bitwidth) - 1


@dataclass(eq=False)
class IntMatrix:
    """A rows x cols matrix of integers representable in `bitwidth` bits.

    `data` is an int64 array; it is made read-only on construction so a
    matrix can be shared freely once built.
    """

    rows: int
    cols: int
    bitwidth: int
    signed: bool
    data: np.ndarray

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"matrix dims must be positive, got {self.rows}x{self.cols}")
        if not 1 <= self.bitwidth <= MAX_BITWIDTH:
            raise ValueError(f"bitwidth must be in [1, {MAX_BITWIDTH}], got {self.bitwidth}")
        data = np.ascontiguousarray(self.data, dtype=np.int64)
        if data.shape != (self.rows, self.cols):
            raise ValueError(f"data shape {data.shape} does not match {self.rows}x{self.cols}")
        lo, hi = _value_range(self.bitwidth, self.signed)
        if data.size and (data.min() < lo or data.max() > hi):
            bad = data[(data < lo) | (data > hi)][0]
            raise ValueError(
                f"value {bad} out of range [{lo}, {hi}] for "
                f"{'signed' if self.signed else 'unsigned'} bitwidth {self.bitwidth}"
            )
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    def value_range(self) -> tuple[int, int]:
        return _value_range(self.bitwidth, self.signed)

    def transposed(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, self.bitwidth, self.signed, self.data.T)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and self.bitwidth == other.bitwidth
            and self.signed == other.signed
            and bool(np.array_equal(self.data, other.data))
        )

    def __repr__(self) -> str:
        kind = "signed" if self.signed else "unsigned"
        return f"IntMatrix({self.rows}x{self.cols}, {kind} {self.bitwidth}-bit)"


@dataclass(eq=False)
class MatrixPair:
    """Unsigned matrices (P, N) standing for the signed matrix P - N."""

    p: IntMatrix
    n: IntMatrix

    def __post_init__(self) -> None:
        if self.p.signed or self.n.signed:
            raise ValueError("pair matrices must be unsigned")
        if (self.p.rows, self.p.cols) != (self.n.rows, self.n.cols):
            raise ValueError("pair matrices must share dimensions")
        if self.p.bitwidth != self.n.bitwidth:
            raise ValueError("pair matrices must share bitwidth")

    @property
    def rows(self) -> int:
        return self.p.rows

    @property
    def cols(self) -> int:
        return self.p.cols

    @property
    def bitwidth(self) -> int:
        return self.p.bitwidth

    def difference(self) -> np.ndarray:
        """The signed matrix this pair encodes, as a plain int64 array."""
        return self.p.data - self.n.data

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatrixPair):
            return NotImplemented
        return self.p == other.p and self.n == other.n


@dataclass
class SparsityStats:
    element_sparsity: float
    bit_sparsity: float
    ones_count: int


def gen_bit_sparse(
    rows: int, cols: int, bitwidth: int, bit_sparsity: float, seed: int
) -> IntMatrix:
    """Generate an unsigned matrix whose bits are independently sparse.

    Each of the rows*cols*bitwidth bit positions is set with probability
    1 - bit_sparsity.  Identical (parameters, seed) always reproduce the
    identical matrix.
    """
    if not 0.0 <= bit_sparsity <= 1.0:
        raise ValueError(f"bit_sparsity must be in [0, 1], got {bit_sparsity}")
    if not 1 <= bitwidth <= MAX_BITWIDTH:
        raise ValueError(f"bitwidth must be in [1, {MAX_BITWIDTH}], got {bitwidth}")
    rng = stream(seed, "gen-bit-sparse")
    set_bits = rng.random((rows, cols, bitwidth)) < (1.0 - bit_sparsity)
    weights = np.int64(1) << np.arange(bitwidth, dtype=np.int64)
    values = (set_bits.astype(np.int64) * weights).sum(axis=2)
    return IntMatrix(rows, cols, bitwidth, False, values)


def gen_element_sparse(
    rows: int,
    cols: int,
    bitwidth: int,
    signed: bool,
    element_sparsity: float,
    seed: int,
) -> IntMatrix:
    """Generate a matrix with an exact fraction of elements forced to zero.

    Values are drawn uniformly over the representable range (zero draws
    included), then round(rows*cols*element_sparsity) positions, chosen
    uniformly without replacement, are zeroed.  The measured element
    sparsity is therefore at least the requested fraction.
    """
    if not 0.0 <= element_sparsity <= 1.0:
        raise ValueError(f"element_sparsity must be in [0, 1], got {element_sparsity}")
    if not 1 <= bitwidth <= MAX_BITWIDTH:
        raise ValueError(f"bitwidth must be in [1, {MAX_BITWIDTH}], got {bitwidth}")
    if rows < 1 or cols < 1:
        raise ValueError(f"matrix dims must be positive, got {rows}x{cols}")
    lo, hi = _value_range(bitwidth, signed)
    rng = stream(seed, "gen-element-sparse")
    values = rng.integers(lo, hi, size=rows * cols, endpoint=True, dtype=np.int64)
    zero_count = int(round(rows * cols * element_sparsity))
    if zero_count:
        values[rng.permutation(rows * cols)[:zero_count]] = 0
    return IntMatrix(rows, cols, bitwidth, signed, values.reshape(rows, cols))


def pn_split(m: IntMatrix) -> MatrixPair:
    """Split a matrix into unsigned (P, N) with P - N equal to the source.

    Positive entries land in P, magnitudes of negative entries in N.  An
    unsigned source splits trivially (N is all zeros).
    """
    p = np.maximum(m.data, 0)
    n = np.maximum(-m.data, 0)
    return MatrixPair(
        IntMatrix(m.rows, m.cols, m.bitwidth, False, p),
        IntMatrix(m.rows, m.cols, m.bitwidth, False, n),
    )


def _popcount(values: np.ndarray, bitwidth: int) -> int:
    total = 0
    for k in range(bitwidth):
        total += int(((values >> k) & 1).sum())
    return total


def stats(m: IntMatrix) -> SparsityStats:
    """Sparsity metrics on the magnitude encoding.

    ones_count is the number of set bits across all element magnitudes,
    which is exactly the number of set bits the (P, N) split carries into
    hardware; bit_sparsity is the complementary zero fraction over
    rows*cols*bitwidth bit positions.
    """
    mags = np.abs(m.data)
    ones = _popcount(mags, m.bitwidth)
    total_bits = m.rows * m.cols * m.bitwidth
    zero_elems = int((m.data == 0).sum())
    return SparsityStats(
        element_sparsity=zero_elems / (m.rows * m.cols),
        bit_sparsity=1.0 - ones / total_bits,
        ones_count=ones,
    )


def write_matrix(m: IntMatrix, path: str) -> None:
    doc = {
        "rows": m.rows,
        "cols": m.cols,
        "bitwidth": m.bitwidth,
        "signed": m.signed,
        "data": [int(v) for v in m.data.ravel()],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def _read_matrix_json(path: str) -> IntMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MatrixFormatError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise MatrixFormatError(f"{path}: expected a JSON object")
    for key in ("rows", "cols", "bitwidth", "signed", "data"):
        if key not in doc:
            raise MatrixFormatError(f"{path}: missing key '{key}'")
    rows, cols = doc["rows"], doc["cols"]
    data = doc["data"]
    if not isinstance(data, list) or len(data) != rows * cols:
        raise MatrixFormatError(
            f"{path}: data must hold rows*cols = {rows * cols} values"
        )
    try:
        values = np.array(data, dtype=np.int64).reshape(rows, cols)
        return IntMatrix(rows, cols, doc["bitwidth"], bool(doc["signed"]), values)
    except (TypeError, ValueError) as exc:
        raise MatrixFormatError(f"{path}: {exc}") from exc


def _min_bitwidth(values: list[int], signed: bool) -> int:
    for bw in range(1, MAX_BITWIDTH + 1):
        lo, hi = _value_range(bw, signed)
        if all(lo <= v <= hi for v in values):
            return bw
    raise MatrixFormatError(f"values exceed {MAX_BITWIDTH}-bit range")


def _read_matrix_market(path: str) -> IntMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise MatrixFormatError(f"{path}: line 1: empty file")
    header = lines[0].split()
    expected = ["%%MatrixMarket", "matrix", "coordinate", "integer", "general"]
    if [t.lower() for t in header] != [t.lower() for t in expected]:
        raise MatrixFormatError(
            f"{path}: line 1: unsupported header, expected '{' '.join(expected)}'"
        )
    lineno = 1
    size_line = None
    for lineno, line in enumerate(lines[1:], start=2):
        text = line.strip()
        if not text or text.startswith("%"):
            continue
        size_line = text
        break
    if size_line is None:
        raise MatrixFormatError(f"{path}: missing size line")
    parts = size_line.split()
    if len(parts) != 3:
        raise MatrixFormatError(f"{path}: line {lineno}: size line needs 'rows cols nnz'")
    try:
        rows, cols, nnz = (int(p) for p in parts)
    except ValueError as exc:
        raise MatrixFormatError(f"{path}: line {lineno}: {exc}") from exc
    entries: dict[tuple[int, int], int] = {}
    count = 0
    for entry_no, line in enumerate(lines[lineno:], start=lineno + 1):
        text = line.strip()
        if not text or text.startswith("%"):
            continue
        parts = text.split()
        if len(parts) != 3:
            raise MatrixFormatError(f"{path}: line {entry_no}: entry needs 'row col value'")
        try:
            i, j, v = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError as exc:
            raise MatrixFormatError(f"{path}: line {entry_no}: {exc}") from exc
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise MatrixFormatError(f"{path}: line {entry_no}: index ({i}, {j}) out of range")
        if (i, j) in entries:
            raise MatrixFormatError(f"{path}: line {entry_no}: duplicate entry ({i}, {j})")
        entries[(i, j)] = v
        count += 1
    if count != nnz:
        raise MatrixFormatError(f"{path}: expected {nnz} entries, found {count}")
    values = list(entries.values())
    signed = any(v < 0 for v in values)
    bitwidth = _min_bitwidth(values, signed) if values else 1
    data = np.zeros((rows, cols), dtype=np.int64)
    for (i, j), v in entries.items():
        data[i - 1, j - 1] = v
    return IntMatrix(rows, cols, bitwidth, signed, data)


def read_matrix(path: str) -> IntMatrix:
    """Read a matrix from JSON or Matrix Market format (sniffed by header)."""
    with open(path, "r", encoding="utf-8") as fh:
        head = fh.read(len("%%MatrixMarket"))
    if head.startswith("%%MatrixMarket"):
        return _read_matrix_market(path)
    return _read_matrix_json(path)
