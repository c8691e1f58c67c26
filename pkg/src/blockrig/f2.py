"""Exact linear algebra over GF(2) with int-packed rows.

Bit conventions, used package-wide: coordinate 1 of a vector is stored at
the least significant bit.  A matrix row is packed into a single int with
column 1 at the LSB.  All values are immutable and all operations are pure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, List, Tuple

from .errors import DimensionError

__all__ = [
    "BitVector",
    "BitMatrix",
    "BlockLayout",
    "rank",
    "mat_add",
    "mat_mul",
    "mat_vec",
    "transpose",
    "kron_identity",
    "row_sparsity",
    "block_row_sparsity",
    "serialize",
    "deserialize",
    "parse_matrix",
    "format_matrix",
    "random_matrix",
]


@dataclass(frozen=True)
class BitVector:
    """A vector over GF(2); coordinate i (0-based) is bit i of ``bits``."""

    n: int
    bits: int

    def __post_init__(self):
        if self.n < 0:
            raise DimensionError("negative vector length")
        if self.bits < 0 or self.bits >> self.n:
            raise DimensionError(f"bits do not fit in {self.n} coordinates")

    def bit(self, i: int) -> int:
        return (self.bits >> i) & 1

    def to_string(self) -> str:
        """ASCII 0/1 string, coordinate 1 first."""
        return "".join(str(self.bit(i)) for i in range(self.n))

    @classmethod
    def from_string(cls, s: str) -> "BitVector":
        bits = 0
        for i, ch in enumerate(s):
            if ch == "1":
                bits |= 1 << i
            elif ch != "0":
                raise ValueError(f"invalid bit character {ch!r}")
        return cls(len(s), bits)


@dataclass(frozen=True)
class BitMatrix:
    """A matrix over GF(2), stored as one packed int per row.

    Zero-dimension matrices are permitted; they arise as empty factors in
    rank factorizations.
    """

    rows: int
    cols: int
    row_words: Tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionError("negative matrix dimension")
        if len(self.row_words) != self.rows:
            raise DimensionError("row count does not match stored rows")
        mask = (1 << self.cols) - 1
        for w in self.row_words:
            if w & ~mask:
                raise DimensionError("row word has bits beyond column count")

    def entry(self, i: int, j: int) -> int:
        return (self.row_words[i] >> j) & 1

    def row(self, i: int) -> int:
        return self.row_words[i]

    def to_lists(self) -> List[List[int]]:
        return [[self.entry(i, j) for j in range(self.cols)] for i in range(self.rows)]

    @classmethod
    def from_lists(cls, entries: Iterable[Iterable[int]]) -> "BitMatrix":
        rows = [list(r) for r in entries]
        if not rows:
            return cls(0, 0, ())
        cols = len(rows[0])
        words = []
        for r in rows:
            if len(r) != cols:
                raise DimensionError("ragged rows")
            words.append(sum((1 << j) for j, e in enumerate(r) if e & 1))
        return cls(len(rows), cols, tuple(words))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def ones(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, ((1 << cols) - 1,) * rows)


@dataclass(frozen=True)
class BlockLayout:
    """Coordinates grouped into k blocks of length n; total length nk."""

    n: int
    k: int

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise DimensionError("block layout requires n >= 1 and k >= 1")

    @property
    def total(self) -> int:
        return self.n * self.k


def rank(m: BitMatrix) -> int:
    """Rank over GF(2) by row reduction on packed words."""
    work = list(m.row_words)
    r = 0
    for col in range(m.cols):
        pivot = None
        for i in range(r, len(work)):
            if (work[i] >> col) & 1:
                pivot = i
                break
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        for i in range(len(work)):
            if i != r and ((work[i] >> col) & 1):
                work[i] ^= work[r]
        r += 1
        if r == len(work):
            break
    return r


def mat_add(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Entrywise sum over GF(2) (XOR)."""
    if a.rows != b.rows or a.cols != b.cols:
        raise DimensionError(f"shape mismatch: {a.rows}x{a.cols} vs {b.rows}x{b.cols}")
    return BitMatrix(a.rows, a.cols, tuple(x ^ y for x, y in zip(a.row_words, b.row_words)))


def mat_vec(m: BitMatrix, x: int) -> int:
    """Matrix times packed vector over GF(2)."""
    if x >> m.cols:
        raise DimensionError("vector has bits beyond matrix columns")
    y = 0
    for i, w in enumerate(m.row_words):
        y |= ((w & x).bit_count() & 1) << i
    return y


def transpose(m: BitMatrix) -> BitMatrix:
    words = []
    for j in range(m.cols):
        w = 0
        for i in range(m.rows):
            w |= m.entry(i, j) << i
        words.append(w)
    return BitMatrix(m.cols, m.rows, tuple(words))


def mat_mul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Product over GF(2)."""
    if a.cols != b.rows:
        raise DimensionError(f"inner dimensions disagree: {a.cols} vs {b.rows}")
    bt = transpose(b)
    words = []
    for i in range(a.rows):
        w = 0
        for j in range(b.cols):
            w |= ((a.row_words[i] & bt.row_words[j]).bit_count() & 1) << j
        words.append(w)
    return BitMatrix(a.rows, b.cols, tuple(words))


def kron_identity(a: BitMatrix, n: int) -> BitMatrix:
    """The nk x nk matrix whose (i, j) block is a_ij * I_n.

    Acts on block-major vectors: block j of a length-nk vector occupies
    bits j*n .. j*n + n - 1.
    """
    if a.rows != a.cols:
        raise DimensionError("kron_identity requires a square matrix")
    if n < 1:
        raise DimensionError("n must be positive")
    k = a.rows
    words = []
    for j in range(k):
        row_pattern = a.row_words[j]
        for i in range(n):
            w = 0
            for l in range(k):
                if (row_pattern >> l) & 1:
                    w |= 1 << (l * n + i)
            words.append(w)
    return BitMatrix(n * k, n * k, tuple(words))


def row_sparsity(m: BitMatrix) -> int:
    """Maximum number of ones in any row."""
    if m.rows == 0:
        return 0
    return max(w.bit_count() for w in m.row_words)


def block_row_sparsity(m: BitMatrix, layout: BlockLayout) -> int:
    """Maximum, over block-rows, of the number of nonzero n x n blocks."""
    n, k = layout.n, layout.k
    if m.rows != layout.total or m.cols != layout.total:
        raise DimensionError(
            f"matrix is {m.rows}x{m.cols}, layout needs {layout.total}x{layout.total}"
        )
    worst = 0
    block_mask = (1 << n) - 1
    for bi in range(k):
        nonzero = 0
        for bj in range(k):
            if any((m.row_words[bi * n + i] >> (bj * n)) & block_mask for i in range(n)):
                nonzero += 1
        worst = max(worst, nonzero)
    return worst


def serialize(m: BitMatrix, order: str = "row-major") -> str:
    """Flatten to an ASCII 0/1 string, index 1 first."""
    if order == "row-major":
        return "".join(str(m.entry(i, j)) for i in range(m.rows) for j in range(m.cols))
    if order == "column-major":
        return "".join(str(m.entry(i, j)) for j in range(m.cols) for i in range(m.rows))
    raise ValueError(f"unknown order {order!r}")


def deserialize(s: str, rows: int, cols: int, order: str = "row-major") -> BitMatrix:
    if len(s) != rows * cols:
        raise DimensionError(f"need {rows * cols} bits, got {len(s)}")
    entries = [[0] * cols for _ in range(rows)]
    for idx, ch in enumerate(s):
        if ch not in "01":
            raise ValueError(f"invalid bit character {ch!r}")
        if order == "row-major":
            i, j = divmod(idx, cols)
        elif order == "column-major":
            j, i = divmod(idx, rows)
        else:
            raise ValueError(f"unknown order {order!r}")
        entries[i][j] = int(ch)
    return BitMatrix.from_lists(entries)


def parse_matrix(text: str) -> BitMatrix:
    """Parse the matrix text format: first line "rows cols", then 0/1 rows."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix text")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError("header must be 'rows cols'")
    rows, cols = int(head[0]), int(head[1])
    if len(lines) - 1 != rows:
        raise ValueError(f"expected {rows} rows, got {len(lines) - 1}")
    words = []
    for ln in lines[1:]:
        if len(ln) != cols:
            raise ValueError(f"row {ln!r} does not have {cols} characters")
        words.append(BitVector.from_string(ln).bits)
    return BitMatrix(rows, cols, tuple(words))


def format_matrix(m: BitMatrix) -> str:
    body = "\n".join(
        "".join(str(m.entry(i, j)) for j in range(m.cols)) for i in range(m.rows)
    )
    return f"{m.rows} {m.cols}\n{body}\n"


def random_matrix(rng: random.Random, rows: int, cols: int) -> BitMatrix:
    return BitMatrix(rows, cols, tuple(rng.getrandbits(cols) for _ in range(rows)))
