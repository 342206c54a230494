"""Structure-first CSR matrices.

Offsets (``rpt``) are int64 and column indices (``col``) are int32, so a matrix
may hold more than 2**31 entries while each index stays narrow. Values are
optional; nothing in this package reads them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

OFFSET_DTYPE = np.int64
INDEX_DTYPE = np.int32
MAX_INDEX = np.iinfo(INDEX_DTYPE).max


class AssemblyError(ValueError):
    """Raised when triplets cannot be assembled into a valid matrix."""


class Triplet(NamedTuple):
    row: int
    col: int
    val: Optional[float] = None


@dataclass(frozen=True, eq=False)
class CsrMatrix:
    rows: int
    cols: int
    rpt: np.ndarray
    col: np.ndarray
    val: Optional[np.ndarray] = None

    def __post_init__(self):
        for arr in (self.rpt, self.col, self.val):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def nnz(self) -> int:
        return int(self.rpt[self.rows]) if self.rows else 0

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def row_lengths(self) -> np.ndarray:
        return np.diff(self.rpt)

    def row_cols(self, i: int) -> np.ndarray:
        return self.col[self.rpt[i]:self.rpt[i + 1]]

    def same_structure(self, other: "CsrMatrix") -> bool:
        return (
            self.shape == other.shape
            and np.array_equal(self.rpt, other.rpt)
            and np.array_equal(self.col, other.col)
        )

    def to_triplets(self) -> list[Triplet]:
        rows = np.repeat(np.arange(self.rows), self.row_lengths())
        if self.val is None:
            return [Triplet(int(r), int(c)) for r, c in zip(rows, self.col)]
        return [Triplet(int(r), int(c), float(v)) for r, c, v in zip(rows, self.col, self.val)]

    def to_dense_pattern(self) -> np.ndarray:
        """Boolean dense view. Only sensible for small matrices."""
        out = np.zeros(self.shape, dtype=bool)
        rows = np.repeat(np.arange(self.rows), self.row_lengths())
        out[rows, self.col] = True
        return out

    def __repr__(self):
        return f"CsrMatrix(shape={self.shape}, nnz={self.nnz}, valued={self.val is not None})"


def from_coo(rows: int, cols: int, row_idx, col_idx, vals=None) -> CsrMatrix:
    """Assemble from coordinate arrays; duplicates keep their first occurrence."""
    if rows < 0 or cols < 0:
        raise AssemblyError(f"negative shape ({rows}, {cols})")
    if rows > MAX_INDEX + 1 or cols > MAX_INDEX + 1:
        raise AssemblyError(f"shape ({rows}, {cols}) exceeds 32-bit index range")
    r = np.asarray(row_idx, dtype=np.int64).ravel()
    c = np.asarray(col_idx, dtype=np.int64).ravel()
    if r.shape != c.shape:
        raise AssemblyError("row and column index arrays differ in length")
    v = None if vals is None else np.asarray(vals).ravel()
    if v is not None and v.shape != r.shape:
        raise AssemblyError("value array differs in length from index arrays")

    bad = (r < 0) | (r >= rows) | (c < 0) | (c >= cols)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise AssemblyError(
            f"triplet {k} ({int(r[k])}, {int(c[k])}) out of bounds for shape ({rows}, {cols})"
        )

    keys = r * cols + c
    keys, first = np.unique(keys, return_index=True)
    r_sorted = keys // cols if cols else keys
    c_sorted = keys - r_sorted * cols
    counts = np.bincount(r_sorted, minlength=rows) if rows else np.zeros(0, dtype=np.int64)
    rpt = np.zeros(rows + 1, dtype=OFFSET_DTYPE)
    np.cumsum(counts, out=rpt[1:])
    return CsrMatrix(
        rows=rows,
        cols=cols,
        rpt=rpt,
        col=c_sorted.astype(INDEX_DTYPE),
        val=None if v is None else v[first].copy(),
    )


def from_triplets(
    triplets: Iterable[Triplet | Sequence], rows: int, cols: int, dedup_policy: str = "keep-once"
) -> CsrMatrix:
    """Build a CsrMatrix from (row, col[, val]) triplets.

    Entries are sorted by column within each row, and a repeated (row, col)
    position is stored once with the first value seen. Values are dropped
    unless every triplet carries one.
    """
    if dedup_policy != "keep-once":
        raise ValueError(f"unsupported dedup policy {dedup_policy!r}")
    triplets = [Triplet(*t) for t in triplets]
    for k, t in enumerate(triplets):
        if not (0 <= t.row < rows and 0 <= t.col < cols):
            raise AssemblyError(f"triplet {k} {tuple(t)} out of bounds for shape ({rows}, {cols})")
    has_vals = bool(triplets) and all(t.val is not None for t in triplets)
    return from_coo(
        rows,
        cols,
        [t.row for t in triplets],
        [t.col for t in triplets],
        [t.val for t in triplets] if has_vals else None,
    )


def from_dense(pattern) -> CsrMatrix:
    dense = np.asarray(pattern)
    if dense.ndim != 2:
        raise AssemblyError("dense input must be two-dimensional")
    r, c = np.nonzero(dense)
    return from_coo(dense.shape[0], dense.shape[1], r, c)


def identity(n: int) -> CsrMatrix:
    idx = np.arange(n)
    return from_coo(n, n, idx, idx)


def validate(m: CsrMatrix) -> list[str]:
    """Return every violated CSR invariant; an empty list means the matrix is valid.

    Each message names the first offending row.
    """
    problems = []
    rpt = np.asarray(m.rpt)
    col = np.asarray(m.col)
    if rpt.ndim != 1 or len(rpt) != m.rows + 1:
        problems.append(f"rpt length {len(rpt)} != rows+1 ({m.rows + 1})")
        return problems
    if rpt[0] != 0:
        problems.append(f"rpt[0] = {int(rpt[0])}, expected 0")
    steps = np.diff(rpt)
    if (steps < 0).any():
        problems.append(f"non-monotone rpt at row {int(np.flatnonzero(steps < 0)[0])}")
    if rpt[-1] != len(col):
        problems.append(f"rpt[rows] = {int(rpt[-1])} != len(col) = {len(col)}")
    if m.val is not None and len(m.val) != len(col):
        problems.append(f"len(val) = {len(m.val)} != len(col) = {len(col)}")
    if problems:
        # row boundaries are unreliable past this point
        return problems

    row_of = np.repeat(np.arange(m.rows), steps)
    out_of_range = (col < 0) | (col >= m.cols)
    if out_of_range.any():
        problems.append(f"column index out of range at row {int(row_of[np.flatnonzero(out_of_range)[0]])}")
    if len(col) > 1:
        same_row = row_of[1:] == row_of[:-1]
        unsorted = same_row & (col[1:] <= col[:-1])
        if unsorted.any():
            problems.append(
                f"columns not strictly increasing at row {int(row_of[1:][np.flatnonzero(unsorted)[0]])}"
            )
    return problems


def reshape_keep_left(m: CsrMatrix, new_cols: int) -> CsrMatrix:
    """Keep only columns ``[0, new_cols)``."""
    if not 0 <= new_cols <= m.cols:
        raise ValueError(f"new_cols={new_cols} not in [0, {m.cols}]")
    if new_cols == m.cols:
        return m
    keep = m.col < new_cols
    kept_before = np.zeros(len(keep) + 1, dtype=OFFSET_DTYPE)
    np.cumsum(keep, out=kept_before[1:])
    rpt = kept_before[m.rpt]
    return CsrMatrix(
        rows=m.rows,
        cols=new_cols,
        rpt=rpt,
        col=m.col[keep].copy(),
        val=None if m.val is None else m.val[keep].copy(),
    )


def reshape_keep_top(m: CsrMatrix, new_rows: int) -> CsrMatrix:
    """Keep only rows ``[0, new_rows)``."""
    if not 0 <= new_rows <= m.rows:
        raise ValueError(f"new_rows={new_rows} not in [0, {m.rows}]")
    if new_rows == m.rows:
        return m
    end = int(m.rpt[new_rows])
    return CsrMatrix(
        rows=new_rows,
        cols=m.cols,
        rpt=m.rpt[: new_rows + 1].copy(),
        col=m.col[:end].copy(),
        val=None if m.val is None else m.val[:end].copy(),
    )
