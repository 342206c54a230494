"""Exact output-row NNZ by hash-accumulator row merging.

Output row i is the union of the column sets of B's rows selected by A's row i.
Each row is merged into an open-addressing table whose active size is the
row's FLOP count, which bounds its distinct columns, so linear probing always
finds a free slot.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import EMPTY, row_nnz_kernel, run_blocks, symbolic_list, symbolic_range
from .csr import CsrMatrix
from .flop import FlopProfile, default_threads

# Small prime multiplier; any positive value gives the same counts.
HASH_SCALE = 107


class HashAccumulator:
    """One worker's hash table, allocated once at the largest row FLOP."""

    def __init__(self, capacity: int, hash_scale: int = HASH_SCALE):
        self.table = np.full(max(int(capacity), 0), EMPTY, dtype=np.int64)
        self.hash_scale = int(hash_scale)
        self.active_size = 0

    @property
    def capacity(self) -> int:
        return len(self.table)


@dataclass(frozen=True, eq=False)
class RowNnzResult:
    nnz_per_row: np.ndarray
    total_nnz: int


def _check(A: CsrMatrix, B: CsrMatrix, profile: FlopProfile):
    if A.cols != B.rows:
        raise ValueError(f"dimension mismatch: A is {A.rows}x{A.cols}, B is {B.rows}x{B.cols}")
    if profile.rows != A.rows:
        raise ValueError(f"profile has {profile.rows} rows, A has {A.rows}")


def row_nnz(A: CsrMatrix, B: CsrMatrix, row: int, accumulator: HashAccumulator, tsize: int) -> int:
    """Exact NNZ of output row ``row``; ``tsize`` must be that row's FLOP."""
    if tsize == 0:
        return 0
    if tsize > accumulator.capacity:
        raise ValueError(f"tsize {tsize} exceeds accumulator capacity {accumulator.capacity}")
    accumulator.active_size = tsize
    return int(row_nnz_kernel(A.rpt, A.col, B.rpt, B.col, int(row), accumulator.table,
                              int(tsize), accumulator.hash_scale))


def exact_symbolic(A: CsrMatrix, B: CsrMatrix, profile: FlopProfile, threads: int | None = None,
                   hash_scale: int = HASH_SCALE) -> RowNnzResult:
    """NNZ of every row of C = AB, and NNZ(C)."""
    _check(A, B, profile)
    out = np.zeros(A.rows, dtype=np.int64)

    def work(lo, hi):
        acc = HashAccumulator(profile.max_flop_row, hash_scale)
        return symbolic_range(A.rpt, A.col, B.rpt, B.col, profile.flop_per_row, lo, hi,
                              acc.table, acc.hash_scale, out)

    total = sum(run_blocks(A.rows, threads or default_threads(), work))
    return RowNnzResult(nnz_per_row=out, total_nnz=int(total))


def sampled_symbolic(A: CsrMatrix, B: CsrMatrix, profile: FlopProfile, sample_rows,
                     threads: int | None = None, hash_scale: int = HASH_SCALE) -> RowNnzResult:
    """Exact NNZ of each sampled output row, in sample order.

    Repeated sample entries are recomputed and counted again.
    """
    _check(A, B, profile)
    rows = np.ascontiguousarray(sample_rows, dtype=np.int64)
    if len(rows) and (rows.min() < 0 or rows.max() >= A.rows):
        raise ValueError(f"sample row out of range [0, {A.rows})")
    out = np.zeros(len(rows), dtype=np.int64)
    if len(rows) == 0:
        return RowNnzResult(nnz_per_row=out, total_nnz=0)
    capacity = int(profile.flop_per_row[rows].max())

    def work(lo, hi):
        acc = HashAccumulator(capacity, hash_scale)
        return symbolic_list(A.rpt, A.col, B.rpt, B.col, profile.flop_per_row, rows, lo, hi,
                             acc.table, acc.hash_scale, out)

    total = sum(run_blocks(len(rows), threads or default_threads(), work))
    return RowNnzResult(nnz_per_row=out, total_nnz=int(total))
