"""Intermediate-product (FLOP) counts of C = AB per output row."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ._kernels import flop_range, run_blocks
from .csr import CsrMatrix


def default_threads() -> int:
    return os.cpu_count() or 1


@dataclass(frozen=True, eq=False)
class FlopProfile:
    flop_per_row: np.ndarray
    total_flop: int
    max_flop_row: int

    def __post_init__(self):
        self.flop_per_row.setflags(write=False)

    @property
    def rows(self) -> int:
        return len(self.flop_per_row)


def compute_flop(A: CsrMatrix, B: CsrMatrix, threads: int | None = None) -> FlopProfile:
    """Count the products ``a_ik * b_kj`` each output row needs.

    Row i costs the sum of B's row lengths over the columns of A's row i. Only
    ``A.rpt``, ``A.col`` and ``B.rpt`` are read. Rows are split into static
    blocks across ``threads`` workers and the per-block totals are added in
    block order, so the result is the same for any thread count.
    """
    if A.cols != B.rows:
        raise ValueError(f"dimension mismatch: A is {A.rows}x{A.cols}, B is {B.rows}x{B.cols}")
    out = np.zeros(A.rows, dtype=np.int64)
    partial = run_blocks(
        A.rows,
        threads or default_threads(),
        lambda lo, hi: flop_range(A.rpt, A.col, B.rpt, lo, hi, out),
    )
    total = int(sum(partial))
    return FlopProfile(
        flop_per_row=out,
        total_flop=total,
        max_flop_row=int(out.max()) if len(out) else 0,
    )


def sampled_flop(profile: FlopProfile, sample_rows) -> int:
    """Sum of per-row FLOP over ``sample_rows``; repeated rows count each time."""
    idx = np.asarray(sample_rows, dtype=np.int64)
    if len(idx) and (idx.min() < 0 or idx.max() >= profile.rows):
        raise ValueError(f"sample row out of range [0, {profile.rows})")
    return int(profile.flop_per_row[idx].sum())
