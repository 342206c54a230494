"""Deterministic synthetic sparsity patterns for offline testing.

Three models:

* ``uniform``: every row draws its columns uniformly from ``[0, cols)``.
* ``banded``: row ``i`` fills positions within ``bandwidth`` of the scaled
  diagonal ``i * cols / rows``, each with probability ``target / band size``.
* ``power-law``: row lengths follow a Pareto tail with exponent ``skew`` and
  columns are drawn with popularity ``~ u ** skew``, so a few hub columns
  (and hence a few long rows of B) receive most of the entries.

All randomness comes from :class:`~spgemm_oracle.rng.SplitMix64`, so a given
spec produces the same matrix on any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .csr import CsrMatrix, from_coo
from .rng import SplitMix64

MODELS = ("uniform", "banded", "power-law")


@dataclass(frozen=True)
class SyntheticSpec:
    rows: int
    cols: int
    model: str = "uniform"
    target_nnz_per_row: float = 4.0
    seed: int = 0
    bandwidth: int = 8
    skew: float = 2.0

    def check(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}, expected one of {MODELS}")
        if self.rows < 0 or self.cols < 0:
            raise ValueError("rows and cols must be non-negative")
        if self.target_nnz_per_row < 0:
            raise ValueError("target_nnz_per_row must be non-negative")
        if self.target_nnz_per_row > self.cols:
            raise ValueError(
                f"target_nnz_per_row={self.target_nnz_per_row} exceeds cols={self.cols}"
            )
        if self.model == "banded" and self.target_nnz_per_row > 2 * self.bandwidth + 1:
            raise ValueError(
                f"target_nnz_per_row={self.target_nnz_per_row} exceeds band size {2 * self.bandwidth + 1}"
            )
        if self.model == "power-law" and self.skew <= 1.0:
            raise ValueError("power-law skew must be > 1")

    def label(self) -> str:
        extra = ""
        if self.model == "banded":
            extra = f"-bw{self.bandwidth}"
        elif self.model == "power-law":
            extra = f"-s{self.skew:g}"
        return f"{self.model}{extra}-{self.rows}x{self.cols}-d{self.target_nnz_per_row:g}-seed{self.seed}"


def _row_counts(spec: SyntheticSpec, rng: SplitMix64) -> np.ndarray:
    t = spec.target_nnz_per_row
    if spec.model == "power-law":
        # Pareto with tail index `skew`, mean x_min * skew / (skew - 1) = t
        x_min = t * (spec.skew - 1.0) / spec.skew
        u = rng.random(spec.rows)
        draws = x_min * (1.0 - u) ** (-1.0 / spec.skew)
        frac = rng.random(spec.rows)
        counts = np.floor(draws + frac)
    else:
        base = math.floor(t)
        counts = base + (rng.random(spec.rows) < (t - base))
    return np.minimum(counts, spec.cols).astype(np.int64)


def generate_synthetic(spec: SyntheticSpec) -> CsrMatrix:
    """Generate the pattern described by ``spec``.

    Row lengths are targets: uniform and power-law rows draw their columns with
    replacement and keep each position once, so a row may come out slightly
    shorter than drawn.
    """
    spec.check()
    rng = SplitMix64(spec.seed)
    if spec.rows == 0 or spec.cols == 0 or spec.target_nnz_per_row == 0:
        return from_coo(spec.rows, spec.cols, [], [])

    if spec.model == "banded":
        band = 2 * spec.bandwidth + 1
        centers = (np.arange(spec.rows, dtype=np.int64) * spec.cols) // spec.rows
        offsets = np.arange(-spec.bandwidth, spec.bandwidth + 1, dtype=np.int64)
        r = np.repeat(np.arange(spec.rows, dtype=np.int64), band)
        c = (centers[:, None] + offsets[None, :]).ravel()
        keep = rng.spawn(1).random(len(c)) < spec.target_nnz_per_row / band
        keep &= (c >= 0) & (c < spec.cols)
        return from_coo(spec.rows, spec.cols, r[keep], c[keep])

    counts = _row_counts(spec, rng.spawn(1))
    total = int(counts.sum())
    r = np.repeat(np.arange(spec.rows, dtype=np.int64), counts)
    u = rng.spawn(2).random(total)
    if spec.model == "power-law":
        c = np.floor(spec.cols * u ** spec.skew).astype(np.int64)
    else:
        c = np.floor(spec.cols * u).astype(np.int64)
    np.minimum(c, spec.cols - 1, out=c)
    return from_coo(spec.rows, spec.cols, r, c)
