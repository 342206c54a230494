"""Sampling policy and the two NNZ(C) estimators.

Both estimators share one sample of output rows. The reference estimator
scales the sampled NNZ by the sampling fraction. The proposed estimator forms
the sampled compression ratio ``r* = f*/z*`` from the FLOP and NNZ of the same
rows and divides the exact total FLOP by it, so errors that push f* and z* the
same way largely cancel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .csr import CsrMatrix
from .flop import FlopProfile, compute_flop, sampled_flop
from .rng import SplitMix64
from .symbolic import sampled_symbolic

DEFAULT_SEED = 42
SAMPLE_FRACTION = 0.003
SAMPLE_CAP = 300


@dataclass(frozen=True, eq=False)
class SamplePlan:
    sample_rows: np.ndarray
    sample_num: int
    p: float
    seed: int | None

    @property
    def exhaustive(self) -> bool:
        return self.seed is None


@dataclass(frozen=True)
class SampleStats:
    sampled_flop: int
    sampled_nnz: int

    @property
    def sampled_cr(self) -> float:
        if self.sampled_nnz == 0:
            return float("nan")
        return self.sampled_flop / self.sampled_nnz


@dataclass(frozen=True, eq=False)
class PredictionReport:
    z1_star: float
    z2_star: float
    predicted_cr: float
    predicted_row_nnz: np.ndarray
    plan: SamplePlan
    stats: SampleStats
    total_flop: int


@dataclass(frozen=True)
class ErrorReport:
    eps1: float
    eps_f: float
    eps2: float
    identity_residual: float

    @property
    def identity_defined(self) -> bool:
        return not math.isnan(self.identity_residual)


class RowStructure(NamedTuple):
    predicted: np.ndarray
    allocation: np.ndarray


def sample_count(M: int, fraction: float = SAMPLE_FRACTION, cap: int = SAMPLE_CAP) -> int:
    """``min(fraction * M, cap)`` truncated to an integer, but never below 1."""
    # the epsilon absorbs products like 0.003 * 7000 = 20.999999999999996
    return max(1, min(math.floor(fraction * M + 1e-9), cap))


def make_sample_plan(M: int, seed: int = DEFAULT_SEED, fraction: float = SAMPLE_FRACTION,
                     cap: int = SAMPLE_CAP) -> SamplePlan:
    """Draw ``sample_count(M)`` rows independently, with replacement.

    Row k is ``floor(M * u_k)`` where ``u_k`` is the k-th uniform of a
    SplitMix64 stream seeded with ``seed``.
    """
    if M < 1:
        raise ValueError("cannot sample rows of a matrix with no rows")
    n = sample_count(M, fraction, cap)
    rows = SplitMix64(seed).integers(M, n)
    return SamplePlan(sample_rows=rows, sample_num=n, p=n / M, seed=int(seed))


def exhaustive_plan(M: int) -> SamplePlan:
    """Every row exactly once; p = 1."""
    if M < 1:
        raise ValueError("cannot sample rows of a matrix with no rows")
    return SamplePlan(sample_rows=np.arange(M, dtype=np.int64), sample_num=M, p=1.0, seed=None)


def predict_reference(stats: SampleStats, plan: SamplePlan) -> float:
    """Z1* = z* / p."""
    if plan.p <= 0:
        raise ValueError("sampling fraction must be positive")
    return stats.sampled_nnz / plan.p


def predict_proposed(stats: SampleStats, total_flop: int) -> tuple[float, float]:
    """Return ``(Z2*, predicted CR)``.

    With no sampled products the ratio falls back to 1, i.e. the FLOP upper
    bound.
    """
    if total_flop < 0:
        raise ValueError("total_flop must be non-negative")
    f, z = stats.sampled_flop, stats.sampled_nnz
    if f == 0 or z == 0:
        return float(total_flop), 1.0
    # same operation order as F / f* * z*, so f* == F gives z* exactly
    return total_flop / f * z, f / z


def predict_row_structure(profile: FlopProfile, predicted_cr: float) -> RowStructure:
    """Per-row predicted NNZ, plus a ceil view clamped to the row FLOP for allocation."""
    if not predicted_cr > 0:
        raise ValueError(f"predicted compression ratio must be positive, got {predicted_cr}")
    flop = profile.flop_per_row
    predicted = flop / predicted_cr
    allocation = np.minimum(np.ceil(predicted).astype(np.int64), flop)
    return RowStructure(predicted, allocation)


def error_report(z1_star: float, z2_star: float, f_star: int, Z: int, F: int, p: float) -> ErrorReport:
    """Relative errors of both estimators against the exact NNZ(C) = Z.

    ``identity_residual`` measures how far ``eps2`` is from
    ``(eps1 - eps_f) / (1 + eps_f)``. It is NaN when the sample held no
    products (``eps_f = -1``), where that relation has no value.
    """
    if Z <= 0 or F <= 0:
        raise ValueError(f"relative error undefined for Z={Z}, F={F}")
    if p <= 0:
        raise ValueError("sampling fraction must be positive")
    eps1 = (z1_star - Z) / Z
    eps_f = (f_star / p - F) / F
    eps2 = (z2_star - Z) / Z
    if f_star == 0:
        residual = float("nan")
    else:
        # 1 + eps taken as the ratio itself; forming 1 + eps_f cancels badly near eps_f = -1
        ratio_1 = z1_star / Z
        ratio_f = f_star / p / F
        residual = abs(eps2 - (ratio_1 - ratio_f) / ratio_f)
    return ErrorReport(eps1=eps1, eps_f=eps_f, eps2=eps2, identity_residual=residual)


def run_prediction(A: CsrMatrix, B: CsrMatrix, seed: int = DEFAULT_SEED, *,
                   profile: FlopProfile | None = None, plan: SamplePlan | None = None,
                   exhaustive: bool = False, fraction: float = SAMPLE_FRACTION,
                   cap: int = SAMPLE_CAP, threads: int | None = None) -> PredictionReport:
    """Profile, sample, and apply both estimators.

    Pass ``profile`` to reuse a FLOP profile and ``plan`` (or ``exhaustive``)
    to override the sampling.
    """
    if profile is None:
        profile = compute_flop(A, B, threads=threads)
    if plan is None:
        plan = exhaustive_plan(A.rows) if exhaustive else make_sample_plan(A.rows, seed, fraction, cap)
    sampled = sampled_symbolic(A, B, profile, plan.sample_rows, threads=threads)
    stats = SampleStats(
        sampled_flop=sampled_flop(profile, plan.sample_rows),
        sampled_nnz=sampled.total_nnz,
    )
    z1 = predict_reference(stats, plan)
    z2, cr = predict_proposed(stats, profile.total_flop)
    return PredictionReport(
        z1_star=z1,
        z2_star=z2,
        predicted_cr=cr,
        predicted_row_nnz=predict_row_structure(profile, cr).predicted,
        plan=plan,
        stats=stats,
        total_flop=profile.total_flop,
    )
