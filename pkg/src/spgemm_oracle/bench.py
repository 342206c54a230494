"""Pairwise accuracy and overhead benchmark.

Every ordered pair (A, B) of a matrix list, self-pairs included, becomes one
case. When the inner dimensions disagree, A keeps its left columns or B keeps
its top rows so the product is defined. Each case is run through the exact
symbolic pass and both estimators on the same sample.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .csr import CsrMatrix, reshape_keep_left, reshape_keep_top
from .fetch import fetch_suitesparse
from .flop import compute_flop
from .mmio import read_matrix_market
from .predict import DEFAULT_SEED, SAMPLE_CAP, SAMPLE_FRACTION, error_report, make_sample_plan, run_prediction
from .symbolic import exact_symbolic
from .synthetic import SyntheticSpec, generate_synthetic

log = logging.getLogger(__name__)

REPORT_COLUMNS = (
    "a", "b", "sample_num", "cr", "nnz_c", "eps1_pct", "eps_f_pct", "eps2_pct",
    "t_flop_s", "t_predict_s", "t_exact_s",
)

# SuiteSparse groups of the 25-matrix evaluation set, so bare names resolve.
SUITESPARSE_GROUPS = {
    "m133-b3": "JGD_Homology",
    "mac_econ_fwd500": "Williams",
    "patents_main": "Pajek",
    "webbase-1M": "Williams",
    "mc2depi": "Williams",
    "scircuit": "Hamm",
    "delaunay_n24": "DIMACS10",
    "mario002": "GHS_indef",
    "cage15": "vanHeukelum",
    "cage12": "vanHeukelum",
    "majorbasis": "QLi",
    "offshore": "Um",
    "2cubes_sphere": "Um",
    "poisson3Da": "FEM_3D",
    "filter3D": "Oberwolfach",
    "cop20k_A": "Williams",
    "mono_500Hz": "Cote",
    "conf5_4-8x8-05": "QCD",
    "cant": "Williams",
    "hood": "GHS_psdef",
    "consph": "Williams",
    "shipsec1": "DNVS",
    "pwtk": "Boeing",
    "rma10": "Bova",
    "pdb1HYS": "Williams",
}


@dataclass(eq=False)
class TestCase:
    a_name: str
    b_name: str
    A: CsrMatrix
    B: CsrMatrix
    reshape_applied: str = "none"

    __test__ = False  # not a pytest class


@dataclass
class CaseResult:
    a: str
    b: str
    reshape: str = "none"
    status: str = "ok"
    sample_num: int = 0
    Z: int = 0
    F: int = 0
    cr: float = math.nan
    z1_star: float = math.nan
    z2_star: float = math.nan
    eps1: float = math.nan
    eps_f: float = math.nan
    eps2: float = math.nan
    identity_residual: float = math.nan
    t_flop: Optional[float] = None
    t_predict: Optional[float] = None
    t_exact: Optional[float] = None
    error: str = ""

    @property
    def case_id(self) -> str:
        return f"{self.a}*{self.b}"


@dataclass
class OverheadReport:
    per_case: list  # (case_id, flop_fraction | None, predict_fraction | None)
    mean_flop_fraction: Optional[float]
    mean_predict_fraction: Optional[float]
    baseline: str = "exact symbolic pass (upper bound on fractions of a full SpGEMM)"


@dataclass
class CorpusSummary:
    n_cases: int
    n_failed: int
    n_degenerate: int
    mean_abs_eps1: float
    mean_abs_eps_f: float
    mean_abs_eps2: float
    worst_abs_eps1: float
    worst_abs_eps_f: float
    worst_abs_eps2: float
    win_rate: float
    pearson_eps1_eps_f: float
    max_identity_residual: float
    n_unloaded: int = 0
    mean_flop_fraction: Optional[float] = None
    mean_predict_fraction: Optional[float] = None
    failures: list = field(default_factory=list)


def build_case(A: CsrMatrix, B: CsrMatrix, a_name: str = "A", b_name: str = "B") -> TestCase:
    if A.cols > B.rows:
        return TestCase(a_name, b_name, reshape_keep_left(A, B.rows), B, "a-left-cols")
    if A.cols < B.rows:
        return TestCase(a_name, b_name, A, reshape_keep_top(B, A.cols), "b-top-rows")
    return TestCase(a_name, b_name, A, B, "none")


def time_call(fn: Callable, repetitions: int) -> Optional[float]:
    """Mean wall time of ``repetitions`` calls after one warm-up call."""
    if repetitions <= 0:
        return None
    fn()
    total = 0.0
    for _ in range(repetitions):
        t0 = time.perf_counter()
        fn()
        total += time.perf_counter() - t0
    return total / repetitions


def run_case(case: TestCase, seed: int = DEFAULT_SEED, repetitions: int = 0,
             threads: Optional[int] = None, fraction: float = SAMPLE_FRACTION,
             cap: int = SAMPLE_CAP) -> CaseResult:
    A, B = case.A, case.B
    res = CaseResult(a=case.a_name, b=case.b_name, reshape=case.reshape_applied)
    if A.rows == 0:
        res.status = "degenerate"
        res.error = "A has no rows"
        return res
    profile = compute_flop(A, B, threads=threads)
    exact = exact_symbolic(A, B, profile, threads=threads)
    plan = make_sample_plan(A.rows, seed, fraction, cap)
    pred = run_prediction(A, B, profile=profile, plan=plan, threads=threads)

    res.sample_num = plan.sample_num
    res.Z = exact.total_nnz
    res.F = profile.total_flop
    res.z1_star = pred.z1_star
    res.z2_star = pred.z2_star
    if res.Z == 0:
        res.status = "degenerate"
        res.error = "empty product (Z = 0)"
    else:
        res.cr = res.F / res.Z
        err = error_report(pred.z1_star, pred.z2_star, pred.stats.sampled_flop, res.Z, res.F, plan.p)
        res.eps1, res.eps_f, res.eps2 = err.eps1, err.eps_f, err.eps2
        res.identity_residual = err.identity_residual

    if repetitions > 0:
        res.t_flop = time_call(lambda: compute_flop(A, B, threads=threads), repetitions)
        res.t_predict = time_call(
            lambda: run_prediction(A, B, seed, profile=profile, fraction=fraction, cap=cap, threads=threads),
            repetitions,
        )
        res.t_exact = time_call(lambda: exact_symbolic(A, B, profile, threads=threads), repetitions)
    return res


def run_corpus(matrices: Sequence[tuple[str, CsrMatrix]], seed: int = DEFAULT_SEED,
               repetitions: int = 0, threads: Optional[int] = None,
               fraction: float = SAMPLE_FRACTION, cap: int = SAMPLE_CAP,
               failures: Sequence[tuple[str, str]] = ()) -> tuple[list[CaseResult], CorpusSummary]:
    """Run every ordered pair of ``matrices``.

    ``repetitions`` > 0 turns on timing with one warm-up run per measurement.
    A case that raises is recorded as failed and the run continues.
    ``failures`` carries (name, reason) for matrices that could not be loaded.
    """
    if not matrices:
        raise ValueError("matrix list is empty")
    results = []
    for a_name, A in matrices:
        for b_name, B in matrices:
            case = build_case(A, B, a_name, b_name)
            try:
                results.append(run_case(case, seed, repetitions, threads, fraction, cap))
            except Exception as exc:  # per-case failures are data, not fatal
                log.warning("case %s*%s failed: %s", a_name, b_name, exc)
                results.append(CaseResult(a=a_name, b=b_name, reshape=case.reshape_applied,
                                          status="failed", error=str(exc)))
    return results, summarize(results, failures)


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    if len(x) < 2 or np.std(x) == 0 or np.std(y) == 0:
        return math.nan
    return float(np.corrcoef(x, y)[0, 1])


def summarize(results: Sequence[CaseResult], failures: Sequence[tuple[str, str]] = ()) -> CorpusSummary:
    ok = [r for r in results if r.status == "ok"]
    e1 = np.array([r.eps1 for r in ok])
    ef = np.array([r.eps_f for r in ok])
    e2 = np.array([r.eps2 for r in ok])
    residuals = [r.identity_residual for r in ok if not math.isnan(r.identity_residual)]

    def mean_abs(x):
        return float(np.mean(np.abs(x))) if len(x) else math.nan

    def worst_abs(x):
        return float(np.max(np.abs(x))) if len(x) else math.nan

    overhead = overhead_fractions(results)
    return CorpusSummary(
        n_cases=len(ok),
        n_failed=sum(r.status == "failed" for r in results),
        n_degenerate=sum(r.status == "degenerate" for r in results),
        mean_abs_eps1=mean_abs(e1),
        mean_abs_eps_f=mean_abs(ef),
        mean_abs_eps2=mean_abs(e2),
        worst_abs_eps1=worst_abs(e1),
        worst_abs_eps_f=worst_abs(ef),
        worst_abs_eps2=worst_abs(e2),
        win_rate=float(np.mean(np.abs(e2) < np.abs(e1))) if len(ok) else math.nan,
        pearson_eps1_eps_f=_pearson(e1, ef),
        max_identity_residual=max(residuals) if residuals else math.nan,
        n_unloaded=len(failures),
        mean_flop_fraction=overhead.mean_flop_fraction,
        mean_predict_fraction=overhead.mean_predict_fraction,
        failures=[{"matrix": n, "error": e} for n, e in failures]
        + [{"case": r.case_id, "error": r.error} for r in results if r.status == "failed"],
    )


def overhead_fractions(results: Sequence[CaseResult]) -> OverheadReport:
    """FLOP-pass and prediction time as fractions of the exact symbolic pass.

    A case without timings or with a zero baseline gets ``None``.
    """
    per_case = []
    for r in results:
        if r.t_exact is None or r.t_exact <= 0 or r.t_flop is None or r.t_predict is None:
            per_case.append((r.case_id, None, None))
        else:
            per_case.append((r.case_id, r.t_flop / r.t_exact, r.t_predict / r.t_exact))
    flops = [f for _, f, _ in per_case if f is not None]
    preds = [p for _, _, p in per_case if p is not None]
    return OverheadReport(
        per_case=per_case,
        mean_flop_fraction=float(np.mean(flops)) if flops else None,
        mean_predict_fraction=float(np.mean(preds)) if preds else None,
    )


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.6g}"


def report_rows(results: Sequence[CaseResult]) -> list[dict]:
    """Report rows as strings in REPORT_COLUMNS order; failed cases are omitted."""
    rows = []
    for r in results:
        if r.status == "failed":
            continue
        rows.append(dict(zip(REPORT_COLUMNS, (
            r.a, r.b, _fmt(r.sample_num), _fmt(r.cr), _fmt(r.Z),
            _fmt(100 * r.eps1), _fmt(100 * r.eps_f), _fmt(100 * r.eps2),
            _fmt(r.t_flop), _fmt(r.t_predict), _fmt(r.t_exact),
        ))))
    return rows


def _json_value(column: str, text: str):
    if column in ("a", "b"):
        return text
    if text == "":
        return None
    if column in ("sample_num", "nnz_c"):
        return int(text)
    value = float(text)
    return None if math.isnan(value) else value


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_json_safe(v) for v in obj]
    return obj


def render_report(results: Sequence[CaseResult], summary: Optional[CorpusSummary], fmt: str = "csv") -> str:
    rows = report_rows(results)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "columns": list(REPORT_COLUMNS),
            "cases": [{c: _json_value(c, row[c]) for c in REPORT_COLUMNS} for row in rows],
            "summary": None if summary is None else _json_safe(asdict(summary)),
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")


def emit_report(results: Sequence[CaseResult], summary: Optional[CorpusSummary], path,
                fmt: str = "csv") -> Path:
    path = Path(path)
    path.write_text(render_report(results, summary, fmt), encoding="utf-8")
    return path


def read_matrix_list(path) -> list[str]:
    """Entries of a matrix list file: one per line, ``#`` starts a comment."""
    entries = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            entries.append(line)
    return entries


def parse_synthetic_entry(entry: str) -> SyntheticSpec:
    """Parse ``synth:<model>:<rows>x<cols>:<nnz_per_row>[:key=value...]``.

    Keys are ``seed``, ``bandwidth`` and ``skew``.
    """
    parts = entry.split(":")
    if len(parts) < 4 or parts[0] != "synth":
        raise ValueError(f"bad synthetic entry {entry!r}")
    rows, _, cols = parts[2].partition("x")
    kwargs = {}
    for kv in parts[4:]:
        key, _, value = kv.partition("=")
        if key == "seed":
            kwargs["seed"] = int(value)
        elif key == "bandwidth":
            kwargs["bandwidth"] = int(value)
        elif key == "skew":
            kwargs["skew"] = float(value)
        else:
            raise ValueError(f"unknown synthetic option {key!r} in {entry!r}")
    return SyntheticSpec(rows=int(rows), cols=int(cols or rows), model=parts[1],
                         target_nnz_per_row=float(parts[3]), **kwargs)


def resolve_matrix(entry: str, cache_dir=None, offline: bool = False) -> tuple[str, CsrMatrix]:
    """Load a list entry: a synthetic spec, a file path, ``group/name``, or a known name."""
    if entry.startswith("synth:"):
        spec = parse_synthetic_entry(entry)
        return spec.label(), generate_synthetic(spec)
    path = Path(entry)
    if path.is_file():
        return path.name.split(".")[0], read_matrix_market(path)
    if "/" in entry:
        group, _, name = entry.partition("/")
    elif entry in SUITESPARSE_GROUPS:
        group, name = SUITESPARSE_GROUPS[entry], entry
    else:
        raise FileNotFoundError(f"{entry!r} is neither a file nor a group/name pair")
    if offline:
        from .fetch import cache_path
        cached = cache_path(group, name, cache_dir)
        if not cached.is_file():
            raise FileNotFoundError(f"{group}/{name} not cached and offline mode is on")
        return name, read_matrix_market(cached)
    return name, read_matrix_market(fetch_suitesparse(group, name, cache_dir))


def default_synthetic_corpus() -> list[SyntheticSpec]:
    """Eleven patterns whose squares span compression ratios from about 1 to about 20."""
    return [
        SyntheticSpec(8000, 8000, "uniform", 4, seed=101),
        SyntheticSpec(12000, 12000, "uniform", 8, seed=102),
        SyntheticSpec(20000, 5000, "uniform", 3, seed=103),
        SyntheticSpec(10000, 10000, "banded", 5, seed=104, bandwidth=3),
        SyntheticSpec(6000, 6000, "banded", 20, seed=105, bandwidth=16),
        SyntheticSpec(5000, 5000, "banded", 21, seed=106, bandwidth=10),
        SyntheticSpec(4000, 4000, "banded", 45, seed=107, bandwidth=25),
        SyntheticSpec(10000, 10000, "power-law", 6, seed=108, skew=2.0),
        SyntheticSpec(15000, 15000, "power-law", 4, seed=109, skew=1.5),
        SyntheticSpec(6000, 8000, "power-law", 10, seed=110, skew=2.5),
        SyntheticSpec(3000, 3000, "power-law", 20, seed=111, skew=3.0),
    ]


def load_synthetic(specs: Sequence[SyntheticSpec]) -> list[tuple[str, CsrMatrix]]:
    return [(s.label(), generate_synthetic(s)) for s in specs]
