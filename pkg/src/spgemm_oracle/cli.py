"""spgemm-oracle command line.

Subcommands: flop, predict, exact, bench, fetch, gen. Matrix arguments accept a
Matrix Market path, ``group/name`` from the SuiteSparse collection, a bare
name from the 25-matrix evaluation set, or a ``synth:`` spec.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import bench
from .fetch import CACHE_ENV, FetchError, default_cache_dir, fetch_suitesparse
from .flop import compute_flop
from .mmio import MatrixMarketError, write_matrix_market
from .predict import (DEFAULT_SEED, SAMPLE_CAP, SAMPLE_FRACTION, error_report,
                      predict_row_structure, run_prediction)
from .symbolic import exact_symbolic
from .synthetic import MODELS, SyntheticSpec, generate_synthetic

log = logging.getLogger("spgemm_oracle")


class CliError(Exception):
    pass


def _cache_dir(args):
    return Path(args.cache_dir) if args.cache_dir else default_cache_dir()


def _load_pair(args):
    a_name, A = bench.resolve_matrix(args.a, _cache_dir(args))
    if args.b is None:
        b_name, B = a_name, A
    else:
        b_name, B = bench.resolve_matrix(args.b, _cache_dir(args))
    if A.cols != B.rows:
        if not getattr(args, "reshape", False):
            raise CliError(
                f"dimension mismatch: {a_name} is {A.rows}x{A.cols}, {b_name} is {B.rows}x{B.cols} "
                "(pass --reshape to trim the larger inner dimension)"
            )
        case = bench.build_case(A, B, a_name, b_name)
        A, B = case.A, case.B
    return a_name, b_name, A, B


def _emit(args, text_lines, payload):
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        for line in text_lines:
            print(line)


def _log2_histogram(values: np.ndarray) -> list[tuple[str, int]]:
    """Counts per bucket: 0, 1, [2,4), [4,8), ..."""
    if len(values) == 0:
        return []
    v = np.asarray(values)
    buckets = np.where(v > 0, np.floor(np.log2(np.maximum(v, 1))).astype(np.int64) + 1, 0)
    counts = np.bincount(buckets)
    out = []
    for b, n in enumerate(counts):
        if b == 0:
            label = "0"
        elif b == 1:
            label = "1"
        else:
            label = f"[{2 ** (b - 1)},{2 ** b})"
        out.append((label, int(n)))
    return out


def cmd_flop(args) -> int:
    a_name, b_name, A, B = _load_pair(args)
    prof = compute_flop(A, B, threads=args.threads)
    hist = _log2_histogram(prof.flop_per_row)
    lines = [f"total_flop {prof.total_flop}", f"max_row_flop {prof.max_flop_row}"]
    if args.histogram:
        lines.append("row_flop_histogram")
        lines += [f"  {label:>16} {n}" for label, n in hist]
    _emit(args, lines, {
        "a": a_name, "b": b_name, "rows": A.rows,
        "total_flop": prof.total_flop, "max_row_flop": prof.max_flop_row,
        "histogram": hist if args.histogram else None,
    })
    return 0


def cmd_exact(args) -> int:
    a_name, b_name, A, B = _load_pair(args)
    prof = compute_flop(A, B, threads=args.threads)
    ex = exact_symbolic(A, B, prof, threads=args.threads)
    cr = prof.total_flop / ex.total_nnz if ex.total_nnz else math.nan
    lines = [f"total_flop {prof.total_flop}", f"nnz_c {ex.total_nnz}", f"cr {cr:.6g}"]
    _emit(args, lines, {"a": a_name, "b": b_name, "total_flop": prof.total_flop,
                        "nnz_c": ex.total_nnz, "cr": None if math.isnan(cr) else cr})
    return 0


def cmd_predict(args) -> int:
    a_name, b_name, A, B = _load_pair(args)
    prof = compute_flop(A, B, threads=args.threads)
    rep = run_prediction(A, B, args.seed, profile=prof, fraction=args.sample_frac,
                         cap=args.sample_cap, threads=args.threads)
    payload = {
        "a": a_name, "b": b_name, "seed": args.seed,
        "sample_num": rep.plan.sample_num, "total_flop": rep.total_flop,
        "sampled_flop": rep.stats.sampled_flop, "sampled_nnz": rep.stats.sampled_nnz,
        "z1_star": rep.z1_star, "z2_star": rep.z2_star, "predicted_cr": rep.predicted_cr,
    }
    lines = [
        f"sample_num {rep.plan.sample_num}",
        f"total_flop {rep.total_flop}",
        f"z1_star {rep.z1_star:.6f}",
        f"z2_star {rep.z2_star:.6f}",
        f"predicted_cr {rep.predicted_cr:.6f}",
    ]
    if args.exact:
        ex = exact_symbolic(A, B, prof, threads=args.threads)
        payload["nnz_c"] = ex.total_nnz
        lines.append(f"nnz_c {ex.total_nnz}")
        if ex.total_nnz > 0:
            err = error_report(rep.z1_star, rep.z2_star, rep.stats.sampled_flop,
                               ex.total_nnz, rep.total_flop, rep.plan.p)
            payload.update(eps1=err.eps1, eps_f=err.eps_f, eps2=err.eps2)
            lines += [f"eps1_pct {100 * err.eps1:.4f}", f"eps_f_pct {100 * err.eps_f:.4f}",
                      f"eps2_pct {100 * err.eps2:.4f}"]
    if args.structure_out:
        rows = predict_row_structure(prof, rep.predicted_cr)
        with open(args.structure_out, "w", encoding="utf-8") as fh:
            fh.write("row,flop,predicted_nnz,allocation\n")
            for i in range(A.rows):
                fh.write(f"{i},{prof.flop_per_row[i]},{rows.predicted[i]:.6g},{rows.allocation[i]}\n")
        payload["structure_out"] = args.structure_out
    _emit(args, lines, payload)
    return 0


def cmd_bench(args) -> int:
    entries = bench.read_matrix_list(args.list)
    matrices, failures = [], []
    for entry in entries:
        try:
            matrices.append(bench.resolve_matrix(entry, _cache_dir(args), offline=args.offline))
        except (FetchError, MatrixMarketError, FileNotFoundError, ValueError, OSError) as exc:
            log.warning("cannot load %s: %s", entry, exc)
            failures.append((entry, str(exc)))
    if not matrices:
        raise CliError("no matrix in the list could be loaded")
    reps = 0 if args.no_timing else args.reps
    results, summary = bench.run_corpus(matrices, seed=args.seed, repetitions=reps,
                                        threads=args.threads, fraction=args.sample_frac,
                                        cap=args.sample_cap, failures=failures)
    if args.out:
        bench.emit_report(results, summary, args.out, args.format)
    line = (f"cases {summary.n_cases} failed {summary.n_failed} degenerate {summary.n_degenerate} "
            f"unloaded {summary.n_unloaded} "
            f"mean_abs_eps1 {100 * summary.mean_abs_eps1:.4g}% "
            f"mean_abs_eps2 {100 * summary.mean_abs_eps2:.4g}% "
            f"win_rate {summary.win_rate:.4g} pearson {summary.pearson_eps1_eps_f:.4g}")
    if summary.mean_predict_fraction is not None:
        line += (f" flop_frac {100 * summary.mean_flop_fraction:.3g}%"
                 f" predict_frac {100 * summary.mean_predict_fraction:.3g}% (of exact symbolic)")
    if args.json:
        print(json.dumps(bench._json_safe(bench.asdict(summary)), indent=2))
    else:
        print(line)
        for f in summary.failures:
            print(f"failed {f.get('matrix') or f.get('case')}: {f['error']}")
    return 0


def cmd_fetch(args) -> int:
    path = fetch_suitesparse(args.group, args.name, _cache_dir(args))
    _emit(args, [str(path)], {"path": str(path)})
    return 0


def cmd_gen(args) -> int:
    spec = SyntheticSpec(rows=args.rows, cols=args.cols, model=args.model,
                         target_nnz_per_row=args.nnz_per_row, seed=args.seed,
                         bandwidth=args.bandwidth, skew=args.skew)
    m = generate_synthetic(spec)
    out = write_matrix_market(m, args.out, comment=f"synthetic {spec.label()}")
    _emit(args, [f"wrote {out} ({m.rows}x{m.cols}, nnz {m.nnz})"],
          {"path": str(out), "rows": m.rows, "cols": m.cols, "nnz": m.nnz})
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    common.add_argument("--cache-dir", default=None, help=f"SuiteSparse cache (env {CACHE_ENV})")
    common.add_argument("--json", action="store_true", help="machine-readable stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    sampling = argparse.ArgumentParser(add_help=False)
    sampling.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sampling.add_argument("--sample-frac", type=float, default=SAMPLE_FRACTION)
    sampling.add_argument("--sample-cap", type=int, default=SAMPLE_CAP)

    pair = argparse.ArgumentParser(add_help=False)
    pair.add_argument("a")
    pair.add_argument("b", nargs="?", default=None, help="defaults to A (matrix square)")
    pair.add_argument("--reshape", action="store_true", help="trim A's columns or B's rows to match")

    p = argparse.ArgumentParser(prog="spgemm-oracle", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("flop", parents=[common, pair], help="total and per-row FLOP of AB")
    s.add_argument("--histogram", action=argparse.BooleanOptionalAction, default=True)
    s.set_defaults(func=cmd_flop)

    s = sub.add_parser("exact", parents=[common, pair], help="exact NNZ(AB) via the symbolic pass")
    s.set_defaults(func=cmd_exact)

    s = sub.add_parser("predict", parents=[common, pair, sampling], help="predict NNZ(AB)")
    s.add_argument("--exact", action="store_true", help="also run the exact pass and report errors")
    s.add_argument("--structure-out", default=None, help="write predicted per-row NNZ as CSV")
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("bench", parents=[common, sampling], help="run all ordered pairs of a matrix list")
    s.add_argument("list", help="matrix list file")
    s.add_argument("--reps", type=int, default=10, help="timed runs after one warm-up")
    s.add_argument("--no-timing", action="store_true")
    s.add_argument("--offline", action="store_true", help="never download; use cached matrices only")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("fetch", parents=[common], help="download a SuiteSparse matrix into the cache")
    s.add_argument("group")
    s.add_argument("name")
    s.set_defaults(func=cmd_fetch)

    s = sub.add_parser("gen", parents=[common], help="write a synthetic pattern as Matrix Market")
    s.add_argument("model", choices=MODELS)
    s.add_argument("rows", type=int)
    s.add_argument("cols", type=int)
    s.add_argument("nnz_per_row", type=float)
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--bandwidth", type=int, default=8)
    s.add_argument("--skew", type=float, default=2.0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CliError, FetchError, MatrixMarketError, FileNotFoundError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
