import csv
import json
import math

import pytest

from spgemm_oracle import bench
from spgemm_oracle.bench import (REPORT_COLUMNS, CaseResult, build_case, emit_report,
                                 overhead_fractions, parse_synthetic_entry, read_matrix_list,
                                 run_corpus)
from spgemm_oracle.csr import identity
from spgemm_oracle.synthetic import SyntheticSpec, generate_synthetic

SMALL = [
    SyntheticSpec(900, 900, "uniform", 4, seed=1),
    SyntheticSpec(600, 700, "banded", 9, seed=2, bandwidth=6),
    SyntheticSpec(1200, 800, "power-law", 5, seed=3),
]


@pytest.fixture(scope="module")
def small():
    return bench.load_synthetic(SMALL)


def test_build_case_shrinks_a():
    case = build_case(identity(10), identity(5))
    assert case.A.shape == (10, 5)
    assert case.reshape_applied == "a-left-cols"


def test_build_case_shrinks_b():
    case = build_case(identity(5), identity(10))
    assert case.B.shape == (5, 10)
    assert case.reshape_applied == "b-top-rows"


def test_build_case_matched():
    a = identity(4)
    case = build_case(a, a)
    assert case.A is a and case.B is a
    assert case.reshape_applied == "none"


def test_single_matrix_one_case():
    results, summary = run_corpus([("i", generate_synthetic(SMALL[0]))])
    assert len(results) == 1
    assert results[0].a == results[0].b == "i"
    assert summary.n_cases == 1


def test_all_ordered_pairs(small):
    results, summary = run_corpus(small, seed=5)
    assert len(results) == 9
    assert [(r.a, r.b) for r in results] == [(a, b) for a, _ in small for b, _ in small]
    for r in results:
        assert r.status == "ok"
        assert r.cr == pytest.approx(r.F / r.Z)
        assert r.identity_residual <= 1e-9 * max(1, abs(r.eps2))
    assert 0 <= summary.win_rate <= 1


def test_empty_list():
    with pytest.raises(ValueError):
        run_corpus([])


def test_degenerate_and_failed_cases_excluded():
    from spgemm_oracle.csr import from_coo
    empty = from_coo(50, 50, [], [])
    results, summary = run_corpus([("e", empty), ("i", identity(50))])
    assert sum(r.status == "degenerate" for r in results) == 3
    assert summary.n_cases == 1 and summary.n_degenerate == 3


def test_per_case_failure_is_recorded(monkeypatch, small):
    real = bench.run_case

    def flaky(case, *a, **k):
        if case.a_name == small[1][0] and case.b_name == small[2][0]:
            raise RuntimeError("boom")
        return real(case, *a, **k)

    monkeypatch.setattr(bench, "run_case", flaky)
    results, summary = run_corpus(small)
    assert summary.n_failed == 1
    assert summary.n_cases == 8
    assert summary.failures[0]["error"] == "boom"


def test_determinism_bytes(small, tmp_path):
    outs = []
    for k in range(2):
        results, summary = run_corpus(small, seed=11)
        outs.append(emit_report(results, summary, tmp_path / f"r{k}.csv").read_bytes())
    assert outs[0] == outs[1]


def test_timings_and_overhead(small):
    results, summary = run_corpus(small[:1], repetitions=2)
    r = results[0]
    assert r.t_flop > 0 and r.t_predict > 0 and r.t_exact > 0
    oh = overhead_fractions(results)
    assert oh.per_case[0][1] == pytest.approx(r.t_flop / r.t_exact)
    assert summary.mean_predict_fraction == pytest.approx(r.t_predict / r.t_exact)


def test_overhead_arithmetic():
    r = CaseResult(a="x", b="y", t_flop=0.002, t_predict=0.001, t_exact=0.1)
    oh = overhead_fractions([r])
    assert oh.mean_predict_fraction == pytest.approx(0.01)
    assert oh.mean_flop_fraction == pytest.approx(0.02)


def test_overhead_missing_or_zero_baseline():
    oh = overhead_fractions([CaseResult(a="x", b="y"), CaseResult(a="x", b="z", t_flop=1, t_predict=1, t_exact=0.0)])
    assert oh.per_case == [("x*y", None, None), ("x*z", None, None)]
    assert oh.mean_predict_fraction is None


def test_time_call_protocol():
    calls = []
    assert bench.time_call(lambda: calls.append(1), 10) >= 0
    assert len(calls) == 11
    assert bench.time_call(lambda: calls.append(1), 0) is None


def test_table_row_shape():
    r = CaseResult(a="cage12", b="patents_main", sample_num=300, Z=4611949, F=4611949,
                   cr=1.0, eps1=0.0361, eps_f=0.0362, eps2=-0.0001)
    row = bench.report_rows([r])[0]
    assert list(row) == list(REPORT_COLUMNS)
    assert row["a"] == "cage12" and row["b"] == "patents_main"
    assert row["sample_num"] == "300"
    assert (row["eps1_pct"], row["eps_f_pct"], row["eps2_pct"]) == ("3.61", "3.62", "-0.01")
    assert row["t_flop_s"] == ""


def test_empty_results_header_only(tmp_path):
    p = emit_report([], None, tmp_path / "e.csv")
    assert p.read_text() == ",".join(REPORT_COLUMNS) + "\n"


def test_csv_json_round_trip(small, tmp_path):
    results, summary = run_corpus(small, seed=3, repetitions=1)
    c = emit_report(results, summary, tmp_path / "r.csv", "csv")
    j = emit_report(results, summary, tmp_path / "r.json", "json")
    rows = list(csv.DictReader(c.open()))
    doc = json.loads(j.read_text())
    assert doc["columns"] == list(REPORT_COLUMNS)
    assert len(rows) == len(doc["cases"]) == 9
    for crow, jrow in zip(rows, doc["cases"]):
        for col in REPORT_COLUMNS:
            if col in ("a", "b"):
                assert crow[col] == jrow[col]
            else:
                assert float(crow[col]) == jrow[col]
    assert doc["summary"]["n_cases"] == 9
    assert doc["summary"]["win_rate"] == summary.win_rate


def test_six_significant_digits():
    r = CaseResult(a="a", b="b", sample_num=3, Z=7, F=22, cr=22 / 7, eps1=1 / 3, eps_f=0.25, eps2=1 / 15)
    row = bench.report_rows([r])[0]
    assert row["cr"] == "3.14286"
    assert row["eps1_pct"] == "33.3333"


def test_read_matrix_list(tmp_path):
    p = tmp_path / "list.txt"
    p.write_text("# header\nFEM_3D/poisson3Da\n\n  some/file.mtx  # trailing\nsynth:uniform:10x10:2\n")
    assert read_matrix_list(p) == ["FEM_3D/poisson3Da", "some/file.mtx", "synth:uniform:10x10:2"]


def test_parse_synthetic_entry():
    s = parse_synthetic_entry("synth:banded:100x50:3:seed=9:bandwidth=4")
    assert s == SyntheticSpec(100, 50, "banded", 3.0, seed=9, bandwidth=4)
    assert parse_synthetic_entry("synth:uniform:20:2").cols == 20
    with pytest.raises(ValueError):
        parse_synthetic_entry("synth:uniform:20:2:color=red")


def test_resolve_offline_uncached(tmp_path):
    with pytest.raises(FileNotFoundError, match="not cached"):
        bench.resolve_matrix("FEM_3D/poisson3Da", cache_dir=tmp_path, offline=True)
    with pytest.raises(FileNotFoundError, match="not cached"):
        bench.resolve_matrix("poisson3Da", cache_dir=tmp_path, offline=True)


def test_summary_statistics_by_hand():
    rs = [
        CaseResult(a="1", b="1", eps1=0.10, eps_f=0.12, eps2=-0.02 / 1.12, Z=1, F=1),
        CaseResult(a="2", b="2", eps1=-0.05, eps_f=-0.01, eps2=-0.04 / 0.99, Z=1, F=1),
        CaseResult(a="3", b="3", eps1=0.005, eps_f=0.02, eps2=-0.015 / 1.02, Z=1, F=1),
    ]
    s = bench.summarize(rs)
    assert s.mean_abs_eps1 == pytest.approx((0.10 + 0.05 + 0.005) / 3)
    assert s.worst_abs_eps1 == pytest.approx(0.10)
    # case 3 loses: |eps2| = 1.47% > 0.5%
    assert s.win_rate == pytest.approx(2 / 3)
    # Pearson by the textbook formula
    x = [0.10, -0.05, 0.005]
    y = [0.12, -0.01, 0.02]
    mx, my = sum(x) / 3, sum(y) / 3
    num = sum((a - mx) * (b - my) for a, b in zip(x, y))
    den = math.sqrt(sum((a - mx) ** 2 for a in x) * sum((b - my) ** 2 for b in y))
    assert s.pearson_eps1_eps_f == pytest.approx(num / den)
