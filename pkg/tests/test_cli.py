import json

import pytest

from spgemm_oracle.cli import main
from spgemm_oracle.csr import identity
from spgemm_oracle.fetch import cache_path
from spgemm_oracle.mmio import read_matrix_market, write_matrix_market


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def values(text):
    out = {}
    for line in text.splitlines():
        parts = line.split()
        if len(parts) == 2:
            out[parts[0]] = parts[1]
    return out


@pytest.fixture
def eye(tmp_path):
    return write_matrix_market(identity(600), tmp_path / "eye.mtx")


def test_gen_writes_readable_file(capsys, tmp_path):
    out = tmp_path / "u.mtx"
    code, text, _ = run(capsys, "gen", "uniform", 1000, 1000, 4, "--seed", 7, "--out", out)
    assert code == 0 and "nnz" in text
    m = read_matrix_market(out)
    assert m.shape == (1000, 1000)
    assert 3800 <= m.nnz <= 4200


def test_gen_rejects_impossible_density(capsys, tmp_path):
    code, _, err = run(capsys, "gen", "uniform", 10, 5, 8, "--out", tmp_path / "x.mtx")
    assert code == 1 and "exceeds cols" in err


def test_flop_identity(capsys, eye):
    code, text, _ = run(capsys, "flop", eye)
    assert code == 0
    v = values(text)
    assert v["total_flop"] == "600" and v["max_row_flop"] == "1"


def test_flop_json(capsys, eye):
    code, text, _ = run(capsys, "flop", eye, "--json", "--no-histogram")
    doc = json.loads(text)
    assert doc["total_flop"] == 600 and doc["histogram"] is None


def test_exact_identity(capsys, eye):
    code, text, _ = run(capsys, "exact", eye)
    v = values(text)
    assert v["nnz_c"] == "600" and v["cr"] == "1"


def test_mismatched_pair_needs_reshape(capsys, tmp_path, eye):
    small = write_matrix_market(identity(300), tmp_path / "s.mtx")
    code, _, err = run(capsys, "flop", eye, small)
    assert code == 1 and "dimension mismatch" in err
    code, text, _ = run(capsys, "flop", eye, small, "--reshape")
    assert code == 0
    # the left 300 columns of the 600 identity hold 300 entries
    assert values(text)["total_flop"] == "300"


def test_predict_identity(capsys, eye, tmp_path):
    s = tmp_path / "rows.csv"
    code, text, _ = run(capsys, "predict", eye, "--exact", "--structure-out", s)
    assert code == 0
    v = values(text)
    assert float(v["z2_star"]) == 600 and float(v["predicted_cr"]) == 1
    assert v["nnz_c"] == "600"
    assert float(v["eps2_pct"]) == 0
    lines = s.read_text().splitlines()
    assert lines[0] == "row,flop,predicted_nnz,allocation"
    assert lines[1] == "0,1,1,1" and len(lines) == 601


def test_predict_fixed_seed_repeats(capsys, tmp_path):
    out = tmp_path / "p.mtx"
    run(capsys, "gen", "power-law", 20000, 20000, 5, "--seed", 3, "--out", out)
    first = run(capsys, "predict", out, "--seed", 9, "--exact")[1]
    second = run(capsys, "predict", out, "--seed", 9, "--exact")[1]
    assert first == second
    other = run(capsys, "predict", out, "--seed", 10)[1]
    assert values(other)["z2_star"] != values(first)["z2_star"]


def test_threads_do_not_change_output(capsys, tmp_path):
    out = tmp_path / "b.mtx"
    run(capsys, "gen", "banded", 30000, 30000, 6, "--seed", 2, "--out", out)
    texts = {run(capsys, "predict", out, "--exact", "--threads", t)[1] for t in (1, 2, 8)}
    assert len(texts) == 1


def test_bench_synthetic_list(capsys, tmp_path):
    lst = tmp_path / "l.txt"
    lst.write_text("# two specs\nsynth:uniform:2000x2000:4:seed=1\nsynth:banded:2000x2000:6:seed=2\n")
    report = tmp_path / "r.csv"
    code, text, _ = run(capsys, "bench", lst, "--no-timing", "--out", report)
    assert code == 0 and text.startswith("cases 4 failed 0")
    rows = report.read_text().splitlines()
    assert len(rows) == 5


def test_bench_offline_uncached_is_a_failure(capsys, tmp_path):
    lst = tmp_path / "l.txt"
    lst.write_text("FEM_3D/poisson3Da\nsynth:uniform:1000x1000:4\n")
    code, text, _ = run(capsys, "bench", lst, "--no-timing", "--offline", "--cache-dir", tmp_path / "c")
    assert code == 0
    assert "cases 1 failed 0 degenerate 0 unloaded 1" in text
    assert "failed FEM_3D/poisson3Da" in text


def test_bench_nothing_loadable(capsys, tmp_path):
    lst = tmp_path / "l.txt"
    lst.write_text("FEM_3D/poisson3Da\n")
    code, _, err = run(capsys, "bench", lst, "--offline", "--cache-dir", tmp_path / "c")
    assert code == 1 and "no matrix" in err


def test_fetch_uses_cache(capsys, tmp_path):
    target = cache_path("Grp", "tiny", tmp_path)
    target.parent.mkdir(parents=True)
    write_matrix_market(identity(3), target)
    code, text, _ = run(capsys, "fetch", "Grp", "tiny", "--cache-dir", tmp_path)
    assert code == 0 and text.strip() == str(target)


def test_bad_matrix_file(capsys, tmp_path):
    bad = tmp_path / "bad.mtx"
    bad.write_text("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n3 1\n")
    code, _, err = run(capsys, "flop", bad)
    assert code == 1 and "line 3" in err
