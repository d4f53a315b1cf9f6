import csv
import io
import json

import pytest

from hopnav.cli import BENCH_FIELDS, bench_records, main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def p5file(tmp_path):
    p = tmp_path / "p5.txt"
    p.write_text("5 1\n1 2 1\n2 3 2\n3 4 1\n4 5 3\n")
    return p


def test_alpha(capsys):
    code, out, _ = run(capsys, "alpha", "--k", 2, "--n", "1024,7")
    assert code == 0
    assert out.splitlines()[1].split()[:3] == ["2", "1024", "10"]


def test_gen_deterministic(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "uniform-line", "--n", 4)
    assert code == 0 and out == "4 1\n1 2 1\n2 3 1\n3 4 1\n"
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for path in (a, b):
        assert run(capsys, "--seed", 7, "gen", "random-tree", "--n", 30, "--out", path)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    code, out, _ = run(capsys, "gen", "random-tree", "--n", 1)
    assert out == "1 0\n"
    for kind in ("random-points", "random-matrix"):
        code, out, _ = run(capsys, "gen", kind, "--n", 5)
        assert code == 0 and out.split()[1] == "5"
    assert run(capsys, "gen", "random-tree", "--n", 0)[0] == 2


def test_build_and_query(capsys, tmp_path, p5file):
    d = tmp_path / "sp"
    stats = tmp_path / "stats.csv"
    assert run(capsys, "build", "--tree", p5file, "--k", 2, "--out", d, "--stats", stats)[0] == 0
    assert len((d / "spanner.txt").read_text().splitlines()) == 6
    assert json.loads((d / "meta.json").read_text()) == {"k": 2, "edges": 6}
    row = next(csv.DictReader(stats.open()))
    assert row["edges"] == "6"
    code, out, _ = run(capsys, "query", "--spanner-dir", d, "--u", 1, "--v", 5, "--count-ops")
    assert code == 0
    assert out.splitlines()[1].split() == ["1-3-5", "2", "7", "1", "1"]
    assert run(capsys, "query", "--spanner-dir", d, "--u", 1, "--v", 9)[0] == 2
    code, out, _ = run(capsys, "build", "--tree", p5file, "--k", 2)
    assert "1 3 3" in out.splitlines()


def test_route(capsys, tmp_path, p5file):
    pairs = tmp_path / "pairs.txt"
    pairs.write_text("1 5\n2 4\n3 3\n")
    audit = tmp_path / "audit.csv"
    code, out, _ = run(capsys, "--format", "csv", "route", "--tree", p5file, "--pairs", pairs,
                       "--audit", audit)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["trace"] == "1-3-5" and rows[0]["weight"] == "7"
    assert rows[2]["hops"] == "0"
    assert next(csv.DictReader(audit.open()))["n"] == "5"


def test_metric_commands(capsys, tmp_path):
    m = tmp_path / "m.txt"
    assert run(capsys, "gen", "random-matrix", "--n", 12, "--out", m)[0] == 0
    code, out, _ = run(capsys, "spt", "--metric", m, "--root", 0)
    assert code == 0
    for line in out.splitlines()[1:]:
        _, _, d, md = line.split()
        assert d == md
    code, out, _ = run(capsys, "mst", "--metric", m)
    assert code == 0 and out.splitlines()[-1].startswith("total")
    summary = tmp_path / "s.csv"
    code, out, _ = run(capsys, "sparsify", "--metric", m, "--summary", summary)
    assert code == 0
    header, row = (ln.split() for ln in summary.read_text().splitlines())
    assert float(row[header.index("stretch_out")]) <= 3.0


def test_verify_and_product(capsys, tmp_path, p5file):
    q = tmp_path / "q.txt"
    q.write_text("1 3 1\n1 5 4\n")
    code, out, _ = run(capsys, "verify-mst", "--tree", p5file, "--queries", q, "--optimized")
    assert code == 0
    lines = [ln.split() for ln in out.splitlines()[1:]]
    assert [ln[3] for ln in lines] == ["0", "1"]
    q.write_text("1 2 1\n")
    assert run(capsys, "verify-mst", "--tree", p5file, "--queries", q)[0] == 2
    pairs = tmp_path / "p.txt"
    pairs.write_text("1 5\n5 1\n")
    code, out, _ = run(capsys, "product", "--tree", p5file, "--pairs", pairs, "--op", "max")
    assert [ln.split()[2] for ln in out.splitlines()[1:]] == ["3", "3"]


def test_bench(capsys, tmp_path):
    recs = bench_records([1024], [2])
    assert recs[0]["edges"] >= 1280 and recs[0]["ok"] == 1
    assert bench_records([], []) == []
    out = tmp_path / "b.csv"
    assert run(capsys, "bench", "--n", "64,128", "--k", "2,4", "--out", out)[0] == 0
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == BENCH_FIELDS and len(rows) == 4
    code, text, _ = run(capsys, "--format", "csv", "bench")
    assert code == 0 and text.strip() == ",".join(BENCH_FIELDS)


def test_input_errors(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("3 1\n1 2 1\n")
    assert run(capsys, "build", "--tree", bad)[0] == 2
    assert run(capsys, "build", "--tree", tmp_path / "missing.txt")[0] == 2
    assert run(capsys, "nosuch")[0] == 2
    assert run(capsys, "build", "--tree", bad, "--k", 1)[0] == 2
