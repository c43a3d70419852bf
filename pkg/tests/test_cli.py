import json

import pytest

from ree_unital.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_build_and_verify_s(tmp_path, capsys):
    path = tmp_path / "s.txt"
    assert run(capsys, "build-sl28", "--out", str(path))[0] == 0
    assert path.read_text().startswith("incidence v=28 b=63")
    code, out, _ = run(capsys, "verify", "--in", str(path))
    assert code == 0 and out == "v=28 b=63 r=9 k=4 lambda=1\n"
    code, out, _ = run(capsys, "verify", "--in", str(path), "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["schema_version"] == 1 and doc["command"] == "verify"
    assert (doc["v"], doc["b"], doc["r"], doc["k"], doc["lambda"]) == (28, 63, 9, 4, 1)


def test_verify_failure_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("incidence v=4 b=2\n0 1\n2 3\n")
    code, out, _ = run(capsys, "verify", "--in", str(path))
    assert code == 1 and out.startswith("not a 2-design")


def test_build_rt3_json_and_iso(tmp_path, capsys):
    rt = tmp_path / "rt3.json"
    s = tmp_path / "s.txt"
    assert run(capsys, "build-rt", "--q", "3", "--format", "json", "--out", str(rt))[0] == 0
    doc = json.loads(rt.read_text())
    assert doc["schema_version"] == 1 and doc["v"] == 28 and doc["b"] == 63 and "GF(3^1)" in doc["field"]
    run(capsys, "build-sl28", "--out", str(s))
    code, out, _ = run(capsys, "iso", "--a", str(s), "--b", str(rt))
    assert code == 0 and sorted(map(int, out.split())) == list(range(28))
    code, _, _ = run(capsys, "iso", "--a", str(s), "--b", str(rt), "--budget", "3")
    assert code == 3


def test_build_rt27_needs_out(capsys):
    code, _, err = run(capsys, "build-rt", "--q", "27")
    assert code == 2 and "--out" in err


def test_usage_errors(capsys):
    assert run(capsys, "build-rt", "--q", "5")[0] == 2
    assert run(capsys, "search-intersections", "--q", "9")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "verify")[0] == 2
    assert run(capsys, "catalog", "--workers", "0")[0] == 2
    assert run(capsys, "verify", "--in", "/nonexistent/file")[0] == 2


def test_find_dual_kn(tmp_path, capsys):
    s = tmp_path / "s.txt"
    run(capsys, "build-sl28", "--out", str(s))
    code, out, _ = run(capsys, "find-dual-kn", "--n", "5", "--in", str(s))
    assert code == 0 and out.startswith("status=found")
    assert run(capsys, "find-dual-kn", "--n", "5", "--in", str(s), "--budget", "2")[0] == 3
    assert run(capsys, "find-dual-kn", "--n", "2", "--in", str(s))[0] == 2


def test_catalog_reports_the_printed_misprint(capsys):
    code, out, _ = run(capsys, "catalog")
    assert code == 1
    fails = [l for l in out.splitlines() if l.startswith("FAIL")]
    assert len(fails) == 2 and all("[printed]" in l for l in fails)
    code, out, _ = run(capsys, "dump-catalog")
    assert code == 0 and "S = " in out


def test_search_intersections_output(capsys):
    code, out, _ = run(capsys, "search-intersections", "--q", "3")
    assert code == 0 and out == "x=2 s=0 m=2\nx=0 s=2 m=1\n"


def test_outputs_are_byte_identical_across_workers(tmp_path, capsys):
    outs = []
    for w in ("1", "3"):
        p = tmp_path / f"search{w}.json"
        assert run(capsys, "search-intersections", "--q", "243", "--workers", w, "--format", "json", "--out", str(p))[0] == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    run(capsys, "build-rt", "--q", "3", "--workers", "1", "--out", str(a))
    run(capsys, "build-rt", "--q", "3", "--workers", "2", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_workers_env(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("REE_UNITAL_WORKERS", "2")
    p = tmp_path / "r.txt"
    assert run(capsys, "search-intersections", "--q", "27", "--out", str(p))[0] == 0
    assert len(p.read_text().splitlines()) == 2


@pytest.mark.parametrize("q,count", [(3, 1), (27, 9)])
def test_pearls(q, count, capsys):
    code, out, _ = run(capsys, "pearls", "--q", str(q))
    assert code == 0
    assert out.splitlines()[0] == f"configurations={count} points={3 * q + 1} blocks={q + 2}"


def test_structure_checks_and_omega_fix(capsys):
    code, out, _ = run(capsys, "structure-checks", "--q", "3")
    assert code == 0 and "FAIL" not in out
    code, out, _ = run(capsys, "omega-fix", "--q", "27", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["count"] == 28 and doc["command"] == "omega-fix"
