import json
import subprocess
import sys

import pytest

from kcuts.cli import main


def run(argv, capsys, stdin=None, monkeypatch=None):
    if stdin is not None:
        import io

        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def ring_file(tmp_path, capsys):
    path = tmp_path / "ring.txt"
    assert main(["gen", "--family", "ring-of-cliques", "--params", "k=4,s=5", "--out", str(path)]) == 0
    capsys.readouterr()
    return path


def test_gen_header_and_edges(capsys):
    code, out, _ = run(["gen", "--family", "path", "--params", "n=3"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# kcuts")
    assert lines[1:] == ["0 1 1.0", "1 2 1.0"]


def test_cut_json(ring_file, capsys):
    code, out, _ = run(["cut", "--graph", str(ring_file), "--k", "4", "--seed", "3"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["tool"] == "kcuts" and doc["command"] == "cut" and doc["seed"] == 3
    assert "duration_s" not in doc
    res = doc["result"]
    assert len(res["cuts"]) == 2
    assert res["certificate"]["verdict"] == "pass"
    assert res["config"]["trials"] == 24


def test_cut_random_seed_echoed(ring_file, capsys):
    code, out, _ = run(["cut", "--graph", str(ring_file), "--k", "4", "--trials", "2"], capsys)
    doc = json.loads(out)
    assert isinstance(doc["seed"], int) and doc["config"]["seed"] == doc["seed"]


def test_cut_timing(ring_file, capsys):
    _, out, _ = run(["cut", "--graph", str(ring_file), "--k", "4", "--seed", "1", "--trials", "2", "--timing"], capsys)
    assert json.loads(out)["duration_s"] >= 0


def test_cut_csv(ring_file, capsys):
    _, out, _ = run(["cut", "--graph", str(ring_file), "--k", "4", "--seed", "1", "--format", "csv-summary"], capsys)
    lines = out.splitlines()
    assert lines[0] == "index,size,set_weight,cut_weight,expansion"
    assert len(lines) == 3


def test_cut_stdin(capsys, monkeypatch):
    code, out, _ = run(["cut", "--k", "2", "--seed", "0"], capsys, stdin="0 1 1\n1 2 1\n2 3 1\n", monkeypatch=monkeypatch)
    assert code == 0
    assert json.loads(out)["result"]["n"] == 4


def test_spectrum(ring_file, capsys):
    _, out, _ = run(["spectrum", "--graph", str(ring_file), "--k", "3"], capsys)
    res = json.loads(out)["result"]
    assert len(res["eigenvalues"]) == 3
    assert abs(res["eigenvalues"][0]) < 1e-10
    assert res["solver"]["mode"] == "dense"


def test_verify_with_brute_force(tmp_path, capsys):
    g = tmp_path / "g.txt"
    g.write_text("0 1 1\n1 2 1\n2 3 1\n")
    cuts = tmp_path / "c.txt"
    cuts.write_text("0 1\n3\n")
    _, out, _ = run(["verify", "--graph", str(g), "--cuts", str(cuts), "--brute-force"], capsys)
    res = json.loads(out)["result"]
    assert res["certificate"]["verdict"] == "pass"
    assert res["lambda_source"] == "computed"
    assert res["brute_force_min_expansion"]["members"] == [0, 1]
    assert res["brute_force_k_cuts"]["k"] == 2


def test_verify_corrupted_lambda(tmp_path, capsys):
    g = tmp_path / "g.txt"
    g.write_text("0 1 1\n1 2 1\n2 3 1\n")
    cuts = tmp_path / "c.txt"
    cuts.write_text("0 1\n")
    code, out, _ = run(["verify", "--graph", str(g), "--cuts", str(cuts), "--lambda-k", "10"], capsys)
    assert code == 0
    assert json.loads(out)["result"]["certificate"]["verdict"] == "fail"


def test_bench_fig2_csv(tmp_path, capsys):
    csv_path = tmp_path / "out.csv"
    code, out, _ = run(["bench", "--experiment", "fig2", "--params", "n=65,k=4", "--seed", "0", "--trials", "4", "--csv", str(csv_path)], capsys)
    assert code == 0
    assert json.loads(out)["result"]["experiment"] == "fig2"
    assert csv_path.read_text().startswith("experiment,n,k,p,quantity,value\n")


@pytest.mark.parametrize(
    "argv, code, needle",
    [
        (["cut", "--k", "3", "--graph", "/nonexistent/file"], 1, "No such file"),
        (["gen", "--family", "nope"], 1, "unknown family"),
        (["gen", "--family", "path", "--params", "n"], 1, "key=value"),
        (["bench", "--experiment", "fig2", "--params", "n=13,k=3"], 1, "n > k^3"),
        (["cut"], 2, ""),
        (["frobnicate"], 2, ""),
    ],
)
def test_error_exit_codes(argv, code, needle, capsys):
    got, _, err = run(argv, capsys)
    assert got == code
    assert needle in err


def test_malformed_graph_exit(tmp_path, capsys):
    g = tmp_path / "bad.txt"
    g.write_text("0 1 1\n1 1 2\n")
    code, _, err = run(["spectrum", "--graph", str(g), "--k", "2"], capsys)
    assert code == 1 and "line 2" in err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "kcuts", "--version"], capture_output=True, text=True, check=True)
    assert out.stdout.startswith("kcuts ")
