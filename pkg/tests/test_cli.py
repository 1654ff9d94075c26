import csv
import io
import json
import subprocess
import sys

import pytest

from pagerank_spectral.cli import main


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_rank_two_cycle_defaults(capsys, write):
    code, out, _ = run(capsys, "rank", "--input", write("g.txt", "0 1\n1 0\n"))
    assert code == 0
    assert out == "0,0.5\n1,0.5\n"


def test_rank_json_to_file(capsys, write, tmp_path):
    dest = tmp_path / "out.json"
    code, out, _ = run(capsys, "rank", "--input", write("g.txt", "0 1\n1 2\n"),
                       "--format", "json", "--output", str(dest))
    assert code == 0 and out == ""
    doc = json.loads(dest.read_text())
    assert doc["converged"] is True and len(doc["scores"]) == 3


@pytest.mark.parametrize("alpha", ["1.0", "0", "-0.3", "abc"])
def test_rank_rejects_alpha_outside_open_interval(capsys, write, alpha):
    code, out, err = run(capsys, "rank", "--input", write("g.txt", "0 1\n"), "--alpha", alpha)
    assert code == 1
    assert out == ""
    assert "alpha" in err or "number" in err


def test_rank_max_iters_exhaustion(capsys, write):
    edges = "".join(f"{i} {(i + 1) % 10}\n" for i in range(10)) + "0 5\n"
    code, out, _ = run(capsys, "rank", "--input", write("g.txt", edges), "--alpha", "0.99",
                       "--max-iters", "1", "--format", "json")
    assert code == 2
    assert json.loads(out)["converged"] is False


def test_rank_input_errors(capsys, write, tmp_path):
    code, _, err = run(capsys, "rank", "--input", write("bad.txt", "0 x\n"))
    assert code == 1 and "line 1" in err
    code, _, _ = run(capsys, "rank", "--input", str(tmp_path / "missing.txt"))
    assert code == 1
    code, _, _ = run(capsys, "rank")
    assert code == 1


def test_rank_personalization(capsys, write):
    code, out, _ = run(capsys, "rank", "--input", write("g.txt", "# nodes: 3\n0 1\n"),
                       "--dangling", "personalization", "--v-file", write("v.txt", "1\n0\n0\n"),
                       "--format", "json")
    assert code == 0
    scores = json.loads(out)["scores"]
    assert abs(sum(scores) - 1) < 1e-12 and scores[0] > scores[2]
    code, _, err = run(capsys, "rank", "--input", write("g2.txt", "0 1\n"),
                       "--v-file", write("v2.txt", "0.5\n0.6\n"))
    assert code == 1


def test_verify_random_trials_pass(capsys):
    code, out, err = run(capsys, "verify", "--n", "10", "--trials", "20", "--alpha", "0.85", "--seed", "1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 20 and all(r["passed"] == "true" for r in rows)
    assert "20/20" in err


def test_verify_identity_fixture_reports_alpha(capsys, write):
    code, out, _ = run(capsys, "verify", "--n", "2", "--trials", "1", "--alpha", "0.6",
                       "--input", write("eye.txt", "0 0\n1 1\n"), "--format", "json")
    assert code == 0
    (row,) = json.loads(out)
    assert abs(row["lambda2_modulus"] - 0.6) <= 1e-12


def test_verify_dense_cap_refusal(capsys):
    code, out, err = run(capsys, "verify", "--n", "5000")
    assert code == 1 and out == ""
    assert "cap" in err


def test_verify_failure_exit_code(capsys):
    code, _, _ = run(capsys, "verify", "--n", "6", "--trials", "2", "--tol", "1e-300")
    assert code == 3


def test_sweep_ten_cycle(capsys, write):
    edges = "".join(f"{i} {(i + 1) % 10}\n" for i in range(10))
    code, out, _ = run(capsys, "sweep", "--input", write("c.txt", edges),
                       "--alpha-min", "0.5", "--alpha-max", "0.9", "--steps", "3")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [float(r["alpha"]) for r in rows] == pytest.approx([0.5, 0.7, 0.9])
    for r in rows:
        a = float(r["alpha"])
        assert abs(float(r["estimated_rate"]) - a) <= 0.05 * a
        assert float(r["predicted_rate"]) == pytest.approx(a, abs=1e-10)


def test_sweep_identity_exact_rate(capsys, write):
    code, out, _ = run(capsys, "sweep", "--input", write("eye.txt", "0 0\n1 1\n2 2\n3 3\n"),
                       "--alpha-min", "0.3", "--alpha-max", "0.9", "--steps", "4")
    assert code == 0
    for r in csv.DictReader(io.StringIO(out)):
        assert abs(float(r["estimated_rate"]) - float(r["alpha"])) <= 1e-10


def test_sweep_random_instance_has_prediction(capsys):
    code, out, _ = run(capsys, "sweep", "--n", "8", "--seed", "3", "--steps", "2", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 2
    for r in rows:
        assert r["predicted_rate"] is not None
        # fast contraction: the fallback estimate is used and stays under the alpha bound
        assert r["estimated_rate"] is not None and r["estimated_rate"] <= r["alpha"] + 0.05


@pytest.mark.parametrize("argv", [["--steps", "0"], ["--alpha-min", "0.9", "--alpha-max", "0.5"]])
def test_sweep_empty_grid(capsys, argv):
    code, out, _ = run(capsys, "sweep", *argv)
    assert code == 1 and out == ""


def test_module_entry_point(tmp_path):
    g = tmp_path / "g.txt"
    g.write_text("0 1\n1 0\n")
    proc = subprocess.run([sys.executable, "-m", "pagerank_spectral", "rank", "--input", str(g)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "0,0.5\n1,0.5\n"
    proc = subprocess.run([sys.executable, "-m", "pagerank_spectral", "rank", "--alpha", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and proc.stdout == ""
