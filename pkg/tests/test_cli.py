import json
import math
import subprocess
import sys

import pytest

from zhanchain.cli import main
from zhanchain.experiments import CSV_COLUMNS


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(path, text):
    path.write_text(text)
    return str(path)


@pytest.fixture
def swap(tmp_path):
    return write(tmp_path / "swap.mat", "2\n0 1\n1 0\n")


@pytest.fixture
def ones3(tmp_path):
    return write(tmp_path / "ones3.mat", "3\n1 1 1\n1 1 1\n1 1 1\n")


def test_counterexample(capsys):
    code, out, _ = run(capsys, "counterexample")
    assert code == 0
    rep = json.loads(out)
    pair = rep["counterexample_pair"]
    assert pair["chain"]["rho_had"] == 0.0
    assert pair["chain"]["rho_conv"] == 1.0
    assert pair["submultiplicativity_fails"]
    fam = rep["unbounded_family"]
    assert fam["rho_product"] == pytest.approx(3 + 2 * math.sqrt(2), rel=1e-12)
    assert fam["rho_hadamard"] == 1.0


def test_counterexample_family_args(capsys):
    code, out, _ = run(capsys, "counterexample", "--family", "10", "10")
    assert code == 0
    fam = json.loads(out)["unbounded_family"]
    assert fam["exact_rho_product"] >= 100
    assert fam["chain"]["rho_conv"] == pytest.approx(fam["exact_rho_product"], rel=1e-12)


def test_trace_limit_swap(capsys, swap):
    code, out, _ = run(capsys, "trace-limit", swap, "--m-max", "8")
    assert code == 0
    rep = json.loads(out)
    assert rep["trace_sequence"]["oscillating"] is True
    assert rep["structure"]["period"] == 2
    assert rep["permutation_cycle_type"] == [2]
    assert rep["permutation_trace_period"] == 2
    assert rep["periodic_pathology"] is True
    assert rep["trace_sequence"]["s"][0] == 0.0


def test_verify_ones(capsys, ones3):
    code, out, _ = run(capsys, "verify", ones3, ones3)
    assert code == 0
    rep = json.loads(out)
    chain = rep["chain"]
    assert (chain["rho_had"], chain["rho_mid"], chain["rho_conv"]) == pytest.approx((3, 3, 9), rel=1e-12)
    assert chain["rho_had"] / chain["rho_mid"] == pytest.approx(1.0, abs=1e-9)
    assert [t["k"] for t in rep["trace_chains"]] == [1, 2]


def test_verify_json_input_and_k(capsys, tmp_path, swap):
    b = write(tmp_path / "b.json", '{"n": 2, "entries": [1, 1, 0, 1]}')
    code, out, _ = run(capsys, "verify", swap, b, "--k", "3", "--tol", "1e-9")
    assert code == 0
    assert [t["k"] for t in json.loads(out)["trace_chains"]] == [3]


def test_prooftrace(capsys, tmp_path):
    a = write(tmp_path / "a.mat", "2\n0.5 0.2\n0.9 0.1\n")
    b = write(tmp_path / "b.mat", "2\n0.3 0.7\n0.4 0.8\n")
    code, out, _ = run(capsys, "prooftrace", a, b, "--k", "2")
    assert code == 0
    rep = json.loads(out)
    pv = rep["proof_vectors"]
    assert pv["length"] == 16 and pv["multiset_equal"] and pv["xy_equals_t1"] and pv["xx_equals_t2"]
    assert rep["diagonal_subset"]["holds"]


@pytest.mark.parametrize(
    "argv_factory",
    [
        lambda p: ["verify", str(p / "missing.mat"), str(p / "missing.mat")],
        lambda p: ["verify", write(p / "neg.mat", "2\n1 -1\n0 1\n"), write(p / "ok.mat", "2\n1 1\n0 1\n")],
        lambda p: ["verify", write(p / "short.mat", "2\n1 1\n"), write(p / "ok.mat", "2\n1 1\n0 1\n")],
        lambda p: ["verify", write(p / "a2.mat", "2\n1 1\n0 1\n"), write(p / "a1.mat", "1\n1\n")],
        lambda p: ["trace-limit", write(p / "a.mat", "1\n1\n"), "--m-max", "2"],
        lambda p: ["fuzz"],
        lambda p: ["fuzz", "--config", write(p / "c.json", '{"trials": -3}')],
        lambda p: ["fuzz", "--config", write(p / "c.json", "not json")],
        lambda p: ["nonsense"],
        lambda p: [],
        lambda p: ["counterexample", "--family", "-1", "2"],
        lambda p: ["prooftrace", write(p / "a.mat", "1\n1\n"), write(p / "b.mat", "1\n1\n"), "--k", "0"],
    ],
)
def test_usage_errors_exit_1(capsys, tmp_path, argv_factory):
    code, _, err = run(capsys, *argv_factory(tmp_path))
    assert code == 1
    assert err.startswith("error:")


def test_fuzz_writes_csv(capsys, tmp_path):
    cfg = write(tmp_path / "c.json", json.dumps({"distribution": {"kind": "Sparse", "density": 0.5}, "trials": 20, "seed": 3}))
    out_csv = tmp_path / "out.csv"
    code, out, _ = run(capsys, "fuzz", "--config", cfg, "--csv", str(out_csv))
    assert code == 0
    summary = json.loads(out)["summary"]
    assert summary["violations"] == 0 and summary["trials"] == 20
    lines = out_csv.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS) and len(lines) == 21
    assert not list(tmp_path.glob("violation_*"))


def test_fuzz_thread_override_is_byte_identical(capsys, tmp_path):
    cfg = write(tmp_path / "c.json", json.dumps({"distribution": "Uniform01", "trials": 200, "seed": 42}))
    run(capsys, "fuzz", "--config", cfg, "--csv", str(tmp_path / "t1.csv"), "--threads", "1")
    run(capsys, "fuzz", "--config", cfg, "--csv", str(tmp_path / "t4.csv"), "--threads", "4")
    assert (tmp_path / "t1.csv").read_bytes() == (tmp_path / "t4.csv").read_bytes()


def test_subprocess_exit_codes(tmp_path):
    ok = subprocess.run([sys.executable, "-m", "zhanchain", "counterexample"], capture_output=True, text=True)
    assert ok.returncode == 0 and json.loads(ok.stdout)["counterexample_pair"]["rho_a"] == 0.0
    bad = subprocess.run([sys.executable, "-m", "zhanchain", "verify", "nope.mat"], capture_output=True, text=True)
    assert bad.returncode == 1


def test_subprocess_violation_exit_2(tmp_path):
    # force a violation by breaking the chain check inside the child process
    script = (
        "import dataclasses, sys\n"
        "import zhanchain.experiments as ex\n"
        "real = ex.zhan_chain\n"
        "ex.zhan_chain = lambda a, b, tol: dataclasses.replace(real(a, b, tol), second_holds=False)\n"
        "from zhanchain.cli import main\n"
        "sys.exit(main(sys.argv[1:]))\n"
    )
    cfg = write(tmp_path / "c.json", json.dumps({"trials": 2, "seed": 1}))
    proc = subprocess.run(
        [sys.executable, "-c", script, "fuzz", "--config", cfg, "--csv", str(tmp_path / "o.csv")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2
    assert json.loads(proc.stdout)["summary"]["violations"] == 2
    assert (tmp_path / "violation_0.a.mat").exists() and (tmp_path / "violation_1.b.mat").exists()
