import json
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from semigroup_lab.cli import main
from semigroup_lab.spectrum import SpectrumSpec

DATA = Path(__file__).parent / "data"


@pytest.fixture
def spec_file(tmp_path):
    p = tmp_path / "spec.json"
    p.write_text(SpectrumSpec.exp_comb(1.0, 4096).to_json())
    return p


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_norms_dyadic(spec_file, capsys):
    code, out, _ = run(["norms", "--spec", spec_file, "--kernel", "inv_frac:1", "--grid", "dyadic:1:1e6"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 22
    assert lines[0] == "abscissa,value,argmax_k"


def test_norms_to_file_writes_sidecar(spec_file, tmp_path, capsys):
    out = tmp_path / "c.csv"
    code, _, _ = run(["norms", "--spec", spec_file, "--kernel", "inv_frac:1", "--grid", "1,2,4", "-o", out], capsys)
    assert code == 0 and out.exists() and out.with_suffix(".json").exists()
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta


def test_bad_tau_is_input_error(spec_file, capsys):
    code, _, err = run(["cayley", "--spec", spec_file, "--schedule", "constant:-1", "--steps", "10"], capsys)
    assert code == 2
    assert json.loads(err)["error"] in ("input", "schema")


def test_cayley_csv(spec_file, capsys):
    code, out, _ = run(["cayley", "--spec", spec_file, "--schedule", "constant:2", "--steps", "64",
                        "--samples", "1,2,64"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and lines[0].startswith("n,value") and len(lines) == 4
    assert float(lines[1].split(",")[1]) == pytest.approx(0.3162278, abs=1e-7)


def test_lyapunov_probe_csv_and_verdict(spec_file, tmp_path, capsys):
    verdict = tmp_path / "v.json"
    code, out, _ = run(["lyapunov", "--spec", spec_file, "--probe", "q_bound", "--alpha", "0.5",
                        "--grid", "dyadic:1e-6:0.5", "--verdict", verdict], capsys)
    assert code == 0 and out.startswith("xi,value\n")
    v = json.loads(verdict.read_text())
    assert set(v) == {"probe", "constant", "finite", "trend"} and v["finite"]


def test_bnorm_header(capsys):
    code, out, _ = run(["bnorm", "--family", "fta", "--alpha", "1", "--grid", "1,2"], capsys)
    assert code == 0
    assert out.splitlines()[0].startswith("t,")
    assert len(out.strip().splitlines()) == 3


def test_matrix_ops(tmp_path, capsys):
    p = tmp_path / "m.json"
    p.write_text(json.dumps([[[-1, 0], [0, 0]], [[0, 0], [-2, 0]]]))
    code, out, _ = run(["matrix", p, "lyapunov"], capsys)
    m = np.array([[complex(*z) for z in row] for row in json.loads(out)["matrix"]])
    assert code == 0
    np.testing.assert_allclose(m, np.diag([0.5, 0.25]), atol=1e-15)
    code, out, _ = run(["matrix", p, "cayley", "--tau", "2"], capsys)
    assert json.loads(out)["matrix"][0][0] == [0.0, 0.0]
    code, out, _ = run(["matrix", p, "eigenvalues"], capsys)
    assert sorted(e[0] for e in json.loads(out)["eigenvalues"]) == [-2, -1]


def test_matrix_bad_file(tmp_path, capsys):
    p = tmp_path / "m.json"
    p.write_text("[[1, 2]]")
    code, _, err = run(["matrix", p, "expm"], capsys)
    assert code == 2 and "[re, im] pairs" in json.loads(err)["message"]


def test_fit_json(tmp_path, capsys):
    t = 2.0 ** np.arange(0, 21)
    p = tmp_path / "c.csv"
    p.write_text("t,value,argmax_k\n" + "".join(f"{float(a)!r},{float(3 * a ** -0.5)!r},-1\n" for a in t))
    code, out, _ = run(["fit", p, "--liminf", "0.5:2.9"], capsys)
    d = json.loads(out)
    assert code == 0 and d["fit"]["exponent"] == pytest.approx(0.5, abs=1e-12) and d["liminf"]["holds"]
    code, out, _ = run(["fit", p, "--model", "power:0.5"], capsys)
    assert json.loads(out)["verdict"]["trend"] == pytest.approx(1.0)


def test_fit_too_few_samples_is_numerical(tmp_path, capsys):
    p = tmp_path / "c.csv"
    p.write_text("t,value,argmax_k\n1,1,-1\n2,0.5,-1\n")
    code, _, err = run(["fit", p], capsys)
    assert code == 3 and json.loads(err)["error"] == "numerical"


def test_threads_env(spec_file, monkeypatch, capsys):
    args = ["norms", "--spec", spec_file, "--kernel", "inv_frac:1", "--grid", "dyadic:1:1e4"]
    _, serial, _ = run(args, capsys)
    monkeypatch.setenv("SEMIGROUP_LAB_THREADS", "2")
    _, threaded, _ = run(args, capsys)
    assert serial == threaded
    monkeypatch.setenv("SEMIGROUP_LAB_THREADS", "many")
    assert run(args, capsys)[0] == 2


def test_run_config_and_determinism(tmp_path, capsys):
    cfg = tmp_path / "small.json"
    for name in ("small.json", "matrix.json"):
        shutil.copy(DATA / name, tmp_path / name)
    outs = []
    for i in range(2):
        out_dir = tmp_path / f"out{i}"
        code, report, _ = run(["run", cfg, "--out", out_dir], capsys)
        assert code == 0, report
        assert json.loads(report)["passed"]
        outs.append({p.name: p.read_bytes() for p in sorted(out_dir.iterdir())})
    assert outs[0] == outs[1]
    assert {"rate.csv", "rate.json", "rate.verdict.json", "matrix_cn.csv"} <= set(outs[0])


def test_run_failed_expectation_exit1(tmp_path, capsys):
    cfg = json.loads((DATA / "small.json").read_text())
    cfg["scenarios"] = cfg["scenarios"][:1]
    cfg["scenarios"][0]["expect"]["exponent"] = [0.9, 1.1]
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg))
    code, report, _ = run(["run", p], capsys)
    assert code == 1 and not json.loads(report)["passed"]


def test_malformed_config_exit2_with_pointer(capsys):
    code, _, err = run(["run", DATA / "malformed.json"], capsys)
    rep = json.loads(err)
    assert code == 2 and rep["error"] == "schema"
    assert rep["pointer"] == "/scenarios/0/spectrum/modes"


def test_config_not_json(tmp_path, capsys):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    assert run(["run", p], capsys)[0] == 2


def test_verify_subset(capsys, tmp_path):
    js = tmp_path / "v.json"
    code, out, _ = run(["verify", "--criteria", "1,9", "--json", js], capsys)
    assert code == 0
    assert "[PASS] criterion 1" in out and "2/2 criteria passed" in out
    assert len(json.loads(js.read_text())) == 2


def test_verify_unknown_criterion(capsys):
    assert run(["verify", "--criteria", "42"], capsys)[0] == 2


def test_console_entry_point(spec_file):
    r = subprocess.run([sys.executable, "-m", "semigroup_lab", "norms", "--spec", str(spec_file), "--kernel",
                        "inv_frac:1", "--grid", "1,2"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("abscissa,value")


def test_missing_matrix_source_pointer(tmp_path, capsys):
    cfg = json.loads((DATA / "small.json").read_text())
    cfg["scenarios"] = cfg["scenarios"][1:]
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg))
    code, _, err = run(["run", p], capsys)
    assert code == 2 and json.loads(err)["pointer"] == "/scenarios/0/matrix"
