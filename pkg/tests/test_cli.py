import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from multieq.cli import main, parse_grid

FIXTURE = Path(__file__).resolve().parents[1] / "fixtures" / "example1_n6.csv"


def run(*args):
    return main([str(a) for a in args])


def files(d):
    return {p.name: p.read_bytes() for p in sorted(Path(d).iterdir())}


def test_analyze(tmp_path):
    assert run("analyze", FIXTURE, "--out", tmp_path) == 0
    s = json.loads((tmp_path / "summary.json").read_text())
    assert s["pi2"] == pytest.approx(1.216, abs=1.5e-3)
    assert s["lambda2nd_simple"] is True
    for k in "abcd":
        assert (tmp_path / f"fig2_disks_{k}.csv").exists()
    cfg = json.loads((tmp_path / "config.json").read_text())
    assert cfg["seed"] == 0 and cfg["psi"] == "boltzmann"


def test_malformed_csv(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("0,1\n1,oops\n")
    assert run("analyze", bad, "--out", tmp_path / "o") == 1
    assert "oops" in capsys.readouterr().err


def test_missing_file(tmp_path):
    assert run("analyze", tmp_path / "nope.csv", "--out", tmp_path / "o") == 1


def test_negative_entry(tmp_path, capsys):
    A = np.array([[0, 1, 1], [1, 0, 1], [1, -2, 0]])
    p = tmp_path / "neg.csv"
    np.savetxt(p, A, delimiter=",")
    assert run("analyze", p, "--out", tmp_path / "o") == 2
    err = json.loads((tmp_path / "o" / "error.json").read_text())
    assert err["error"] == "NegativeEntry" and [2, 1] in err["indices"]
    assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["kind"] == "model"


def test_not_symmetrizable(tmp_path):
    p = tmp_path / "ns.json"
    p.write_text(json.dumps({"n": 3, "rows": [[0, 2, 1], [1, 0, 1], [1, 1, 0]]}))
    assert run("analyze", "--input", p, "--out", tmp_path / "o") == 2
    err = json.loads((tmp_path / "o" / "error.json").read_text())
    assert err["error"] == "NotSymmetrizable" and err["indices"]


def test_numerical_failure_exit(tmp_path):
    assert run("example2", "--n", 30, "--p", 0.001, "--pi-grid", "1:2:1", "--starts", 1,
               "--out", tmp_path) == 3


def test_equilibria_1838(tmp_path, capsys):
    assert run("equilibria", FIXTURE, "--pi", 1.838, "--starts", 1000, "--seed", 7,
               "--out", tmp_path) == 0
    recs = json.loads((tmp_path / "census_pi_1.838.json").read_text())
    orth = [r["orthant"] for r in recs]
    assert len(recs) >= 7
    assert orth.count("--+-++") >= 3 and orth.count("++-+--") >= 3
    assert "equilibria" in capsys.readouterr().out


def test_equilibria_subthreshold(tmp_path):
    assert run("equilibria", FIXTURE, "--pi", 0.5, "--starts", 200, "--out", tmp_path) == 0
    recs = json.loads((tmp_path / "census_pi_0.5.json").read_text())
    assert len(recs) == 1 and recs[0]["orthant"] == "000000"


def test_equilibria_requires_pi(tmp_path):
    assert run("equilibria", FIXTURE, "--out", tmp_path) == 1


def test_byte_identical_and_config_replay(tmp_path):
    args = ["equilibria", FIXTURE, "--pi", 1.5, "--starts", 300, "--seed", 3]
    assert run(*args, "--out", tmp_path / "a") == 0
    assert run(*args, "--out", tmp_path / "b") == 0
    fa, fb = files(tmp_path / "a"), files(tmp_path / "b")
    fa.pop("config.json"), fb.pop("config.json")
    assert fa == fb
    assert run("equilibria", "--config", tmp_path / "a" / "config.json", "--out", tmp_path / "c") == 0
    fc = files(tmp_path / "c")
    fc.pop("config.json")
    assert fc == fa


def test_config_file_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"input": str(FIXTURE), "psi": "mm", "pi": 1.5, "starts": 50}))
    assert run("equilibria", "--config", cfg, "--starts", 60, "--out", tmp_path / "o") == 0
    eff = json.loads((tmp_path / "o" / "config.json").read_text())
    assert eff["psi"] == "mm" and eff["starts"] == 60 and eff["pi"] == 1.5


def test_env_seed(tmp_path, monkeypatch):
    monkeypatch.setenv("MULTIEQ_SEED", "123")
    assert run("equilibria", FIXTURE, "--pi", 0.5, "--starts", 5, "--out", tmp_path) == 0
    assert json.loads((tmp_path / "config.json").read_text())["seed"] == 123


def test_sweep(tmp_path):
    assert run("sweep", FIXTURE, "--pi-grid", "1:2:4", "--starts", 100, "--out", tmp_path) == 0
    for name in ("fig3a_counts.csv", "fig3b_ratios.csv", "fig3c_polar.csv", "fig1b_eigs.csv",
                 "census_pi_1.25.csv", "summary.json"):
        assert (tmp_path / name).exists(), name
    s = json.loads((tmp_path / "summary.json").read_text())
    assert s["first_mixed_pi"] == 1.25


def test_simulate(tmp_path):
    assert run("simulate", FIXTURE, "--pi", 1.838, "--starts", 20, "--traj-stride", 2000,
               "--out", tmp_path) == 0
    s = json.loads((tmp_path / "summary.json").read_text())
    assert "unresolved" not in s["table"] and sum(s["table"].values()) == 20
    assert len(s["table"]) <= 4
    assert (tmp_path / "trajectories.csv").exists()


def test_example1(tmp_path):
    assert run("example1", "--starts", 300, "--out", tmp_path) == 0
    s = json.loads((tmp_path / "summary.json").read_text())
    assert s["spectral"]["rho_A"] == pytest.approx(0.706, abs=1.5e-3)
    assert s["conditions"]["1.838"]["lambda2_Ltilde"] == pytest.approx(-0.302, abs=1.5e-3)
    for name in ("fig1b_eigs.csv", "fig1c_ensemble.csv", "fig2_disks_d.csv", "census_pi_1.838.csv"):
        assert (tmp_path / name).exists()


def test_example2_small(tmp_path):
    assert run("example2", "--n", 8, "--p", 0.5, "--pi-grid", "1:4:3", "--starts", 50,
               "--seed", 1, "--out", tmp_path) == 0
    for name in ("fig3a_counts.csv", "fig3b_ratios.csv", "fig3c_polar.csv", "network.csv"):
        assert (tmp_path / name).exists()
    assert json.loads((tmp_path / "summary.json").read_text())["checks_all_pass"]


def test_parse_grid():
    assert np.allclose(parse_grid("1:20:50"), np.linspace(1, 20, 51)[1:])
    assert parse_grid("1:2:0").size == 0


def test_console_script(tmp_path):
    r = subprocess.run([sys.executable, "-m", "multieq.cli", "analyze", str(FIXTURE), "--out",
                        str(tmp_path)], capture_output=True, text=True)
    assert r.returncode == 0 and "pi2" in r.stdout
