import csv
import json
import os

import pytest

from nonhered.cli import ConfigError, RunConfig, load_config, main


@pytest.fixture(scope="module")
def demo_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo")
    assert main(["construct", "--out", str(out)]) == 0
    return out


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# demo\nQ = 512\nR_list = 40, 80\norientations = L2-L1  # one only\n")
    c = load_config(str(cfg), None, {"R": 30.0})
    assert c.Q == 512.0 and c.R_list == [40.0, 80.0] and c.orientations == ["L2-L1"]
    assert c.R == 30.0
    assert load_config(None, "certified").Q == 1e5
    for text in ("Q = 100.5\n", "alpha = 1.0\n", "bogus = 3\n", "orientations = L3\n",
                 "trunc = 13\n", "Q = abc\n"):
        cfg.write_text(text)
        with pytest.raises(ConfigError):
            load_config(str(cfg))


def test_hash_fields_exclude_outputs():
    a, b = RunConfig(out="x"), RunConfig(out="y", R_list=[50.0])
    assert a.hash_fields() == b.hash_fields()
    assert a.hash_fields() != RunConfig(Q=512.0).hash_fields()


def test_config_errors_exit_3(tmp_path, capsys):
    assert main(["verify", "--out", str(tmp_path)]) == 3
    assert "cannot load state" in capsys.readouterr().err
    assert main(["construct", "--set", "Q"]) == 3
    assert main(["construct", "--config", str(tmp_path / "nope.cfg")]) == 3


def test_small_Q_exit_2(tmp_path, capsys):
    assert main(["construct", "--out", str(tmp_path), "--set", "Q=8"]) == 2
    assert "construction failed" in capsys.readouterr().err
    assert not (tmp_path / "state.json").exists()


def test_construct_outputs(demo_dir):
    st = json.loads((demo_dir / "state.json").read_text())
    assert st["schema"] == 1 and len(st["beta"]) == 12
    rows = read_csv(demo_dir / "betas.csv")
    assert rows[0] == ["n", "u_n", "beta_n", "beta_minus_half"] and len(rows) == 13
    rows = read_csv(demo_dir / "dsolve.csv")
    assert rows[0] == ["n", "u_n", "v_n", "d_n", "gamma_n", "row_gap"]
    assert float(rows[1][2]) == 240.0


def test_hash_mismatch_exit_3(demo_dir):
    assert main(["verify", "--out", str(demo_dir), "--set", "R=30"]) == 3


def test_weights_command(tmp_path):
    assert main(["weights", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "kasymp.csv")
    assert rows[0] == ["y", "K_scaled", "K_scaled_neg", "log_K", "ratio"]
    assert all(r[1] == r[2] for r in rows[1:])
    info = json.loads((tmp_path / "weights.json").read_text())
    assert info["class"]["passed"] and info["kasymp"]["spread"] <= 1.5


def test_defect_csv_schema(demo_dir):
    assert main(["defect", "--out", str(demo_dir), "--set", "R_list=40,120",
                 "--set", "orientations=L2-L1"]) == 0
    rows = read_csv(demo_dir / "defect.csv")
    assert rows[0] == ["R", "orientation", "candidate", "residual", "error_budget"]
    assert len(rows) == 1 + 2 * 2 * 2
    assert {r[1] for r in rows[1:]} == {"L2-L1", "control"}
    info = json.loads((demo_dir / "defect.json").read_text())
    assert info["monotone"]


def test_debug_commands(demo_dir, capsys):
    assert main(["pair", "--out", str(demo_dir), "--kind", "v", "--lam", "0"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["error_bound"] < 1e-4
    assert main(["norm", "--out", str(demo_dir), "--what", "sigma"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert 0.1 <= doc["value"] / doc["exact"] <= 10


@pytest.mark.slow
def test_tampered_state_exit_1(demo_dir, tmp_path):
    st = json.loads((demo_dir / "state.json").read_text())
    st["beta"][0] += 0.01
    (tmp_path / "state.json").write_text(json.dumps(st))
    assert main(["verify", "--out", str(tmp_path)]) == 1
    rep = json.loads((tmp_path / "report.json").read_text())
    assert "contract.beta_roots" in rep["failures"]
    rows = read_csv(tmp_path / "residuals.csv")
    assert rows[0] == ["check", "status", "exploratory", "measured", "bound", "error_budget"]


@pytest.mark.slow
def test_certified_run_exit_0(tmp_path):
    assert main(["construct", "--profile", "certified", "--out", str(tmp_path)]) == 0
    assert main(["verify", "--profile", "certified", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["passed"] and not rep["failures"]
    assert os.path.exists(tmp_path / "residuals.csv")
