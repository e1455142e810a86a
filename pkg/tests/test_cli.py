import json

import pytest

from zeromb import cli, verify
from zeromb.verify import Check


def run(args, capsys):
    code = cli.main(args)
    return code, capsys.readouterr()


def test_critical_json(capsys):
    code, out = run(["critical", "--bc", "stress-free", "--N", "32"], capsys)
    assert code == 0
    d = json.loads(out.out)
    assert d["R0_squared"] == pytest.approx(657.511, rel=1e-4)
    assert d["params"]["bc"] == "stress-free" and d["params"]["N"] == 32


def test_config_defaults_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nR = 50\nN=24\nbc=stress-free\nformat=csv\n")
    out = tmp_path / "l0.csv"
    code, _ = run(["lambda0", "--config", str(cfg), "--bc", "rigid", "--out", str(out)], capsys)
    assert code == 0
    text = out.read_text()
    assert "# bc=rigid" in text and "# N=24" in text and "# R=50" in text
    assert text.splitlines()[-2] == "lambda0,a_star"


def test_growth_and_classify(capsys):
    code, out = run(["growth", "--R", "50", "--Q", "0.05", "--N", "24"], capsys)
    assert code == 0 and json.loads(out.out)["precondition_ok"] is True
    code, out = run(["classify", "--R", "50", "--N", "24", "--a_max", "6"], capsys)
    d = json.loads(out.out)
    assert code == 0 and d["verdict"] == "ProvablyUnstable" and "growth" in d


def test_sweep_and_simulate(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _ = run(["sweep", "--Ra_values", "1000,2500", "--Q_values", "0,1e5", "--N", "16",
                   "--a_max", "6", "--format", "csv", "--out", str(out)], capsys)
    assert code == 0
    assert len([ln for ln in out.read_text().splitlines() if not ln.startswith("#")]) == 5
    code, o = run(["simulate", "--R", "50", "--N", "16", "--a", "3", "--dt", "0.01", "--t_end", "0.2",
                   "--format", "csv"], capsys)
    assert code == 0 and "t,E,D,S" in o.out and "# fitted_lambda=" in o.out


def test_galdi(capsys):
    code, out = run(["galdi", "--R_s", "10", "--Q_sigma", "0", "--P_m", "2", "--P_theta", "1"], capsys)
    assert code == 0 and json.loads(out.out)["threshold"] == 10.0


@pytest.mark.parametrize("args", [["lambda0"], ["critical", "--bc", "sticky"], ["nope"],
                                  ["lambda0", "--R", "-1"], ["sweep", "--R_values", "50"],
                                  ["critical", "--config", "/nonexistent.cfg"]])
def test_errors_exit_1(args, capsys):
    code, out = run(args, capsys)
    assert code == 1


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("Ra=5\n")
    code, out = run(["critical", "--config", str(cfg)], capsys)
    assert code == 1 and "unknown config key" in out.err


def test_verify_exit_codes(monkeypatch, capsys):
    code, out = run(["verify", "--only", "8"], capsys)
    assert code == 0 and "[PASS] 8." in out.out
    monkeypatch.setattr(verify, "CHECKS", [(1, "always fails", lambda: (False, "forced"))])
    code, out = run(["verify"], capsys)
    assert code == 2 and "[FAIL] 1." in out.out
