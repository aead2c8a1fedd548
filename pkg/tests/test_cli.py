import json
import subprocess
import sys

import numpy as np
import pytest

from bloore.cli import ConfigError, RunConfig, main, parse_grid, read_config_file, table_from_csv, table_to_csv
from bloore.estimators import estimate_sepfunc


def test_parse_grid():
    np.testing.assert_allclose(parse_grid("0.1:10:3"), [0.1, 1.0, 10.0])
    np.testing.assert_allclose(parse_grid("2:2:1"), [2.0])
    for bad in ("1:2", "-1:2:3", "2:1:3", "a:b:c"):
        with pytest.raises(ConfigError):
            parse_grid(bad)


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig("integrals", samples=0)


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nsamples = 2e4\nqmc = yes\nid = 2x2:real:[(2,3)]\n")
    assert read_config_file(str(cfg)) == {"samples": 20000, "qmc": True, "id": "2x2:real:[(2,3)]"}
    cfg.write_text("colour = blue\n")
    with pytest.raises(ConfigError):
        read_config_file(str(cfg))


def test_csv_round_trip():
    t = estimate_sepfunc("2x2:complex:[(2,3)]", [0.5, 2.0], 5000, seed=1, variable="nu")
    back = table_from_csv(table_to_csv(t), t.scenario, t.measure)
    np.testing.assert_allclose(back.grid, t.grid)
    np.testing.assert_array_equal(back.n_ppt, t.n_ppt)
    np.testing.assert_array_equal(back.n_feasible, t.n_feasible)
    np.testing.assert_allclose(back.estimate, t.estimate)


def test_verify_scenario_writes_reports(tmp_path, capsys):
    out = tmp_path / "run"
    rc = main(["verify-scenario", "--id", "2x2:real:[(2,3)]", "--samples", "2e4",
               "--grid", "0.5:2:3", "--seed", "3", "--out", str(out)])
    assert rc in (0, 1)
    doc = json.loads(out.with_suffix(".json").read_text())
    names = [r["name"] for r in doc["results"]]
    assert names[0] == "c" and "P" in names
    for r in doc["results"]:
        assert set(r) >= {"name", "estimate", "std_err", "target_exact", "target_value", "z_score", "pass"}
    assert doc["meta"]["versions"]["numpy"] == np.__version__
    assert out.with_suffix(".csv").read_text().startswith("grid_var,nu1,nu2,estimate")
    lines = capsys.readouterr().out.splitlines()
    assert all(line.split()[0] in ("PASS", "FAIL", "INFO") for line in lines)


def test_stdout_json(capsys):
    assert main(["export-catalog"]) == 0
    text = capsys.readouterr().out
    assert json.loads(text)["meta"]["records"] > 50


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("samples = 0\n")
    assert main(["integrals", "--config", str(cfg)]) == 2
    assert main(["export-catalog", "--config", str(cfg), "--samples", "10"]) == 0
    capsys.readouterr()


@pytest.mark.parametrize("argv", [
    ["verify-scenario", "--id", "3x3:real:[(1,2)]"],
    ["verify-scenario", "--id", "garbage"],
    ["verify-scenario"],
    ["integrals", "--config", "/nonexistent/file"],
    ["sepfunc", "--grid", "1:0:3", "--system", "2x2", "--field", "complex"],
])
def test_configuration_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["verify-scenario", "--samples", "1.5"])
    assert exc.value.code == 2


def test_failure_exit_code(tmp_path, capsys):
    # Reference probability 1/6 is off by a factor two: the run must report failure.
    rc = main(["verify-scenario", "--id", "3x3:complex:[(6,8)]", "--samples", "5e4",
               "--grid", "1:1:1", "--out", str(tmp_path / "r")])
    assert rc == 1
    out = capsys.readouterr().out
    assert "FAIL  P:" in out and "PASS  P (derived)" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bloore", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("bloore ")
