"""End-to-end tests for the command-line interface."""

import csv

import numpy as np
import pytest

from halfspace.cli import ConfigError, main, parse_config

SOLVE_CFG = """\
[torus]
n = 1
length = 6.283185307179586
points = 64

[coefficients]
family = smooth_symmetric
seed = 3

[problem]
kind = neumann
data = gaussian
"""


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_parse_config_sections_and_types(tmp_path):
    path = _write(tmp_path, "ok.cfg", SOLVE_CFG)
    cfg = parse_config(path)
    assert cfg.get("problem", "kind") == "neumann"
    assert cfg.get_int("torus", "points") == 64
    assert abs(cfg.get_float("torus", "length") - 2 * np.pi) < 1e-12
    assert cfg.get("problem", "missing", default="x") == "x"


def test_parse_config_line_numbered_errors(tmp_path):
    path = _write(tmp_path, "bad.cfg", "[torus]\nn = 1\npoints = oops\n")
    cfg = parse_config(path)
    with pytest.raises(ConfigError) as err:
        cfg.get_int("torus", "points")
    assert "bad.cfg:3" in str(err.value)

    path2 = _write(tmp_path, "dup.cfg", "[a]\nx = 1\nx = 2\n")
    with pytest.raises(ConfigError) as err2:
        parse_config(path2)
    assert "dup.cfg:3" in str(err2.value)

    path3 = _write(tmp_path, "stray.cfg", "x = 1\n")
    with pytest.raises(ConfigError):
        parse_config(path3)


def test_solve_command_writes_outputs(tmp_path):
    cfg = _write(tmp_path, "solve.cfg", SOLVE_CFG)
    out = tmp_path / "out"
    rc = main(["solve", "--config", cfg, "--out", str(out), "--quiet"])
    assert rc == 0
    for name in ("report.txt", "trace.csv", "samples.csv", "norms.csv"):
        assert (out / name).exists(), name
    report = (out / "report.txt").read_text()
    assert "boundary_residual" in report
    resid = float([ln.split("=")[1] for ln in report.splitlines()
                   if ln.startswith("boundary_residual")][0])
    assert resid <= 1e-10


def test_solve_command_deterministic(tmp_path):
    cfg = _write(tmp_path, "solve.cfg", SOLVE_CFG)
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert main(["solve", "--config", cfg, "--out", str(out1), "--quiet"]) == 0
    assert main(["solve", "--config", cfg, "--out", str(out2), "--quiet"]) == 0
    assert (out1 / "trace.csv").read_text() == (out2 / "trace.csv").read_text()
    assert (out1 / "norms.csv").read_text() == (out2 / "norms.csv").read_text()


def test_config_error_exit_code(tmp_path):
    bad = _write(tmp_path, "bad.cfg", "[torus]\nn = 1\npoints = oops\n")
    rc = main(["solve", "--config", bad, "--out", str(tmp_path / "o"),
               "--quiet"])
    assert rc == 2
    rc2 = main(["solve", "--config", str(tmp_path / "absent.cfg"),
                "--out", str(tmp_path / "o"), "--quiet"])
    assert rc2 == 2


def test_missing_problem_section_exit_code(tmp_path):
    cfg = _write(tmp_path, "nop.cfg",
                 "[torus]\nn = 1\nlength = 6.0\npoints = 32\n")
    rc = main(["solve", "--config", cfg, "--out", str(tmp_path / "o"),
               "--quiet"])
    assert rc == 2


def test_unknown_coefficient_family_exit_code(tmp_path):
    text = SOLVE_CFG.replace("smooth_symmetric", "nonsense")
    cfg = _write(tmp_path, "fam.cfg", text)
    rc = main(["solve", "--config", cfg, "--out", str(tmp_path / "o"),
               "--quiet"])
    assert rc == 2


def test_campaign_command(tmp_path):
    text = """\
[torus]
n = 1
length = 6.283185307179586
points = 32

[coefficients]
family = smooth_symmetric
seed = 5

[campaign]
id = rellich
"""
    cfg = _write(tmp_path, "camp.cfg", text)
    out = tmp_path / "camp"
    rc = main(["campaign", "--config", cfg, "--out", str(out), "--quiet"])
    assert rc == 0
    with open(out / "campaign.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) > 1
    assert "overall: pass" in (out / "summary.txt").read_text()


def test_unknown_campaign_exit_code(tmp_path):
    text = ("[torus]\nn = 1\nlength = 6.0\npoints = 32\n\n"
            "[coefficients]\nfamily = identity\n\n[campaign]\nid = bogus\n")
    cfg = _write(tmp_path, "camp.cfg", text)
    rc = main(["campaign", "--config", cfg, "--out", str(tmp_path / "o"),
               "--quiet"])
    assert rc == 2


def test_oracle_command(tmp_path):
    text = ("[torus]\nn = 1\nlength = 6.283185307179586\npoints = 64\n\n"
            "[coefficients]\nfamily = identity\n\n[problem]\ndata = mode\n")
    cfg = _write(tmp_path, "oracle.cfg", text)
    out = tmp_path / "oracle"
    rc = main(["oracle", "--config", cfg, "--out", str(out), "--quiet"])
    assert rc == 0
    with open(out / "oracle.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    dev_col = header.index("relative_deviation")
    assert all(float(r[dev_col]) <= 1e-9 for r in body)
