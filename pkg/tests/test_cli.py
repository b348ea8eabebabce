from __future__ import annotations

import io
import json
import math
import os
import stat

import pytest

from loschmidt import cli
from loschmidt.cli import UsageError, main, parse_args, parse_real
from loschmidt.scan import GridAxis, PhaseDiagram, scan_dynamics

from golden_runs import FIXTURES, RUNS

CREUTZ_ARGS = ["scan", "--model", "creutz", "--param", "m=0.5", "--param", "Theta=1.0471975512",
               "--axis", "T:0.01:2:200", "--axis", "m:0:2:200"]


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    status = main(argv, stdout=out, stderr=err)
    return status, out.getvalue(), err.getvalue()


# --------------------------------------------------------------------------- parsing


@pytest.mark.parametrize(
    "text,value",
    [("1.5", 1.5), ("pi", math.pi), ("-pi", -math.pi), ("pi/3", math.pi / 3), ("2pi", 2 * math.pi),
     ("2*pi/5", 2 * math.pi / 5), ("0.5*pi/2", math.pi / 4), ("+pi/8", math.pi / 8), ("1e-3", 1e-3)],
)
def test_parse_real(text, value):
    assert parse_real(text) == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("text", ["", "pie", "pi/", "3x", "nan", "inf", "pi/0x"])
def test_parse_real_rejects(text):
    with pytest.raises(ValueError):
        parse_real(text)


def test_parse_valid_run_config():
    cfg = parse_args(CREUTZ_ARGS)
    assert cfg.command == "scan" and cfg.model == "creutz" and cfg.process == "uhlmann"
    assert cfg.params == {"m": 0.5, "Theta": 1.0471975512}
    assert cfg.axes == (GridAxis("T", 0.01, 2, 200), GridAxis("m", 0, 2, 200))
    assert (cfg.format, cfg.mode, cfg.n_steps, cfg.out_path) == ("csv", "both", 1024, "-")


def test_parse_log_axis_and_flags():
    cfg = parse_args(["uhlmann", "--model", "three-level", "--param", "R=1", "--axis", "T:0.1:3:10:log",
                      "--steps", "256", "--format", "json", "--mode", "numeric", "--out", "x.json"])
    assert cfg.axes[0].scale == "log" and cfg.n_steps == 256 and cfg.format == "json"
    assert cfg.mode == "numeric" and cfg.out_path == "x.json"


@pytest.mark.parametrize(
    "argv,flag",
    [
        (CREUTZ_ARGS[:1] + CREUTZ_ARGS[3:], "--model"),
        (CREUTZ_ARGS + ["--bogus"], "--bogus"),
        (CREUTZ_ARGS + ["--format", "xml"], "--format"),
        (CREUTZ_ARGS + ["--param", "m=0.7"], "--param m"),
        (CREUTZ_ARGS + ["--param", "k_points"], "--param"),
        (CREUTZ_ARGS[:-2], "--axis"),
        (CREUTZ_ARGS[:-2] + ["--axis", "T:0:1:5"], "--axis"),
        (CREUTZ_ARGS[:-2] + ["--axis", "m:1:0:5"], "--axis"),
        (CREUTZ_ARGS[:-2] + ["--axis", "m:0:1"], "--axis"),
        (CREUTZ_ARGS + ["--steps", "16"], "--steps"),
        (["scan", "--model", "creutz", "--param", "m=0.5", "--axis", "T:0.1:2:5", "--axis", "m:0:2:5"], "Theta"),
        (["quasistatic", "--model", "creutz", "--param", "m=0.5", "--param", "Theta=1", "--axis", "T:0.1:1:3"], "--model"),
        (["quench", "--model", "two-level", "--param", "Rx=1", "--param", "Ry=0", "--param", "Rz=0",
          "--param", "beta=1", "--axis", "beta:0.1:1:3"], "t"),
        (["verify", "--model", "three-level", "--param", "R=1", "--axis", "t:0:1:3"], "--axis"),
    ],
)
def test_usage_errors_name_the_flag(argv, flag):
    with pytest.raises(UsageError, match=flag):
        parse_args(argv)
    status, _, err = run(argv)
    assert status == cli.EXIT_USAGE and "usage error" in err


def test_help_exits_zero():
    status, out, _ = run(["--help"])
    assert status == 0 and "pi/3" in out


# --------------------------------------------------------------------------- output


def test_two_by_two_csv():
    d = scan_dynamics(lambda p: 1.0, GridAxis("T", 1, 2, 2), GridAxis("t", 0, 1, 2))
    text = cli.to_csv(d)
    lines = text.split("\n")
    assert text.endswith("\n") and "\r" not in text and len(lines) == 6 and lines[-1] == ""
    assert lines[0] == "x1,x2,G_re,G_im,echo,phase,rate,divergent"
    assert lines[1] == "1,0,1,0,1,0,0,false"


def test_undefined_phase_is_empty_in_csv():
    d = scan_dynamics(lambda p: 0.0, GridAxis("T", 1, 2, 2))
    row = cli.to_csv(d).split("\n")[1].split(",")
    assert row[1] == "" and row[5] == "" and row[7] == "true" and float(row[6]) == 80.0


def test_json_roundtrip():
    status, out, _ = run(["quench", "--model", "three-level", "--param", "R=1", "--param", "theta=pi/5",
                          "--param", "phi=0", "--param", "beta=1", "--axis", "T:1:4:4", "--axis", "t:0:5:6",
                          "--format", "json"])
    assert status == 0
    d = cli.from_json(out)
    assert isinstance(d, PhaseDiagram) and len(d.cells) == 24
    assert cli.to_json(d) == out
    doc = json.loads(out)
    assert set(doc) == {"metadata", "axes", "cells", "criticals"}
    assert list(doc["cells"][0]) == list(cli.CSV_COLUMNS)
    assert doc["metadata"]["route_comparison"]["max_abs_G_deviation"] < 1e-12


def test_output_is_deterministic_and_atomic(tmp_path):
    argv = ["uhlmann", "--model", "three-level", "--param", "R=1", "--axis", "T:0.2:2:12"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert sorted(p.name for p in tmp_path.iterdir()) == ["a.csv", "b.csv"]
    umask = os.umask(0)
    os.umask(umask)
    assert stat.S_IMODE(a.stat().st_mode) == 0o666 & ~umask


@pytest.mark.parametrize("name", sorted(RUNS))
def test_golden_fixture_bytes(name, tmp_path):
    out = tmp_path / name
    assert main(RUNS[name] + ["--out", str(out)]) == 0
    assert out.read_bytes() == (FIXTURES / name).read_bytes()


def test_golden_criticals_match_analytic_values():
    doc = json.loads((FIXTURES / "creutz_theta_pi3.json").read_text())
    from loschmidt import models

    for T, m in doc["criticals"]:
        assert T == pytest.approx(models.creutz_critical_temperature(models.CreutzSpec(m, math.pi / 3)), abs=1e-6)
    doc = json.loads((FIXTURES / "uhlmann3_R1.json").read_text())
    assert doc["criticals"][0][0] == pytest.approx(0.7337861798, abs=1e-6)


# --------------------------------------------------------------------------- exit matrix


VERIFY = {
    "two-level": ["verify", "--model", "two-level", "--param", "Rx=0.3", "--param", "Ry=-0.2", "--param", "Rz=0.8"],
    "three-level": ["verify", "--model", "three-level", "--param", "R=1", "--param", "theta=pi/5", "--param", "phi=0.4"],
    "creutz": ["verify", "--model", "creutz", "--param", "m=0.5", "--param", "Theta=pi/3"],
}


@pytest.mark.parametrize("model", sorted(VERIFY))
def test_verify_passes(model):
    status, out, err = run(VERIFY[model])
    assert status == 0, err
    lines = out.strip().split("\n")
    assert lines[0] == "quantity,max_abs_deviation,tolerance,status"
    assert all(line.endswith(",ok") for line in lines[1:])


def test_verify_failure_names_quantity(monkeypatch):
    monkeypatch.setattr(cli, "HOLONOMY_TOL", 0.0)
    status, out, err = run(VERIFY["three-level"] + ["--axis", "T:0.5:2:3"])
    assert status == cli.EXIT_VERIFY
    assert "three-level:uhlmann" in err and "FAIL" in out


def test_domain_errors_exit_3():
    quench = ["quench", "--model", "three-level", "--param", "R=1", "--param", "phi=0", "--param", "theta=1.6",
              "--axis", "T:0.5:6:4", "--axis", "t:0:10:5"]
    status, _, err = run(quench)
    assert status == cli.EXIT_DOMAIN and "domain error" in err
    gapless = ["scan", "--model", "creutz", "--param", "Theta=pi/3", "--axis", "T:0.1:2:3", "--axis", "m:0:2:3"]
    assert run(gapless)[0] == cli.EXIT_DOMAIN
    rank = ["uhlmann", "--model", "creutz", "--param", "m=0.5", "--param", "Theta=pi/3", "--axis", "T:0.01:0.02:2",
            "--mode", "numeric"]
    assert run(rank)[0] == cli.EXIT_DOMAIN


def test_io_error_exit_4(tmp_path):
    argv = ["uhlmann", "--model", "three-level", "--param", "R=1", "--axis", "T:0.2:2:4",
            "--out", str(tmp_path / "missing" / "x.csv")]
    status, _, err = run(argv)
    assert status == cli.EXIT_IO and "I/O error" in err
