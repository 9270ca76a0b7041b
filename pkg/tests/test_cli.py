import math

import numpy as np
import pytest

from sastirap.cli import main
from sastirap.config import CliConfig, ConfigError, emit, parse_axis, parse_config


# --- config document ----------------------------------------------------------

def test_parse_minimal_config_defaults():
    cfg = parse_config('protocol = "exponential"\nomega_T = 2.0\n')
    assert cfg.protocol == "exponential"
    assert cfg.omega_T == 2.0
    assert cfg.tau_T == 0.5 and cfg.mode == "stirap" and cfg.workers == 1


def test_unknown_key_is_hard_error():
    with pytest.raises(ConfigError, match="omega_t"):
        parse_config("omega_t = 2.0\n")


def test_type_errors_are_reported():
    with pytest.raises(ConfigError):
        parse_config('omega_T = "fast"\n')
    with pytest.raises(ConfigError):
        parse_config("workers = 1.5\n")
    with pytest.raises(ConfigError):
        parse_config('axes = [1, 2]\n')
    with pytest.raises(ConfigError):
        parse_config("protocol = gaussian\n")  # invalid TOML


def test_domain_violation_names_constraint():
    with pytest.raises(ConfigError, match="tau"):
        parse_config("tau_T = -0.2\n")


def test_axis_parsing():
    ax = parse_axis("omega_T, 0.5, 20, 60")
    assert ax.name == "omega_T" and ax.n == 60 and ax.spacing == "linear"
    assert parse_axis("tau_T,0.1,1.5,8,log").spacing == "log"
    with pytest.raises(ConfigError):
        parse_axis("omega_T,0.5,20")
    with pytest.raises(ConfigError):
        parse_axis("omega_T,0.5,20,sixty")


def test_emit_parse_round_trip():
    cfg = parse_config(
        'protocol = "sech_pair"\n'
        "tau_T = 1.0\n"
        "gamma_T = 2.0\n"
        'mode = "sa_stirap"\n'
        "lock_tau_T = 0.5\n"
        'axes = ["omega_T,1,5,3"]\n'
        'metrics = ["fidelity"]\n'
    )
    assert parse_config(emit(cfg)) == cfg
    assert parse_config(emit(CliConfig())) == CliConfig()


# --- CLI commands --------------------------------------------------------------

def test_simulate_writes_deterministic_outputs(tmp_path):
    args = [
        "simulate",
        "--out", str(tmp_path / "a"),
        "--protocol", "gaussian",
        "--omega-T", "2",
        "--tau-T", "0.5",
        "--gamma-T", "1",
        "--mode", "sa_stirap",
    ]
    assert main(args) == 0
    traj = (tmp_path / "a" / "trajectory.csv").read_bytes()
    mets = (tmp_path / "a" / "metrics.csv").read_bytes()
    args[2] = str(tmp_path / "b")
    assert main(args) == 0
    assert (tmp_path / "b" / "trajectory.csv").read_bytes() == traj
    assert (tmp_path / "b" / "metrics.csv").read_bytes() == mets
    header = mets.decode().splitlines()[0]
    assert header.startswith("fidelity,loss,")
    assert not (tmp_path / "a" / "trajectory.csv.tmp").exists()


def test_sweep_from_config_file(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(
        'protocol = "gaussian"\n'
        "gamma_T = 1.0\n"
        'axes = ["omega_T,1,3,3", "tau_T,0.4,0.6,2"]\n'
        'metrics = ["fidelity", "loss"]\n'
        f'out = "{tmp_path / "sw"}"\n'
        "rel_tol = 1e-8\n"
    )
    assert main(["sweep", "--config", str(cfg)]) == 0
    lines = (tmp_path / "sw" / "sweep.csv").read_text().splitlines()
    assert lines[0] == "omega_T,tau_T,fidelity,loss"
    assert len(lines) == 1 + 6
    first = lines[1].split(",")
    assert float(first[0]) == 1.0 and float(first[1]) == 0.4
    assert 0.0 <= float(first[2]) <= 1.0


def test_flag_overrides_config_file(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('protocol = "gaussian"\nomega_T = 0.1\n')
    out = tmp_path / "o"
    assert main(
        ["simulate", "--config", str(cfg), "--omega-T", "20", "--out", str(out)]
    ) == 0
    row = (out / "metrics.csv").read_text().splitlines()[1]
    assert float(row.split(",")[0]) > 0.99  # omega_T = 20, not 0.1


def test_catalog_all_rows_pass(capsys):
    assert main(["catalog"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].split() == [
        "family", "eps1", "eps2", "area", "window", "pi_area_check",
    ]
    assert len(out) == 1 + 8
    for line in out[1:]:
        assert line.endswith("PASS"), line


def test_figure_trajectories_complete_transfer(tmp_path):
    assert main(["figure", "fig3b", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "fig3b.csv").read_text().splitlines()
    assert lines[0] == "t,re_c1,im_c1,re_c2,im_c2,re_c3,im_c3,norm,p1,p2,p3"
    last = [float(x) for x in lines[-1].split(",")]
    assert last[10] == pytest.approx(1.0, abs=1e-6)


def test_figure_pulse_series(tmp_path):
    assert main(["figure", "fig1", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "fig1.csv").read_text().splitlines()
    assert lines[0] == "t,omega_p,omega_s,omega_d"
    data = np.array([[float(x) for x in l.split(",")] for l in lines[1:]])
    assert data.shape == (1001, 4)
    # counterintuitive ordering: Stokes leads the pump
    assert np.argmax(data[:, 2]) < np.argmax(data[:, 1])
    assert np.max(data[:, 3]) == pytest.approx(0.5, abs=1e-3)


def test_exit_code_on_bad_input(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("omega_T = -3.0\n")
    assert main(["simulate", "--config", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err
    assert main(["simulate", "--config", str(tmp_path / "missing.toml")]) == 2
    assert main(["simulate", "--protocol", "triangle"]) == 2
