import json

import pytest

from conftest import BARRIER_PARAMS_TOML, COEXIST_PARAMS_TOML, SMALL_RUN_TOML, write_config
from freefront.core.exceptions import ExitCode, NumericalBlowup
from freefront.main import main
from freefront.services.pde_service import pde_service


def _run(tmp_path, command, text):
    config = write_config(tmp_path / f"{command}.toml", text)
    out = tmp_path / "out"
    code = main([command, "--config", str(config), "--out", str(out), "--threads", "1"])
    return code, out


def test_equilibrium_writes_reports(tmp_path):
    code, out = _run(tmp_path, "equilibrium", COEXIST_PARAMS_TOML)
    assert code == ExitCode.SUCCESS
    payload = json.loads((out / "equilibrium.json").read_text(encoding="utf-8"))
    assert payload["schema_version"] == 1
    assert (out / "equilibrium_iteration.json").exists()
    speeds = json.loads((out / "speed_constants.json").read_text(encoding="utf-8"))
    assert speeds["K_is_heuristic"] is True


def test_invalid_config_exits_with_validation_code(tmp_path):
    text = BARRIER_PARAMS_TOML.replace("rho = 0.01", "rho = 0.0") + SMALL_RUN_TOML
    code, out = _run(tmp_path, "simulate", text)
    assert code == ExitCode.VALIDATION
    assert not out.exists()


def test_thresholds_report(tmp_path):
    code, out = _run(tmp_path, "thresholds", BARRIER_PARAMS_TOML + SMALL_RUN_TOML)
    assert code == ExitCode.SUCCESS
    payload = json.loads((out / "thresholds.json").read_text(encoding="utf-8"))
    assert payload["Lambda"] == pytest.approx(1.5707963, rel=1e-6)
    assert payload["sigma1_at_h0"] > 0


def test_simulate_writes_trajectory(tmp_path):
    code, out = _run(tmp_path, "simulate", BARRIER_PARAMS_TOML + SMALL_RUN_TOML)
    assert code == ExitCode.SUCCESS
    assert (out / "run" / "trajectory.csv").exists()
    assert (out / "run" / "metadata.json").exists()


def test_simulate_numerical_failure_exit_code(tmp_path, monkeypatch):
    def blow_up(*args, **kwargs):
        raise NumericalBlowup(t=0.1, j=3)

    monkeypatch.setattr(pde_service, "simulate", blow_up)
    code, _ = _run(tmp_path, "simulate", BARRIER_PARAMS_TOML + SMALL_RUN_TOML)
    assert code == ExitCode.NUMERICAL


def test_compare_passes(tmp_path):
    code, out = _run(tmp_path, "compare", BARRIER_PARAMS_TOML + SMALL_RUN_TOML)
    assert code == ExitCode.SUCCESS
    assert json.loads((out / "compare_sandwich.json").read_text(encoding="utf-8"))["passed"]
    assert (out / "compare_upper.json").exists()


def test_semiwave_problem(tmp_path):
    text = "[semiwave.problem]\na = 1.0\nbcoef = 1.0\nd = 1.0\nrho = 1.0\n"
    code, out = _run(tmp_path, "semiwave", text)
    assert code == ExitCode.SUCCESS
    assert (out / "semiwave_profile.csv").read_text(encoding="utf-8").startswith(
        "# schema_version: 1"
    )
    report = json.loads((out / "semiwave_asymptotics.json").read_text(encoding="utf-8"))
    assert report["converged"] is True


def test_unknown_command(tmp_path):
    config = write_config(tmp_path / "run.toml", COEXIST_PARAMS_TOML)
    assert main(["explode", "--config", str(config)]) == ExitCode.VALIDATION


def test_missing_config_flag():
    assert main(["simulate"]) == ExitCode.VALIDATION
