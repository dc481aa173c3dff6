import json

import numpy as np
import pandas as pd
import pytest

from freefront.crud.artifact_crud import (
    ReportRepository,
    TableRepository,
    TrajectoryRepository,
    read_csv,
    read_json,
)
from freefront.schemas.sweep_schema import SweepRow, SweepSummary
from freefront.services.model_service import model_service
from freefront.services.pde_service import pde_service
from freefront.services.steady_state_service import steady_state_service


@pytest.fixture
def trajectory(barrier_params, small_init, short_solver):
    return pde_service.simulate(barrier_params, small_init, short_solver)


def test_trajectory_round_trip(tmp_path, trajectory, short_solver):
    repo = TrajectoryRepository(tmp_path)
    main = repo.save(trajectory, name="run")

    assert main.read_text(encoding="utf-8").splitlines()[0] == "# schema_version: 1"
    loaded = repo.load(name="run")
    series = loaded["trajectory"]
    assert list(series.columns) == ["t", "h", "h_prime", "front_gradient", "sup_u", "sup_v"]
    assert len(series) == trajectory.times.shape[0]
    np.testing.assert_allclose(series["h"].to_numpy(), trajectory.fronts, rtol=1e-11)

    profiles = loaded["profiles"]
    assert list(profiles.columns) == ["t", "xi", "x", "u", "v"]
    assert len(profiles) == len(trajectory.snapshots) * (short_solver.n_grid + 2)

    meta = loaded["metadata"]
    assert meta["schema_version"] == 1
    assert meta["params"]["lambda"] == 2.0
    assert meta["solver"]["n_grid"] == short_solver.n_grid
    assert meta["init"]["amp_u"] == 0.1
    assert "x" not in meta["init"]
    assert meta["steps"] == trajectory.step_sizes.shape[0]
    assert "created_at" in meta


def test_trajectory_files_are_reproducible_without_timestamp(tmp_path, trajectory):
    repo = TrajectoryRepository(tmp_path)
    repo.save(trajectory, name="a", timestamp=False)
    repo.save(trajectory, name="b", timestamp=False)
    for name in ("trajectory.csv", "profiles.csv", "metadata.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_report_round_trip(tmp_path, barrier_params):
    repo = ReportRepository(tmp_path)
    report = model_service.spreading_barrier(barrier_params)
    path = repo.save(report, name="thresholds", extra={"note": "desk"})
    assert path.name == "thresholds.json"

    payload = repo.load(name="thresholds")
    assert payload["schema_version"] == 1
    assert payload["Lambda"] == pytest.approx(report.Lambda)
    assert payload["note"] == "desk"
    assert json.loads(path.read_text(encoding="utf-8")) == read_json(path)


def test_sweep_table(tmp_path):
    summary = SweepSummary(
        rows=[
            SweepRow(h0=0.5, rho=0.1, verdict="Vanishing", h_final=0.5),
            SweepRow(h0=2.0, rho=0.1, verdict="Error", error="STEFAN_VIOLATION"),
        ]
    )
    path = TableRepository(tmp_path).save_sweep(summary)
    frame = read_csv(path)
    assert list(frame.columns) == ["h0", "rho", "verdict", "h_final", "speed", "error"]
    assert frame["verdict"].tolist() == ["Vanishing", "Error"]
    assert pd.isna(frame.loc[0, "error"])
    assert frame.loc[1, "error"] == "STEFAN_VIOLATION"
    assert len(summary.failures) == 1


def test_steady_table(tmp_path):
    profile = steady_state_service.solve_logistic_bvp(d=1.0, rate=1.0, l=3.0, n_grid=64)
    repo = TableRepository(tmp_path)
    repo.save_steady(profile, name="steady")
    frame = repo.load(name="steady")
    assert list(frame.columns) == ["x", "V"]
    assert len(frame) == 65
    assert frame["V"].iloc[-1] == 0.0
