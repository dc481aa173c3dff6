from conftest import BARRIER_PARAMS_TOML
from freefront.core.exceptions import StefanViolation
from freefront.crud.artifact_crud import read_csv
from freefront.services import sweep_service as sweep_module
from freefront.services.config_service import config_service
from freefront.services.sweep_service import sweep_service

SWEEP_TOML = (
    'command = "sweep"\n'
    + BARRIER_PARAMS_TOML
    + """
[init]
h0 = 1.0
amp_u = 0.1
amp_v = 0.1

[solver]
n_grid = 32
t_max = 200.0
snapshot_every = 1000

[sweep]
h0 = [1.7, 0.5]
rho = [0.01, 0.001]
estimate_speed = false
"""
)


def test_sweep_rows_are_sorted_and_classified(tmp_path):
    cfg = config_service.parse_config(SWEEP_TOML)
    summary = sweep_service.run_sweep(cfg, tmp_path, workers=1)

    cells = [(row.h0, row.rho) for row in summary.rows]
    assert cells == [(0.5, 0.001), (0.5, 0.01), (1.7, 0.001), (1.7, 0.01)]
    # 1.7 lies beyond 1.05 * pi/2
    assert [row.verdict for row in summary.rows] == [
        "Vanishing",
        "Vanishing",
        "Spreading",
        "Spreading",
    ]
    assert not summary.failures

    frame = read_csv(tmp_path / "sweep.csv")
    assert frame["verdict"].tolist() == [row.verdict for row in summary.rows]
    assert (tmp_path / "runs" / "h0_0.5_rho_0.001" / "trajectory.csv").exists()


def test_sweep_table_is_reproducible(tmp_path):
    cfg = config_service.parse_config(SWEEP_TOML)
    sweep_service.run_sweep(cfg, tmp_path / "first", workers=1)
    sweep_service.run_sweep(cfg, tmp_path / "second", workers=1)
    first = (tmp_path / "first" / "sweep.csv").read_bytes()
    assert first == (tmp_path / "second" / "sweep.csv").read_bytes()


def test_failed_cell_becomes_error_row(tmp_path, monkeypatch):
    def explode(*args, **kwargs):
        raise StefanViolation(t=0.1, h_prime=-1.0)

    monkeypatch.setattr(sweep_module, "run_and_classify", explode)
    cfg = config_service.parse_config(SWEEP_TOML)
    summary = sweep_service.run_sweep(cfg, tmp_path, workers=1)

    assert len(summary.failures) == 4
    assert {row.error for row in summary.rows} == {"STEFAN_VIOLATION"}
    assert {row.verdict for row in summary.rows} == {"Error"}
    assert not (tmp_path / "runs").exists()


def test_unexpected_exception_becomes_internal_error_row(tmp_path, monkeypatch):
    def crash(*args, **kwargs):
        raise ZeroDivisionError("float division by zero")

    monkeypatch.setattr(sweep_module, "run_and_classify", crash)
    cfg = config_service.parse_config(SWEEP_TOML)
    summary = sweep_service.run_sweep(cfg, tmp_path, workers=1)

    assert len(summary.failures) == 4
    assert {row.error for row in summary.rows} == {"INTERNAL_ERROR"}
    frame = read_csv(tmp_path / "sweep.csv")
    assert frame["verdict"].tolist() == ["Error"] * 4
