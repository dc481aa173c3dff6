import math
from pathlib import Path

import pytest

from freefront.schemas.classify_schema import ClassificationRules
from freefront.schemas.model_schema import ModelParams
from freefront.schemas.solver_schema import InitialData, SolverConfig

HALF_PI = 0.5 * math.pi


@pytest.fixture
def coexist_params() -> ModelParams:
    """lambda = 1.5, everything else 1: inside the coexist regime."""
    return ModelParams(lam=1.5, mu=1.0, b=1.0, c=1.0, d=1.0, m=1.0, rho=1.0)


@pytest.fixture
def barrier_params() -> ModelParams:
    """lambda = 2, everything else 1: Lambda = pi/2, prey survives, no coexistence."""
    return ModelParams(lam=2.0, mu=1.0, b=1.0, c=1.0, d=1.0, m=1.0, rho=0.01)


@pytest.fixture
def small_init() -> InitialData:
    return InitialData(h0=0.5, amp_u=0.1, amp_v=0.1)


@pytest.fixture
def short_solver() -> SolverConfig:
    return SolverConfig(n_grid=64, t_max=1.0, snapshot_every=10)


@pytest.fixture
def long_solver() -> SolverConfig:
    return SolverConfig(n_grid=64, t_max=200.0, snapshot_every=200)


@pytest.fixture
def rules() -> ClassificationRules:
    return ClassificationRules()


def write_config(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


BARRIER_PARAMS_TOML = """
[params]
lambda = 2.0
mu = 1.0
b = 1.0
c = 1.0
d = 1.0
m = 1.0
rho = 0.01
"""

COEXIST_PARAMS_TOML = """
[params]
lambda = 1.5
mu = 1.0
b = 1.0
c = 1.0
d = 1.0
m = 1.0
rho = 1.0
"""

SMALL_RUN_TOML = """
[init]
h0 = 0.5
amp_u = 0.1
amp_v = 0.1

[solver]
n_grid = 32
t_max = 0.5
snapshot_every = 10
"""
