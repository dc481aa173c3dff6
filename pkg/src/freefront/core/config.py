# freefront/core/config.py
import os
from typing import Optional

from pydantic import computed_field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # --- Project Metadata ---
    PROJECT_NAME: str = "freefront"
    VERSION: str = "0.1.0"
    DESCRIPTION: str = (
        "Free-boundary ratio-dependent predator-prey laboratory"
    )
    SCHEMA_VERSION: int = 1

    # --- Runtime Overrides ---
    OUTPUT_DIR: Optional[str] = None
    THREADS: Optional[int] = None
    LOG_LEVEL: str = "INFO"

    # --- Equilibrium Algebra ---
    DEFAULT_EQUILIBRIUM_TOL: float = 1e-10
    DEFAULT_MAX_ITER: int = 10_000

    # --- Steady-State Solver ---
    DEFAULT_BVP_GRID: int = 512
    DEFAULT_BVP_TOL: float = 1e-10
    BVP_STAGNATION_STEPS: int = 20

    # --- Semi-Wave Solver ---
    DEFAULT_SEMIWAVE_TOL: float = 1e-8
    SEMIWAVE_YMAX_FACTOR: float = 50.0
    SEMIWAVE_MAX_DOUBLINGS: int = 3
    SEMIWAVE_OVERSHOOT_MARGIN: float = 1e-6

    # --- Free-Boundary Solver ---
    DEFAULT_CFL: float = 0.4
    DEFAULT_DT_MAX: float = 0.01
    CLAMP_FAILURE_FRACTION: float = 1e-3
    EXTINCTION_FLOOR: float = 1e-200

    # --- Classification / Comparison ---
    DEFAULT_MARGIN_LAMBDA: float = 0.05
    DEFAULT_WINDOW_FRACTION: float = 0.05
    DEFAULT_SPEED_WINDOW: float = 0.25
    DEFAULT_ORDERING_TOL: float = 1e-3
    DEFAULT_PREDATOR_LIMIT_TOL: float = 0.05

    @computed_field
    @property
    def WORKER_COUNT(self) -> int:
        return self.THREADS or os.cpu_count() or 1

    # --- Model Configuration ---
    model_config = SettingsConfigDict(
        env_file=".env", env_prefix="FREEFRONT_", extra="ignore"
    )


settings = Settings()
