import math
from typing import List, Literal, Optional

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    model_validator,
)

from freefront.core.config import settings
from freefront.schemas.model_schema import ModelParams

COMPATIBILITY_TOL = 0.05


class InitialData(BaseModel):
    """Initial habitat and profiles.

    Either the cosine family ``amp * cos(pi x / (2 h0))`` or profiles sampled
    on ``x`` in [0, h0]. Sampled profiles must vanish at h0, be positive
    before it and start flat: u0'(0) = v0'(0) = 0 up to a relative
    ``COMPATIBILITY_TOL``.
    """

    model_config = ConfigDict(frozen=True)

    h0: float = Field(..., gt=0, description="Initial front position (length)")
    family: Literal["cosine", "sampled"] = "cosine"
    amp_u: Optional[float] = Field(None, gt=0, description="Cosine prey amplitude")
    amp_v: Optional[float] = Field(None, gt=0, description="Cosine predator amplitude")
    x: Optional[List[float]] = Field(None, description="Sample abscissae on [0, h0]")
    u0: Optional[List[float]] = None
    v0: Optional[List[float]] = None

    @model_validator(mode="after")
    def validate_profiles(self) -> "InitialData":
        if self.family == "cosine":
            if self.amp_u is None or self.amp_v is None:
                raise ValueError("cosine initial data requires amp_u and amp_v")
            return self
        if self.x is None or self.u0 is None or self.v0 is None:
            raise ValueError("sampled initial data requires x, u0 and v0")
        if not (len(self.x) == len(self.u0) == len(self.v0)) or len(self.x) < 4:
            raise ValueError("x, u0 and v0 must have the same length (at least 4)")
        x = np.asarray(self.x)
        if np.any(np.diff(x) <= 0):
            raise ValueError("x must be strictly increasing")
        if abs(x[0]) > 1e-12 or abs(x[-1] - self.h0) > 1e-12 * max(1.0, self.h0):
            raise ValueError("x must span [0, h0]")
        for name, values in (("u0", self.u0), ("v0", self.v0)):
            arr = np.asarray(values)
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
            if arr[-1] != 0.0:
                raise ValueError(f"{name} must vanish at h0")
            if np.any(arr[:-1] <= 0):
                raise ValueError(f"{name} must be positive on [0, h0)")
            # derivative at x = 0 of the quadratic through the first three samples
            slope = float(np.polyfit(x[:3], arr[:3], 2)[1])
            if abs(slope) > COMPATIBILITY_TOL * float(arr.max()) / self.h0:
                raise ValueError(
                    f"{name} must satisfy {name}'(0) = 0 (slope {slope:.3g} at x = 0)"
                )
        return self

    @property
    def sup_u(self) -> float:
        return self.amp_u if self.family == "cosine" else float(max(self.u0))

    @property
    def sup_v(self) -> float:
        return self.amp_v if self.family == "cosine" else float(max(self.v0))

    def with_h0(self, h0: float) -> "InitialData":
        if self.family != "cosine":
            raise ValueError("only cosine initial data can be rescaled to a new h0")
        return self.model_copy(update={"h0": h0})


class SolverConfig(BaseModel):
    """Discretization and run-length settings of the free-boundary stepper."""

    model_config = ConfigDict(frozen=True)

    n_grid: int = Field(200, ge=16, description="Interior points on xi in [0, 1]")
    dt: Optional[float] = Field(
        None, gt=0, description="Fixed time step; None selects the adaptive step"
    )
    dt_max: float = Field(settings.DEFAULT_DT_MAX, gt=0, description="Cap of the adaptive step")
    cfl: float = Field(settings.DEFAULT_CFL, gt=0, le=1, description="Advective Courant number")
    t_max: float = Field(..., gt=0, description="Horizon (time)")
    snapshot_every: int = Field(100, ge=1, description="Steps between snapshots")
    clamp_negatives: bool = True

    @property
    def d_xi(self) -> float:
        return 1.0 / (self.n_grid + 1)

    @property
    def xi(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_grid + 2)


class SimulationState(BaseModel):
    """One time level of the front-fixed system; U and V live on xi_j = j/(n+1)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    t: float
    h: float
    U: np.ndarray
    V: np.ndarray
    h_prime: float
    step_index: int = 0
    clamp_count: int = 0

    @property
    def xi(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.U.shape[0])

    @property
    def x(self) -> np.ndarray:
        return self.xi * self.h


class ProfileSnapshot(BaseModel):
    """Full profiles recorded at one time."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    t: float
    h: float
    u: np.ndarray
    v: np.ndarray

    @property
    def xi(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.u.shape[0])

    @property
    def x(self) -> np.ndarray:
        return self.xi * self.h

    def sample(self, x: float) -> tuple[float, float]:
        """Profiles at physical position x, extended by zero beyond the front."""
        if x >= self.h or x < 0:
            return 0.0, 0.0
        xi = x / self.h
        grid = self.xi
        return float(np.interp(xi, grid, self.u)), float(np.interp(xi, grid, self.v))


class Trajectory(BaseModel):
    """Time series recorded from one run."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: np.ndarray
    fronts: np.ndarray
    front_speeds: np.ndarray
    front_gradients: np.ndarray
    sup_u: np.ndarray
    sup_v: np.ndarray
    snapshots: List[ProfileSnapshot] = Field(default_factory=list)
    params: ModelParams
    config: SolverConfig
    init: Optional[InitialData] = None
    step_sizes: np.ndarray
    k_bound: float = Field(..., gt=0, description="Observed sup-bound K")
    clamp_count: int = 0
    bound_warnings: int = 0
    stop_reason: Optional[str] = None
    failed: bool = False

    @model_validator(mode="after")
    def validate_lengths(self) -> "Trajectory":
        n = self.times.shape[0]
        for name in ("fronts", "front_speeds", "front_gradients", "sup_u", "sup_v"):
            if getattr(self, name).shape[0] != n:
                raise ValueError(f"{name} length does not match times")
        if self.step_sizes.shape[0] != max(n - 1, 0):
            raise ValueError("step_sizes must hold one entry per step")
        return self

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    @property
    def h_end(self) -> float:
        return float(self.fronts[-1])

    @property
    def final(self) -> ProfileSnapshot:
        return self.snapshots[-1]

    def front_at(self, t: float) -> float:
        return float(np.interp(t, self.times, self.fronts))

    @property
    def fronts_monotone(self) -> bool:
        """Fronts never retreat; they may freeze only once the prey is extinct."""
        return bool(np.all(np.diff(self.fronts) >= 0.0))


def cosine_profile(amp: float, x: np.ndarray, h0: float) -> np.ndarray:
    profile = amp * np.cos(0.5 * math.pi * x / h0)
    profile[x >= h0] = 0.0
    return profile


__all__ = [
    "InitialData",
    "SolverConfig",
    "SimulationState",
    "ProfileSnapshot",
    "Trajectory",
    "cosine_profile",
]
