import math
from typing import Any, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class SemiWaveProblem(BaseModel):
    """d q'' - c q' + q (a - bcoef q) = 0, q(0) = 0, q'(0) = c/rho, q(inf) = a/bcoef."""

    model_config = ConfigDict(frozen=True)

    a: float = Field(..., gt=0, description="Growth rate")
    bcoef: float = Field(..., gt=0, description="Self-limitation")
    d: float = Field(..., gt=0, description="Diffusivity")
    rho: float = Field(..., gt=0, description="Stefan coefficient")

    @property
    def carrying_capacity(self) -> float:
        return self.a / self.bcoef

    @property
    def c_max(self) -> float:
        """2*sqrt(a*d), the supremum of admissible speeds."""
        return 2.0 * math.sqrt(self.a * self.d)

    @property
    def stefan_number(self) -> float:
        """a*rho/(bcoef*d), the parameter governing both speed asymptotics."""
        return self.a * self.rho / (self.bcoef * self.d)


class SemiWaveSolution(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    c: float = Field(..., gt=0, description="Wave speed (length/time)")
    y_grid: np.ndarray
    q: np.ndarray
    q_prime: np.ndarray
    converged: bool
    tail_gap: float = Field(..., ge=0, description="|q(yMax) - a/b|")
    ode_residual: float = Field(..., ge=0, description="Sup-norm ODE residual")
    y_max: float = Field(..., gt=0)
    bracket_width: float = Field(..., ge=0)
    segments: List[Any] = Field(
        default_factory=list, exclude=True, description="(offset, dense solution) pieces"
    )

    @property
    def monotone(self) -> bool:
        """Non-decreasing; the far tail flattens below float resolution."""
        return bool(np.all(np.diff(self.q) >= 0.0))


class SemiWaveAsymptotics(BaseModel):
    """Report comparing a computed speed to its large/small Stefan-number limits."""

    rho: float
    a: float
    b: float
    d: float
    c: float
    c_over_2sqrtad: float
    small_rho_ratio: float


class MonotonicityReport(BaseModel):
    """Matrix of speeds over ascending rho (rows) and a (columns) grids."""

    rhos: List[float]
    a_values: List[float]
    speeds: List[List[float]]
    increasing_in_rho: bool
    increasing_in_a: bool
    below_cap: bool

    @property
    def passed(self) -> bool:
        return self.increasing_in_rho and self.increasing_in_a and self.below_cap


__all__ = [
    "SemiWaveProblem",
    "SemiWaveSolution",
    "SemiWaveAsymptotics",
    "MonotonicityReport",
]
