import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class SteadyProfile(BaseModel):
    """Stationary logistic profile on [0, l] with Neumann-left/Dirichlet-right ends."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    l: float = Field(..., gt=0, description="Domain length")
    grid: np.ndarray
    values: np.ndarray
    positive: bool = Field(..., description="False when only the zero solution exists")
    residual: float = Field(0.0, ge=0, description="Final max residual of the solve")
    newton_steps: int = 0

    @property
    def dx(self) -> float:
        return float(self.grid[1] - self.grid[0])

    @property
    def boundary_error(self) -> float:
        """|V(l)|, the Dirichlet mismatch."""
        return float(abs(self.values[-1]))


class UniquenessReport(BaseModel):
    """Newton restarts from random positive guesses and how far apart they landed."""

    starts: int = Field(..., ge=1)
    converged: int = Field(..., ge=0)
    max_distance: float = Field(..., ge=0, description="Largest pairwise sup-norm gap")
    tol: float = Field(..., gt=0)

    @property
    def unique(self) -> bool:
        return self.converged == self.starts and self.max_distance <= self.tol


__all__ = ["SteadyProfile", "UniquenessReport"]
