import math
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field


class ExplicitUpperSolution(BaseModel):
    """Decaying cosine upper solution for a small initial habitat.

    w(t, x) = C exp(-alpha t) cos(pi x / (2 sigma(t))) on [0, sigma(t)],
    sigma(t) = h0 (1 + delta - delta/2 exp(-gamma t)).
    """

    model_config = ConfigDict(frozen=True)

    C: float = Field(..., gt=0, description="Amplitude")
    delta: float = Field(..., gt=0, description="Expansion fraction")
    gamma: float = Field(..., gt=0, description="Front relaxation rate")
    alpha: float = Field(..., gt=0, description="Amplitude decay rate")
    rho0: float = Field(..., gt=0, description="Largest admissible Stefan coefficient")
    h0: float = Field(..., gt=0, description="Initial front")
    lam: float = Field(..., gt=0, description="Prey growth rate used")

    def sigma(self, t: float) -> float:
        return self.h0 * (1.0 + self.delta - 0.5 * self.delta * math.exp(-self.gamma * t))

    @property
    def sigma_limit(self) -> float:
        return self.h0 * (1.0 + self.delta)

    def w(self, t: float, x: np.ndarray) -> np.ndarray:
        s = self.sigma(t)
        values = self.C * math.exp(-self.alpha * t) * np.cos(0.5 * math.pi * x / s)
        return np.where((x >= 0) & (x <= s), values, 0.0)


class ComparisonReport(BaseModel):
    """Outcome of one ordering check; worst_margin > 0 means a violation."""

    check: str
    worst_margin: float
    location: Dict[str, float] = Field(default_factory=dict)
    passed: bool
    tol: float
    details: Dict[str, float] = Field(default_factory=dict)


class SandwichReport(BaseModel):
    checks: List[ComparisonReport]

    @computed_field
    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def get(self, name: str) -> Optional[ComparisonReport]:
        return next((c for c in self.checks if c.check == name), None)


__all__ = [
    "ExplicitUpperSolution",
    "ComparisonReport",
    "SandwichReport",
]
