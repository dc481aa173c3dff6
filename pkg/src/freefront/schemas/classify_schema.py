from enum import Enum
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from freefront.core.config import settings

from freefront.schemas.solver_schema import Trajectory


class Verdict(str, Enum):
    SPREADING = "Spreading"
    VANISHING = "Vanishing"
    UNDETERMINED = "Undetermined"


class ClassificationRules(BaseModel):
    """Tolerances of the spreading/vanishing rules.

    ``tol_h`` and ``tol_u`` default to 1e-6*Lambda/tMax and 1e-4*lambda when
    left unset.
    """

    model_config = ConfigDict(frozen=True)

    margin_lambda: float = Field(settings.DEFAULT_MARGIN_LAMBDA, ge=0)
    tol_h: Optional[float] = Field(None, gt=0)
    tol_u: Optional[float] = Field(None, gt=0)
    window_fraction: float = Field(settings.DEFAULT_WINDOW_FRACTION, gt=0, lt=1)
    grid_tol: float = Field(0.02, ge=0)


class Evidence(BaseModel):
    rule: str
    t: float
    detail: str = ""


class Outcome(BaseModel):
    verdict: Verdict
    h_inf_estimate: Optional[float] = None
    equilibrium_error: Optional[float] = None
    speed_estimate: Optional[float] = None
    evidence: Evidence


class ThresholdEstimate(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: Literal["rhoCritical", "h0Band"]
    lower: float
    upper: float
    runs: int = 0
    complete: bool = True
    probes: List[tuple[float, Verdict]] = Field(default_factory=list)
    trajectories_kept: List[Trajectory] = Field(default_factory=list, exclude=True)

    @model_validator(mode="after")
    def validate_bracket(self) -> "ThresholdEstimate":
        if not self.lower < self.upper:
            raise ValueError("lower must be below upper")
        return self


class MovingFrameSeries(BaseModel):
    """Profiles seen by an observer moving right at speed k."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    k: float = Field(..., ge=0)
    times: np.ndarray
    u: np.ndarray
    v: np.ndarray


class PredatorLimitReport(BaseModel):
    """Outcome of the predator dichotomy check on a vanishing run."""

    branch: Literal["extinct", "persistent", "borderline"]
    threshold: float
    h_inf: float
    sup_v: float
    sup_error: Optional[float] = None
    relative_error: Optional[float] = None
    passed: bool


__all__ = [
    "Verdict",
    "ClassificationRules",
    "Evidence",
    "Outcome",
    "ThresholdEstimate",
    "MovingFrameSeries",
    "PredatorLimitReport",
]
