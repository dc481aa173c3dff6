import math
from typing import List, Optional

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_validator,
)


class ModelParams(BaseModel):
    """The constants of the free-boundary predator-prey system.

    ``b`` and ``c`` may be zero (the decoupled limit); every other constant must
    be strictly positive. Regime predicates are properties, recomputed on access.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: float = Field(..., alias="lambda", description="Prey growth rate (1/time)")
    mu: float = Field(..., description="Predator growth rate (1/time)")
    b: float = Field(..., description="Predation coefficient")
    c: float = Field(..., description="Conversion coefficient")
    d: float = Field(..., description="Predator diffusivity (length^2/time)")
    m: float = Field(..., description="Ratio-dependence saturation")
    rho: float = Field(..., description="Front-response (Stefan) coefficient")

    @field_validator("lam", "mu", "d", "m", "rho")
    @classmethod
    def validate_positive(cls, v: float, info) -> float:
        name = "lambda" if info.field_name == "lam" else info.field_name
        if not math.isfinite(v) or v <= 0:
            raise ValueError(f"{name} must be positive")
        return v

    @field_validator("b", "c")
    @classmethod
    def validate_non_negative(cls, v: float, info) -> float:
        if not math.isfinite(v) or v < 0:
            raise ValueError(f"{info.field_name} must be non-negative")
        return v

    @property
    def prey_survives(self) -> bool:
        """m*lambda > b."""
        return self.m * self.lam > self.b

    @property
    def coexist_regime(self) -> bool:
        """0 < m*lambda - b < b*mu/c, written without dividing by c."""
        excess = self.m * self.lam - self.b
        return excess > 0 and self.c * excess < self.b * self.mu

    @property
    def prey_faster(self) -> bool:
        """d*(mu+c) <= lambda - b/m."""
        return self.d * (self.mu + self.c) <= self.lam - self.b / self.m

    @property
    def is_decoupled(self) -> bool:
        return self.b == 0 and self.c == 0

    @property
    def effective_prey_rate(self) -> float:
        """lambda - b/m, the prey growth rate under maximal predation."""
        return self.lam - self.b / self.m

    @property
    def predator_threshold_length(self) -> float:
        """(pi/2)*sqrt(d/mu): below it the predator cannot persist on a fixed habitat."""
        return 0.5 * math.pi * math.sqrt(self.d / self.mu)

    def with_rho(self, rho: float) -> "ModelParams":
        return self.model_copy(update={"rho": rho})


class EquilibriumResult(BaseModel):
    """Closed-form coexistence equilibrium with the residuals of its defining system."""

    model_config = ConfigDict(frozen=True)

    u_star: float = Field(..., description="Prey equilibrium density")
    v_star: float = Field(..., description="Predator equilibrium density")
    A: float = Field(..., description="Intermediate coefficient")
    delta1: float = Field(..., description="Discriminant")
    residual1: float = Field(..., ge=0, description="|prey equation residual|")
    residual2: float = Field(..., ge=0, description="|predator equation residual|")


class IterationTrace(BaseModel):
    """Upper and lower sequences of the monotone equilibrium iteration."""

    u_upper: List[float] = Field(default_factory=list)
    v_upper: List[float] = Field(default_factory=list)
    u_lower: List[float] = Field(default_factory=list)
    v_lower: List[float] = Field(default_factory=list)
    iterations: int = Field(0, ge=0)
    converged: bool = False
    monotone: List[bool] = Field(
        default_factory=list, description="Sandwich ordering held at each step"
    )

    @property
    def u_limit(self) -> float:
        return 0.5 * (self.u_upper[-1] + self.u_lower[-1])

    @property
    def v_limit(self) -> float:
        return 0.5 * (self.v_upper[-1] + self.v_lower[-1])


class ThresholdReport(BaseModel):
    """Spreading barrier and the lower estimate of the vanishing threshold."""

    model_config = ConfigDict(frozen=True)

    Lambda: float = Field(..., gt=0, description="Spreading barrier (length)")
    h_star_lower: float = Field(..., gt=0, description="(pi/2)*lambda^(-1/2)")
    effective_rate: float = Field(..., gt=0, description="lambda - b/m")

    def sigma1(self, l: float) -> float:
        """Principal eigenvalue of the linearized prey operator on (0, l)."""
        return -self.effective_rate + (math.pi / (2.0 * l)) ** 2


class SpeedConstants(BaseModel):
    """Asymptotic speeds bounding the front and the two species."""

    model_config = ConfigDict(frozen=True)

    c1: float = Field(..., description="2*sqrt(lambda - b/m)")
    c2: float = Field(..., description="2*sqrt(lambda)")
    c3: float = Field(..., description="2*sqrt(d*mu)")
    c4: float = Field(..., description="2*sqrt(d*(mu+c))")
    c5: Optional[float] = Field(None, description="2*sqrt(lambda - b*s/(1+m*s))")
    s: float = Field(..., description="Ratio bound 2K/(lambda - b/m)")
    K: float = Field(..., gt=0, description="Sup-bound of the solution")
    c5_exceeds_c1: bool = Field(False, description="Diagnostic flag")


class SpeedWindow(BaseModel):
    """A band of observer speeds and what an observer moving in it sees."""

    model_config = ConfigDict(frozen=True)

    lower: float
    upper: Optional[float] = None
    sees: str = Field(..., description="'both', 'prey' or 'none'")


__all__ = [
    "ModelParams",
    "EquilibriumResult",
    "IterationTrace",
    "ThresholdReport",
    "SpeedConstants",
    "SpeedWindow",
]
