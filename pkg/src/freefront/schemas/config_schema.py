from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from freefront.schemas.classify_schema import ClassificationRules
from freefront.schemas.model_schema import ModelParams
from freefront.schemas.semiwave_schema import SemiWaveProblem
from freefront.schemas.solver_schema import InitialData, SolverConfig

Command = Literal[
    "simulate", "classify", "sweep", "semiwave", "equilibrium", "thresholds", "compare"
]
PDE_COMMANDS = {"simulate", "classify", "sweep", "thresholds", "compare"}

COEXIST_INEQUALITY = "coexist regime requires 0 < m*lambda - b < b*mu/c"
SURVIVAL_INEQUALITY = "prey survival requires m*lambda > b"


class SweepAxes(BaseModel):
    """Grid of (h0, rho) runs; every pair is simulated."""

    model_config = ConfigDict(frozen=True)

    h0: List[float] = Field(..., min_length=1)
    rho: List[float] = Field(..., min_length=1)
    estimate_speed: bool = Field(
        True, description="Run spreading cases to t_max so a speed can be fitted"
    )

    @model_validator(mode="after")
    def validate_axes(self) -> "SweepAxes":
        if any(v <= 0 for v in self.h0) or any(v <= 0 for v in self.rho):
            raise ValueError("sweep axes must hold positive values")
        return self


class SemiWaveSpec(BaseModel):
    """Semi-wave problem plus optional grids for the monotonicity matrix."""

    model_config = ConfigDict(frozen=True)

    problem: SemiWaveProblem
    y_max: Optional[float] = Field(None, gt=0)
    tol: Optional[float] = Field(None, gt=0)
    rhos: List[float] = Field(default_factory=list)
    a_values: List[float] = Field(default_factory=list)


class ThresholdSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["rhoCritical", "h0Band"] = "rhoCritical"
    bracket: Tuple[float, float]
    n_bisect: int = Field(8, ge=0)
    audit_points: int = Field(0, ge=0)


class CompareSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    tol: Optional[float] = Field(None, gt=0)
    upper_solution: bool = True
    sandwich: bool = True


class EquilibriumSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    K: Optional[float] = Field(None, gt=0, description="Predator sup-bound for c5 and s")
    tol: Optional[float] = Field(None, gt=0)
    max_iter: Optional[int] = Field(None, ge=1)


class RunConfig(BaseModel):
    """One batch job, as read from a TOML document."""

    model_config = ConfigDict(frozen=True)

    command: Command
    params: Optional[ModelParams] = None
    init: Optional[InitialData] = None
    solver: Optional[SolverConfig] = None
    sweep: Optional[SweepAxes] = None
    rules: ClassificationRules = Field(default_factory=ClassificationRules)
    semiwave: Optional[SemiWaveSpec] = None
    thresholds: Optional[ThresholdSpec] = None
    compare: Optional[CompareSpec] = None
    equilibrium: Optional[EquilibriumSpec] = None
    output: str = "out"
    seed: int = 0
    threads: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def validate_consistency(self) -> "RunConfig":
        if self.sweep is not None and self.command != "sweep":
            raise ValueError("sweep axes are only allowed with command = 'sweep'")
        if self.command == "sweep" and self.sweep is None:
            raise ValueError("command 'sweep' requires a [sweep] table")
        if self.command in PDE_COMMANDS:
            if self.init is None or self.solver is None:
                raise ValueError(f"command '{self.command}' requires [init] and [solver]")
        if self.command != "semiwave" and self.params is None:
            raise ValueError(f"command '{self.command}' requires [params]")
        if self.command == "semiwave" and self.params is None and self.semiwave is None:
            raise ValueError("command 'semiwave' requires [semiwave.problem] or [params]")
        if self.command == "thresholds" and self.thresholds is not None:
            if self.thresholds.kind == "h0Band" and self.init.family != "cosine":
                raise ValueError("h0Band thresholds need cosine initial data")
        if self.command == "sweep" and self.init.family != "cosine":
            raise ValueError("sweeps rescale h0 and need cosine initial data")

        p = self.params
        if p is not None:
            if self.command == "equilibrium" and not p.coexist_regime:
                raise ValueError(
                    f"{COEXIST_INEQUALITY} (got m*lambda - b = {p.m * p.lam - p.b:.6g}, "
                    f"b*mu = {p.b * p.mu:.6g}, c = {p.c:.6g})"
                )
            if self.command in {"thresholds", "compare"} and not p.prey_survives:
                raise ValueError(SURVIVAL_INEQUALITY)
            if self.command == "semiwave" and self.semiwave is None and not p.prey_survives:
                raise ValueError(SURVIVAL_INEQUALITY)
        return self


__all__ = [
    "RunConfig",
    "SweepAxes",
    "SemiWaveSpec",
    "ThresholdSpec",
    "CompareSpec",
    "EquilibriumSpec",
    "PDE_COMMANDS",
]
