# freefront/services/model_service.py
"""
Model algebra service.

Closed-form equilibria, the monotone iteration that brackets them, the
principal eigenvalue of the linearized prey operator and the speed constants.
Nothing here solves a differential equation.
"""
import logging
import math
from typing import List, Optional

import numpy as np

from freefront.core.config import settings
from freefront.core.exception_utils import raise_for_status
from freefront.core.exceptions import DomainError, OutOfRegime
from freefront.schemas.model_schema import (
    EquilibriumResult,
    IterationTrace,
    ModelParams,
    SpeedConstants,
    SpeedWindow,
    ThresholdReport,
)

logger = logging.getLogger(__name__)

COEXIST_INEQUALITY = "coexist regime requires 0 < m*lambda - b < b*mu/c"
SURVIVAL_INEQUALITY = "prey survival requires m*lambda > b"
MONOTONE_SLACK = 1e-12


def _positive_root(p: float, q: float) -> float:
    """Positive root of x^2 - p x - q = 0 for q >= 0, without cancellation."""
    disc = math.sqrt(p * p + 4.0 * q)
    if p >= 0:
        return 0.5 * (p + disc)
    # p < 0: p + disc loses digits, use x = 2q / (disc - p)
    return 2.0 * q / (disc - p) if q > 0 else 0.0


class ModelService:
    """Handles the algebra of the predator-prey model."""

    def __init__(self):
        self._logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def response(self, u, v, m: float):
        """u*v/(u + m*v), with the removable singularity at the origin set to 0.

        Works on scalars and numpy arrays. Negative densities are a solver bug
        and raise DomainError.
        """
        raise_for_status(m <= 0, DomainError, detail="m must be positive", field="m")
        u_arr = np.asarray(u, dtype=float)
        v_arr = np.asarray(v, dtype=float)
        raise_for_status(
            bool(np.any(u_arr < 0) or np.any(v_arr < 0)),
            DomainError,
            detail="response requires non-negative densities",
            field="u,v",
        )
        denom = u_arr + m * v_arr
        safe = np.where(denom > 0, denom, 1.0)
        flux = np.where(denom > 0, u_arr * v_arr / safe, 0.0)
        if flux.ndim == 0:
            return float(flux)
        return flux

    def equilibrium_closed_form(self, p: ModelParams) -> EquilibriumResult:
        """Positive equilibrium (u*, v*) of the kinetic system."""
        raise_for_status(
            not p.coexist_regime,
            OutOfRegime,
            detail=f"{COEXIST_INEQUALITY} (got m*lambda - b = {p.m * p.lam - p.b:.6g}"
            f", b*mu = {p.b * p.mu:.6g}, c = {p.c:.6g})",
            inequality=COEXIST_INEQUALITY,
        )
        lam, mu, b, c, m = p.lam, p.mu, p.b, p.c, p.m
        A = lam * (2 * c * m**2 + b) - m * b * (mu + 2 * c)
        delta1 = A**2 + 4 * (b + c * m**2) * (b * (mu + c) - m * c * lam) * (m * lam - b)
        u_star = (A + math.sqrt(delta1)) / (2 * (b + c * m**2))
        v_star = u_star * (lam - u_star) / (b - m * (lam - u_star))

        residual1 = abs(lam - u_star - b * v_star / (u_star + m * v_star))
        residual2 = abs(mu - v_star + c * u_star / (u_star + m * v_star))
        self._logger.debug(
            "Closed-form equilibrium computed",
            extra={"u_star": u_star, "v_star": v_star, "residuals": (residual1, residual2)},
        )
        return EquilibriumResult(
            u_star=u_star,
            v_star=v_star,
            A=A,
            delta1=delta1,
            residual1=residual1,
            residual2=residual2,
        )

    def phi_map(self, s: float, p: ModelParams) -> float:
        """Prey nullcline: positive root of u^2 - (lambda - m s) u - (m lambda - b) s = 0."""
        raise_for_status(s < 0, DomainError, detail="s must be non-negative", field="s", value=s)
        raise_for_status(
            not p.prey_survives, OutOfRegime, detail=SURVIVAL_INEQUALITY,
            inequality=SURVIVAL_INEQUALITY,
        )
        return _positive_root(p.lam - p.m * s, (p.m * p.lam - p.b) * s)

    def psi_map(self, s: float, p: ModelParams) -> float:
        """Predator nullcline: positive root of m v^2 - (m mu - s) v - (mu + c) s = 0.

        This is the second kinetic equation multiplied through by (s + m v).
        """
        raise_for_status(s < 0, DomainError, detail="s must be non-negative", field="s", value=s)
        return _positive_root((p.m * p.mu - s) / p.m, (p.mu + p.c) * s / p.m)

    def iterate_equilibrium(
        self,
        p: ModelParams,
        tol: float = settings.DEFAULT_EQUILIBRIUM_TOL,
        max_iter: int = settings.DEFAULT_MAX_ITER,
    ) -> IterationTrace:
        """Monotone upper/lower sequences seeded at u_upper = lambda.

        Exhausting max_iter returns the trace with converged = False.
        """
        raise_for_status(
            not p.coexist_regime, OutOfRegime, detail=COEXIST_INEQUALITY,
            inequality=COEXIST_INEQUALITY,
        )
        u_up: List[float] = []
        v_up: List[float] = []
        u_lo: List[float] = []
        v_lo: List[float] = []
        monotone: List[bool] = []

        u_bar = p.lam
        converged = False
        for _ in range(max_iter):
            v_bar = self.psi_map(u_bar, p)
            u_low = self.phi_map(v_bar, p)
            v_low = self.psi_map(u_low, p)

            ok = u_low <= u_bar + MONOTONE_SLACK and v_low <= v_bar + MONOTONE_SLACK
            if u_up:
                ok = ok and (
                    u_bar <= u_up[-1] + MONOTONE_SLACK
                    and v_bar <= v_up[-1] + MONOTONE_SLACK
                    and u_low >= u_lo[-1] - MONOTONE_SLACK
                    and v_low >= v_lo[-1] - MONOTONE_SLACK
                )
            u_up.append(u_bar)
            v_up.append(v_bar)
            u_lo.append(u_low)
            v_lo.append(v_low)
            monotone.append(ok)

            if abs(u_bar - u_low) <= tol and abs(v_bar - v_low) <= tol:
                converged = True
                break
            u_bar = self.phi_map(v_low, p)

        if not converged:
            self._logger.warning(
                "Equilibrium iteration did not converge",
                extra={"max_iter": max_iter, "gap_u": u_up[-1] - u_lo[-1]},
            )
        return IterationTrace(
            u_upper=u_up,
            v_upper=v_up,
            u_lower=u_lo,
            v_lower=v_lo,
            iterations=len(u_up),
            converged=converged,
            monotone=monotone,
        )

    def principal_eigenvalue(self, l: float, p: ModelParams) -> float:
        """sigma_1(l) = -(lambda - b/m) + (pi/(2l))^2."""
        raise_for_status(l <= 0, DomainError, detail="l must be positive", field="l", value=l)
        raise_for_status(
            not p.prey_survives, OutOfRegime, detail=SURVIVAL_INEQUALITY,
            inequality=SURVIVAL_INEQUALITY,
        )
        return -p.effective_prey_rate + (math.pi / (2.0 * l)) ** 2

    def spreading_barrier(self, p: ModelParams) -> ThresholdReport:
        """Lambda = (pi/2) sqrt(m/(m lambda - b)) and the lower vanishing threshold."""
        raise_for_status(
            not p.prey_survives, OutOfRegime, detail=SURVIVAL_INEQUALITY,
            inequality=SURVIVAL_INEQUALITY,
        )
        barrier = 0.5 * math.pi * math.sqrt(p.m / (p.m * p.lam - p.b))
        h_star_lower = 0.5 * math.pi / math.sqrt(p.lam)
        return ThresholdReport(
            Lambda=barrier,
            h_star_lower=h_star_lower,
            effective_rate=p.effective_prey_rate,
        )

    def speed_constants(self, p: ModelParams, K: float) -> SpeedConstants:
        """c1..c5 and the ratio bound s = 2K/(lambda - b/m).

        K is the caller's sup-bound on the predator (observed sup plus headroom).
        """
        raise_for_status(
            not p.prey_survives, OutOfRegime, detail=SURVIVAL_INEQUALITY,
            inequality=SURVIVAL_INEQUALITY,
        )
        raise_for_status(K <= 0, DomainError, detail="K must be positive", field="K", value=K)
        effective = p.effective_prey_rate
        s = 2.0 * K / effective
        c1 = 2.0 * math.sqrt(effective)
        c5_radicand = p.lam - p.b * s / (1.0 + p.m * s)
        # unreachable under m*lambda > b, kept so a degenerate bound is reported not raised
        c5: Optional[float] = 2.0 * math.sqrt(c5_radicand) if c5_radicand > 0 else None
        constants = SpeedConstants(
            c1=c1,
            c2=2.0 * math.sqrt(p.lam),
            c3=2.0 * math.sqrt(p.d * p.mu),
            c4=2.0 * math.sqrt(p.d * (p.mu + p.c)),
            c5=c5,
            s=s,
            K=K,
            c5_exceeds_c1=c5 is not None and c5 > c1,
        )
        if constants.c5_exceeds_c1:
            self._logger.info(
                "c5 exceeds c1; the prey-only lower bound is the sharper one",
                extra={"c1": c1, "c5": c5, "K": K},
            )
        return constants

    def moving_frame_windows(self, p: ModelParams, K: float) -> List[SpeedWindow]:
        """Observer-speed bands: both species, prey only (if non-empty), neither."""
        sc = self.speed_constants(p, K)
        windows = [SpeedWindow(lower=0.0, upper=sc.c3, sees="both")]
        if sc.c5 is not None and sc.c4 < sc.c5:
            windows.append(SpeedWindow(lower=sc.c4, upper=sc.c5, sees="prey"))
        windows.append(SpeedWindow(lower=sc.c2, upper=None, sees="none"))
        return windows


model_service = ModelService()
