# freefront/services/semiwave_service.py
"""
Semi-wave speed by shooting and bisection.

d q'' - c q' + q (a - b q) = 0, q(0) = 0, q'(0) = c/rho, q(inf) = a/b.

For a trial speed the shot from (0, c/rho) either crosses the carrying
capacity while still rising (overshoot) or turns back below it
(undershoot). Overshoot/undershoot is monotone in c, so bisection isolates
the speed. The returned profile is the overshooting shot up to half the
carrying capacity, spliced onto the stable manifold of (a/b, 0) and closed
by its linear tail.
"""
import logging
import math
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from freefront.core.config import settings
from freefront.core.exception_utils import handle_exceptions, raise_for_status
from freefront.core.exceptions import (
    BracketFailure,
    DomainError,
    OutOfRegime,
    PropertyViolation,
    SolverFailure,
)
from freefront.schemas.model_schema import ModelParams
from freefront.schemas.semiwave_schema import (
    MonotonicityReport,
    SemiWaveAsymptotics,
    SemiWaveProblem,
    SemiWaveSolution,
)

logger = logging.getLogger(__name__)

RTOL = 1e-12
BRACKET_EDGE = 1e-9
MANIFOLD_OFFSET = 1e-10
SEGMENT_SAMPLES = 400
RESIDUAL_SAMPLES = 2000


class Shot(str, Enum):
    OVERSHOOT = "overshoot"
    UNDERSHOOT = "undershoot"


def _rhs(prob: SemiWaveProblem, c: float):
    a, b, d = prob.a, prob.bcoef, prob.d

    def rhs(_y: float, z: np.ndarray) -> List[float]:
        q, p = z
        return [p, (c * p - q * (a - b * q)) / d]

    return rhs


class SemiWaveService:
    """Shooting solver for the semi-wave problem."""

    def __init__(self):
        self._logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def default_y_max(self, prob: SemiWaveProblem) -> float:
        return settings.SEMIWAVE_YMAX_FACTOR * math.sqrt(prob.d / prob.a)

    def _atol(self, prob: SemiWaveProblem) -> float:
        return 1e-16 * max(prob.carrying_capacity, 1.0)

    def shoot(self, prob: SemiWaveProblem, c: float, y_max: float) -> Shot:
        """Classify the trajectory from (0, c/rho) for trial speed c."""
        capacity = prob.carrying_capacity
        ceiling = capacity * (1.0 + settings.SEMIWAVE_OVERSHOOT_MARGIN)

        def overshoot(_y, z):
            return z[0] - ceiling

        overshoot.terminal = True
        overshoot.direction = 1

        def turned(_y, z):
            return z[1]

        turned.terminal = True
        turned.direction = -1

        sol = solve_ivp(
            _rhs(prob, c),
            (0.0, y_max),
            [0.0, c / prob.rho],
            method="DOP853",
            rtol=RTOL,
            atol=self._atol(prob),
            events=(overshoot, turned),
        )
        raise_for_status(
            sol.status < 0, SolverFailure, detail=f"semi-wave shot failed: {sol.message}"
        )
        if sol.t_events[0].size:
            return Shot.OVERSHOOT
        if sol.t_events[1].size:
            return Shot.UNDERSHOOT
        return Shot.OVERSHOOT if sol.y[0, -1] > capacity else Shot.UNDERSHOOT

    def _bisect(self, prob: SemiWaveProblem, y_max: float, tol: float) -> Tuple[float, float]:
        c_lo = prob.c_max * BRACKET_EDGE
        c_hi = prob.c_max * (1.0 - BRACKET_EDGE)
        lo_shot = self.shoot(prob, c_lo, y_max)
        hi_shot = self.shoot(prob, c_hi, y_max)
        raise_for_status(
            lo_shot is not Shot.UNDERSHOOT or hi_shot is not Shot.OVERSHOOT,
            BracketFailure,
            detail=f"speed bracket ends classify as {lo_shot.value}/{hi_shot.value}",
            y_max=y_max,
        )
        while c_hi - c_lo > tol:
            mid = 0.5 * (c_lo + c_hi)
            if self.shoot(prob, mid, y_max) is Shot.OVERSHOOT:
                c_hi = mid
            else:
                c_lo = mid
        return c_lo, c_hi

    def _profile(
        self, prob: SemiWaveProblem, c: float, y_max: float
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray, list]:
        capacity = prob.carrying_capacity
        rhs = _rhs(prob, c)
        atol = self._atol(prob)

        def half_way(_y, z):
            return z[0] - 0.5 * capacity

        half_way.terminal = True

        rising = solve_ivp(
            rhs, (0.0, 4.0 * y_max), [0.0, c / prob.rho], method="DOP853",
            rtol=RTOL, atol=atol, events=half_way, dense_output=True,
        )
        raise_for_status(
            not rising.t_events[0].size,
            SolverFailure,
            detail="overshooting shot never reached half the carrying capacity",
        )
        y_half = float(rising.t_events[0][0])

        mu_minus = (c - math.sqrt(c * c + 4.0 * prob.a * prob.d)) / (2.0 * prob.d)
        eps = MANIFOLD_OFFSET * capacity
        manifold = solve_ivp(
            rhs, (0.0, -4.0 * y_max), [capacity - eps, -mu_minus * eps], method="DOP853",
            rtol=RTOL, atol=atol, events=half_way, dense_output=True,
        )
        raise_for_status(
            not manifold.t_events[0].size,
            SolverFailure,
            detail="stable manifold never reached half the carrying capacity",
        )
        s_half = float(manifold.t_events[0][0])
        offset = y_half - s_half
        y_join = offset

        y_rise = np.linspace(0.0, y_half, SEGMENT_SAMPLES)
        q_rise, p_rise = rising.sol(y_rise)
        s_man = np.linspace(s_half, 0.0, SEGMENT_SAMPLES)[1:]
        q_man, p_man = manifold.sol(s_man)

        y_end = max(y_max, y_join + 10.0 / abs(mu_minus))
        y_tail = np.linspace(y_join, y_end, SEGMENT_SAMPLES)[1:]
        z_tail = -eps * np.exp(mu_minus * (y_tail - y_join))

        y_grid = np.concatenate((y_rise, offset + s_man, y_tail))
        q = np.concatenate((q_rise, q_man, capacity + z_tail))
        q_prime = np.concatenate((p_rise, p_man, mu_minus * z_tail))
        q_prime[0] = c / prob.rho
        q[0] = 0.0
        segments = [(0.0, 0.0, y_half, rising.sol), (offset, s_half, 0.0, manifold.sol)]
        return y_grid, q, q_prime, segments

    @handle_exceptions(default_exception=SolverFailure)
    def solve_semi_wave(
        self,
        prob: SemiWaveProblem,
        y_max: Optional[float] = None,
        tol: float = settings.DEFAULT_SEMIWAVE_TOL,
    ) -> SemiWaveSolution:
        """Speed c in (0, 2 sqrt(a d)) and the monotone profile q.

        On BracketFailure y_max is doubled (at most SEMIWAVE_MAX_DOUBLINGS
        times) before giving up.
        """
        raise_for_status(tol <= 0, DomainError, detail="tol must be positive", field="tol")
        y_max = y_max if y_max is not None else self.default_y_max(prob)
        for attempt in range(settings.SEMIWAVE_MAX_DOUBLINGS + 1):
            try:
                c_lo, c_hi = self._bisect(prob, y_max, tol)
                break
            except BracketFailure:
                if attempt == settings.SEMIWAVE_MAX_DOUBLINGS:
                    raise
                self._logger.info("Doubling y_max after bracket failure", extra={"y_max": y_max})
                y_max *= 2.0

        # reported at the overshooting end so that q'(0) * rho = c
        c = c_hi
        y_grid, q, q_prime, segments = self._profile(prob, c, y_max)
        solution = SemiWaveSolution(
            c=c,
            y_grid=y_grid,
            q=q,
            q_prime=q_prime,
            converged=c_hi - c_lo <= tol,
            tail_gap=abs(q[-1] - prob.carrying_capacity),
            ode_residual=0.0,
            y_max=float(y_grid[-1]),
            bracket_width=c_hi - c_lo,
            segments=segments,
        )
        residual = self.semiwave_residual(solution, prob)
        solution = solution.model_copy(update={"ode_residual": residual})
        self._logger.debug(
            "Semi-wave solved",
            extra={"problem": prob.model_dump(), "c": c, "residual": residual},
        )
        return solution

    def semiwave_residual(self, solution: SemiWaveSolution, prob: SemiWaveProblem) -> float:
        """sup |d q'' - c q' + q (a - b q)| along the profile.

        q'' comes from central differences of the dense output; the linear
        tail contributes its exact residual b (q - a/b)^2.
        """
        a, b, d, c = prob.a, prob.bcoef, prob.d, solution.c
        worst = 0.0
        tail_start = 0.0
        for offset, s_from, s_to, dense in solution.segments:
            lo, hi = min(s_from, s_to), max(s_from, s_to)
            step = 1e-4 * math.sqrt(d / a)
            if hi - lo <= 4.0 * step:
                continue
            s = np.linspace(lo + step, hi - step, RESIDUAL_SAMPLES)
            q, p = dense(s)
            p_slope = (dense(s + step)[1] - dense(s - step)[1]) / (2.0 * step)
            worst = max(worst, float(np.max(np.abs(d * p_slope - c * p + q * (a - b * q)))))
            tail_start = max(tail_start, offset + hi)
        tail = solution.q[solution.y_grid > tail_start]
        if tail.size:
            worst = max(worst, float(np.max(b * (tail - prob.carrying_capacity) ** 2)))
        return worst

    def speed_bracket(self, p: ModelParams, y_max: Optional[float] = None) -> Tuple[float, float]:
        """Speeds of the logistic semi-waves at rates lambda - b/m and lambda."""
        raise_for_status(
            not p.prey_survives,
            OutOfRegime,
            detail="prey survival requires m*lambda > b",
            inequality="m*lambda > b",
        )
        lower = self.solve_semi_wave(
            SemiWaveProblem(a=p.effective_prey_rate, bcoef=1.0, d=1.0, rho=p.rho), y_max
        )
        upper = self.solve_semi_wave(SemiWaveProblem(a=p.lam, bcoef=1.0, d=1.0, rho=p.rho), y_max)
        return lower.c, upper.c

    def asymptotics(self, prob: SemiWaveProblem, solution: SemiWaveSolution) -> SemiWaveAsymptotics:
        sqrt_ad = math.sqrt(prob.a * prob.d)
        return SemiWaveAsymptotics(
            rho=prob.rho,
            a=prob.a,
            b=prob.bcoef,
            d=prob.d,
            c=solution.c,
            c_over_2sqrtad=solution.c / (2.0 * sqrt_ad),
            small_rho_ratio=(solution.c / sqrt_ad) / prob.stefan_number,
        )

    def monotone_in_rho_and_a(
        self,
        base: SemiWaveProblem,
        rhos: Sequence[float],
        a_values: Sequence[float],
        tol: float = settings.DEFAULT_SEMIWAVE_TOL,
    ) -> MonotonicityReport:
        """Speed matrix over ascending rho (rows) and a (columns) grids."""
        for name, grid in (("rhos", rhos), ("a_values", a_values)):
            raise_for_status(
                len(grid) == 0 or any(x >= y for x, y in zip(grid, grid[1:])),
                DomainError,
                detail=f"{name} must be a non-empty ascending grid",
                field=name,
            )
        speeds = np.array(
            [
                [
                    self.solve_semi_wave(base.model_copy(update={"rho": r, "a": a}), tol=tol).c
                    for a in a_values
                ]
                for r in rhos
            ]
        )
        caps = np.array([2.0 * math.sqrt(a * base.d) for a in a_values])
        slack = 2.0 * tol
        report = MonotonicityReport(
            rhos=list(rhos),
            a_values=list(a_values),
            speeds=speeds.tolist(),
            increasing_in_rho=bool(np.all(np.diff(speeds, axis=0) > -slack)),
            increasing_in_a=bool(np.all(np.diff(speeds, axis=1) > -slack)),
            below_cap=bool(np.all(speeds < caps[np.newaxis, :])),
        )
        if not report.passed:
            raise PropertyViolation(
                detail="semi-wave speed is not increasing in rho and a below 2*sqrt(a*d)",
                check="semiwave_monotonicity",
            )
        return report


semiwave_service = SemiWaveService()
