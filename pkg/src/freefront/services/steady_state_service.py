# freefront/services/steady_state_service.py
"""
Stationary logistic profiles: -d V'' = V (rate - V) on (0, l), V'(0) = 0, V(l) = 0.
"""
import itertools
import logging
import math
from typing import Optional

import numpy as np

from freefront.core.config import settings
from freefront.core.exception_utils import raise_for_status
from freefront.core.exceptions import DomainError, SolverFailure
from freefront.schemas.steady_schema import SteadyProfile, UniquenessReport
from freefront.utils.numerics import solve_tridiagonal

logger = logging.getLogger(__name__)

MAX_NEWTON_STEPS = 100


def _residual(V: np.ndarray, d: float, rate: float, dx: float) -> np.ndarray:
    """Discrete operator on the unknowns V_0..V_{N-1}; V_N = 0 and V_{-1} = V_1."""
    padded = np.concatenate((V[1:2], V, [0.0]))
    laplacian = (padded[2:] - 2.0 * padded[1:-1] + padded[:-2]) / (dx * dx)
    return d * laplacian + V * (rate - V)


class SteadyStateService:
    """Damped Newton for the Neumann/Dirichlet logistic boundary value problem."""

    def __init__(self):
        self._logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def is_positive_branch(self, d: float, rate: float, l: float) -> bool:
        """l > (pi/2) sqrt(d/rate), compared squared so the boundary case is exact."""
        return l * l > (0.5 * math.pi) ** 2 * d / rate

    def _newton(
        self,
        V: np.ndarray,
        d: float,
        rate: float,
        dx: float,
        tol: float,
    ) -> tuple[np.ndarray, float, int]:
        F = _residual(V, d, rate, dx)
        norm = float(np.max(np.abs(F)))
        n = V.shape[0]
        off = d / (dx * dx)
        steps = 0
        while norm > tol:
            raise_for_status(
                steps >= MAX_NEWTON_STEPS,
                SolverFailure,
                detail=f"Newton did not reach {tol:.1e} in {MAX_NEWTON_STEPS} steps",
                residual=norm,
            )
            diag = -2.0 * off + rate - 2.0 * V
            lower = np.full(n, off)
            upper = np.full(n, off)
            upper[0] = 2.0 * off
            delta = solve_tridiagonal(lower, diag, upper, -F)

            damping = 1.0
            for _ in range(settings.BVP_STAGNATION_STEPS):
                trial = V + damping * delta
                F_trial = _residual(trial, d, rate, dx)
                trial_norm = float(np.max(np.abs(F_trial)))
                if trial_norm < norm:
                    break
                damping *= 0.5
            else:
                raise SolverFailure(
                    detail="Newton stagnated: no residual decrease over "
                    f"{settings.BVP_STAGNATION_STEPS} damped steps",
                    residual=norm,
                )
            V, F, norm = trial, F_trial, trial_norm
            steps += 1
        return V, norm, steps

    def solve_logistic_bvp(
        self,
        d: float,
        rate: float,
        l: float,
        n_grid: int = settings.DEFAULT_BVP_GRID,
        tol: float = settings.DEFAULT_BVP_TOL,
        guess: Optional[np.ndarray] = None,
    ) -> SteadyProfile:
        """Unique positive solution when l exceeds (pi/2) sqrt(d/rate), else the zero profile.

        Newton starts from 0.9 * rate * cos(pi x / (2 l)) unless ``guess``
        (values on the n_grid + 1 nodes) is supplied.
        """
        for name, value in (("d", d), ("rate", rate), ("l", l)):
            raise_for_status(
                value <= 0, DomainError, detail=f"{name} must be positive", field=name, value=value
            )
        raise_for_status(n_grid < 4, DomainError, detail="n_grid must be at least 4", field="n_grid")

        grid = np.linspace(0.0, l, n_grid + 1)
        if not self.is_positive_branch(d, rate, l):
            self._logger.debug(
                "Below the persistence threshold, zero profile returned",
                extra={"d": d, "rate": rate, "l": l},
            )
            return SteadyProfile(l=l, grid=grid, values=np.zeros_like(grid), positive=False)

        dx = l / n_grid
        # rounding in the second difference sets a floor on the reachable residual
        floor = 64.0 * np.finfo(float).eps * d * rate / (dx * dx)
        target = max(tol, floor)
        if target > tol:
            self._logger.info(
                "Residual target raised to the rounding floor",
                extra={"tol": tol, "floor": floor},
            )

        start = guess if guess is not None else 0.9 * rate * np.cos(0.5 * math.pi * grid / l)
        V, residual, steps = self._newton(np.array(start[:-1], dtype=float), d, rate, dx, target)
        raise_for_status(
            bool(np.min(V) <= 0),
            SolverFailure,
            detail="Newton converged to a non-positive profile",
            residual=residual,
        )
        values = np.append(V, 0.0)
        self._logger.debug(
            "Positive steady profile computed",
            extra={"l": l, "V0": float(values[0]), "residual": residual, "steps": steps},
        )
        return SteadyProfile(
            l=l, grid=grid, values=values, positive=True, residual=residual, newton_steps=steps
        )

    def residual_logistic(self, profile: SteadyProfile, d: float, rate: float) -> float:
        """max over interior nodes of |d V'' + V (rate - V)|."""
        V = profile.values
        if V.shape[0] < 3:
            return 0.0
        dx = profile.dx
        interior = d * (V[2:] - 2.0 * V[1:-1] + V[:-2]) / (dx * dx) + V[1:-1] * (rate - V[1:-1])
        return float(np.max(np.abs(interior)))

    def check_uniqueness(
        self,
        d: float,
        rate: float,
        l: float,
        n_grid: int = settings.DEFAULT_BVP_GRID,
        starts: int = 10,
        seed: int = 0,
        tol: float = 1e-6,
    ) -> UniquenessReport:
        """Restart Newton from random positive guesses; distinct limits would break uniqueness."""
        raise_for_status(
            not self.is_positive_branch(d, rate, l),
            DomainError,
            detail="uniqueness is only checked on the positive branch",
            field="l",
            value=l,
        )
        rng = np.random.default_rng(seed)
        grid = np.linspace(0.0, l, n_grid + 1)
        shape = np.cos(0.5 * math.pi * grid / l)
        profiles = []
        for _ in range(starts):
            # guesses start above the positive profile
            amplitude = rate * rng.uniform(1.0, 2.0)
            wiggle = 1.0 + 0.2 * rng.uniform(-1.0, 1.0, size=grid.shape[0])
            guess = amplitude * shape * wiggle
            try:
                profiles.append(self.solve_logistic_bvp(d, rate, l, n_grid, guess=guess).values)
            except SolverFailure as exc:
                self._logger.warning(
                    "Newton restart failed", extra={"residual": exc.context.get("residual")}
                )

        distance = max(
            (float(np.max(np.abs(a - b))) for a, b in itertools.combinations(profiles, 2)),
            default=0.0,
        )
        return UniquenessReport(
            starts=starts, converged=len(profiles), max_distance=distance, tol=tol
        )


steady_state_service = SteadyStateService()
