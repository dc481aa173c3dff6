# freefront/services/pde_service.py
"""
Free-boundary stepper.

The moving habitat [0, h(t)] is mapped onto xi in [0, 1] (front fixing).
Each step advances h by forward Euler on the Stefan condition, treats
diffusion implicitly (one tridiagonal solve per species) and advection plus
reaction explicitly at the old level.

Three entry points share the same advect/diffuse kernel:
``simulate`` (coupled system), ``simulate_logistic`` (prey alone, its own
free boundary) and ``simulate_prescribed_boundary`` (one logistic species on
the front history of a recorded run).
"""
import logging
import math
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from freefront.core.config import settings
from freefront.core.exception_utils import raise_for_status
from freefront.core.exceptions import (
    DomainError,
    NumericalBlowup,
    PropertyViolation,
    SimulationError,
    StefanViolation,
)
from freefront.schemas.model_schema import ModelParams
from freefront.schemas.solver_schema import (
    InitialData,
    ProfileSnapshot,
    SimulationState,
    SolverConfig,
    Trajectory,
    cosine_profile,
)
from freefront.services.model_service import model_service
from freefront.utils.numerics import dirichlet_gradient, solve_tridiagonal

logger = logging.getLogger(__name__)

Monitor = Callable[[SimulationState], Optional[str]]
Advance = Callable[[SimulationState, float], SimulationState]

BOUND_SLACK = 1e-6


def logistic_reaction(W: np.ndarray, rate: float) -> np.ndarray:
    return rate * W - W * W


def advance_species(
    W: np.ndarray,
    xi: np.ndarray,
    d_xi: float,
    h_old: float,
    h_new: float,
    h_prime: float,
    dt: float,
    diffusivity: float,
    reaction: np.ndarray,
) -> np.ndarray:
    """One IMEX step of W_t = D W_xixi / h^2 + xi (h'/h) W_xi + reaction.

    Row 0 carries the reflected ghost node (W_xi = 0 at xi = 0); the last
    node stays pinned at zero.
    """
    advection = np.zeros_like(W)
    advection[1:-1] = xi[1:-1] * (h_prime / h_old) * (W[2:] - W[:-2]) / (2.0 * d_xi)
    rhs = W[:-1] + dt * (advection[:-1] + reaction[:-1])

    k = diffusivity * dt / (h_new * h_new * d_xi * d_xi)
    n = rhs.shape[0]
    diag = np.full(n, 1.0 + 2.0 * k)
    lower = np.full(n, -k)
    upper = np.full(n, -k)
    upper[0] = -2.0 * k

    W_new = np.empty_like(W)
    W_new[:-1] = solve_tridiagonal(lower, diag, upper, rhs)
    W_new[-1] = 0.0
    return W_new


class PdeService:
    """Time integration of the free-boundary problems."""

    def __init__(self):
        self._logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    # ---- initial data ----
    def initial_cosine_profile(
        self, h0: float, amp_u: float, amp_v: float, n_grid: int
    ) -> InitialData:
        """Cosine bumps amp * cos(pi x / (2 h0)), sampled on n_grid + 2 nodes for export."""
        for name, value in (("h0", h0), ("amp_u", amp_u), ("amp_v", amp_v)):
            raise_for_status(
                value <= 0, DomainError, detail=f"{name} must be positive", field=name, value=value
            )
        x = np.linspace(0.0, h0, n_grid + 2)
        return InitialData(
            h0=h0,
            family="cosine",
            amp_u=amp_u,
            amp_v=amp_v,
            x=x.tolist(),
            u0=cosine_profile(amp_u, x, h0).tolist(),
            v0=cosine_profile(amp_v, x, h0).tolist(),
        )

    def resample(self, init: InitialData, cfg: SolverConfig) -> tuple[np.ndarray, np.ndarray]:
        """Initial profiles on the xi-grid; array data goes through a monotone cubic."""
        x = cfg.xi * init.h0
        if init.family == "cosine":
            U = cosine_profile(init.amp_u, x, init.h0)
            V = cosine_profile(init.amp_v, x, init.h0)
        else:
            U = PchipInterpolator(init.x, init.u0)(x)
            V = PchipInterpolator(init.x, init.v0)(x)
            U[0], V[0] = init.u0[0], init.v0[0]
        U[-1] = 0.0
        V[-1] = 0.0
        return np.maximum(U, 0.0), np.maximum(V, 0.0)

    def front_gradient(self, state: SimulationState) -> float:
        """u_x(t, h(t)) from the one-sided three-point difference; NaN passes through."""
        d_xi = 1.0 / (state.U.shape[0] - 1)
        return dirichlet_gradient(state.U, d_xi) / state.h

    def k_bound(self, p: ModelParams, U0: np.ndarray, V0: np.ndarray) -> float:
        """Density ceiling K = max(sup u0, sup v0, lambda, mu + c)."""
        return float(max(U0.max(), V0.max(), p.lam, p.mu + p.c))

    def speed_bound(self, k_bound: float, U0: np.ndarray, h0: float) -> float:
        """K' = max(K, |u0'(h0)|); the front speed is compared against rho K'."""
        d_xi = 1.0 / (U0.shape[0] - 1)
        return float(max(k_bound, abs(dirichlet_gradient(U0, d_xi) / h0)))

    # ---- one step ----
    def _choose_dt(self, state: SimulationState, cfg: SolverConfig) -> float:
        if cfg.dt is not None:
            return cfg.dt
        if state.h_prime > 0:
            return min(cfg.dt_max, cfg.cfl * cfg.d_xi * state.h / state.h_prime)
        return cfg.dt_max

    def _stefan_speed(self, U: np.ndarray, h: float, rho: float, t: float) -> float:
        d_xi = 1.0 / (U.shape[0] - 1)
        h_prime = -rho * dirichlet_gradient(U, d_xi) / h
        if not math.isfinite(h_prime):
            raise NumericalBlowup(detail="front gradient is not finite", t=t, j=U.shape[0] - 1)
        if h_prime < 0 or (h_prime == 0 and U.max() > settings.EXTINCTION_FLOOR):
            raise StefanViolation(
                detail=f"front speed {h_prime:.3e} is not positive", t=t, h_prime=h_prime
            )
        return h_prime

    def _finish(
        self, W: np.ndarray, t: float, clamp: bool
    ) -> tuple[np.ndarray, int]:
        bad = ~np.isfinite(W)
        if bad.any():
            raise NumericalBlowup(detail="non-finite density", t=t, j=int(np.argmax(bad)))
        if not clamp:
            return W, 0
        clamped = int(np.count_nonzero(W < 0))
        if clamped:
            W = np.maximum(W, 0.0)
        return W, clamped

    def step(
        self,
        state: SimulationState,
        p: ModelParams,
        cfg: SolverConfig,
        dt: Optional[float] = None,
    ) -> SimulationState:
        """Advance the coupled system by one step (adaptive dt unless given)."""
        dt = dt if dt is not None else self._choose_dt(state, cfg)
        xi, d_xi = cfg.xi, cfg.d_xi
        U, V = state.U, state.V
        h_new = state.h + dt * state.h_prime
        t_new = state.t + dt

        flux = model_service.response(np.maximum(U, 0.0), np.maximum(V, 0.0), p.m)
        reaction_u = logistic_reaction(U, p.lam) - p.b * flux
        reaction_v = logistic_reaction(V, p.mu) + p.c * flux

        U_new = advance_species(U, xi, d_xi, state.h, h_new, state.h_prime, dt, 1.0, reaction_u)
        V_new = advance_species(V, xi, d_xi, state.h, h_new, state.h_prime, dt, p.d, reaction_v)
        U_new, neg_u = self._finish(U_new, t_new, cfg.clamp_negatives)
        V_new, neg_v = self._finish(V_new, t_new, cfg.clamp_negatives)

        return SimulationState(
            t=t_new,
            h=h_new,
            U=U_new,
            V=V_new,
            h_prime=self._stefan_speed(U_new, h_new, p.rho, t_new),
            step_index=state.step_index + 1,
            clamp_count=state.clamp_count + neg_u + neg_v,
        )

    def _step_prey_only(
        self, state: SimulationState, rate: float, rho: float, cfg: SolverConfig, dt: float
    ) -> SimulationState:
        h_new = state.h + dt * state.h_prime
        t_new = state.t + dt
        W_new = advance_species(
            state.U, cfg.xi, cfg.d_xi, state.h, h_new, state.h_prime, dt, 1.0,
            logistic_reaction(state.U, rate),
        )
        W_new, negatives = self._finish(W_new, t_new, cfg.clamp_negatives)
        return SimulationState(
            t=t_new,
            h=h_new,
            U=W_new,
            V=state.V,
            h_prime=self._stefan_speed(W_new, h_new, rho, t_new),
            step_index=state.step_index + 1,
            clamp_count=state.clamp_count + negatives,
        )

    # ---- runs ----
    def _march(
        self,
        state: SimulationState,
        advance: Advance,
        params: ModelParams,
        cfg: SolverConfig,
        init: Optional[InitialData],
        k_bound: float,
        species: int,
        monitor: Optional[Monitor] = None,
        step_sizes: Optional[Sequence[float]] = None,
        speed_cap: float = math.inf,
    ) -> Trajectory:
        times: List[float] = []
        fronts: List[float] = []
        speeds: List[float] = []
        gradients: List[float] = []
        sup_u: List[float] = []
        sup_v: List[float] = []
        dts: List[float] = []
        snapshots: List[ProfileSnapshot] = []
        bound_warnings = 0
        stop_reason: Optional[str] = None
        ceiling = k_bound * (1.0 + BOUND_SLACK) + BOUND_SLACK

        def record(s: SimulationState) -> None:
            times.append(s.t)
            fronts.append(s.h)
            speeds.append(s.h_prime)
            gradients.append(self.front_gradient(s))
            sup_u.append(float(s.U.max()))
            sup_v.append(float(s.V.max()))

        def snapshot(s: SimulationState) -> None:
            snapshots.append(ProfileSnapshot(t=s.t, h=s.h, u=s.U.copy(), v=s.V.copy()))

        def build(failed: bool) -> Trajectory:
            return Trajectory(
                times=np.asarray(times),
                fronts=np.asarray(fronts),
                front_speeds=np.asarray(speeds),
                front_gradients=np.asarray(gradients),
                sup_u=np.asarray(sup_u),
                sup_v=np.asarray(sup_v),
                step_sizes=np.asarray(dts),
                snapshots=snapshots,
                params=params,
                config=cfg,
                init=init,
                k_bound=k_bound,
                clamp_count=state.clamp_count,
                bound_warnings=bound_warnings,
                stop_reason=stop_reason,
                failed=failed,
            )

        record(state)
        snapshot(state)
        scheduled = iter(step_sizes) if step_sizes is not None else None
        try:
            while True:
                if scheduled is not None:
                    dt = next(scheduled, None)
                    if dt is None:
                        break
                else:
                    remaining = cfg.t_max - state.t
                    if remaining <= 1e-12 * cfg.t_max:
                        break
                    dt = min(self._choose_dt(state, cfg), remaining)

                state = advance(state, dt)
                dts.append(dt)
                record(state)

                if sup_u[-1] > ceiling or sup_v[-1] > ceiling:
                    raise PropertyViolation(
                        detail=f"density exceeds the bound K = {k_bound:.6g}",
                        check="density_bound",
                        location={"t": state.t},
                        margin=max(sup_u[-1], sup_v[-1]) - k_bound,
                    )
                if state.h_prime > speed_cap:
                    bound_warnings += 1
                    if bound_warnings == 1:
                        self._logger.warning(
                            "Front speed above rho*K",
                            extra={"t": state.t, "h_prime": state.h_prime, "rho_k": speed_cap},
                        )
                if state.step_index % cfg.snapshot_every == 0:
                    snapshot(state)
                if monitor is not None:
                    stop_reason = monitor(state)
                    if stop_reason:
                        break
        except SimulationError as exc:
            if snapshots[-1].t != state.t:
                snapshot(state)
            exc.trajectory = build(failed=True)
            self._logger.error(
                "Run failed",
                extra={"error": exc.detail, "t": state.t, "h": state.h},
            )
            raise

        if snapshots[-1].t != state.t:
            snapshot(state)

        grid_steps = max(1, len(dts)) * species * cfg.n_grid
        if state.clamp_count > settings.CLAMP_FAILURE_FRACTION * grid_steps:
            exc = NumericalBlowup(
                detail=f"{state.clamp_count} negative values clamped over {len(dts)} steps",
                t=state.t,
            )
            exc.trajectory = build(failed=True)
            raise exc

        trajectory = build(failed=False)
        self._logger.info(
            "Run finished",
            extra={
                "steps": len(dts),
                "t_end": trajectory.t_end,
                "h_end": trajectory.h_end,
                "stop_reason": stop_reason,
            },
        )
        return trajectory

    def _start(
        self, U0: np.ndarray, V0: np.ndarray, h0: float, rho: float
    ) -> SimulationState:
        raise_for_status(
            U0[:-1].min() <= 0, DomainError, detail="initial prey must be positive on [0, h0)"
        )
        return SimulationState(
            t=0.0, h=h0, U=U0, V=V0, h_prime=self._stefan_speed(U0, h0, rho, 0.0)
        )

    def simulate(
        self,
        p: ModelParams,
        init: InitialData,
        cfg: SolverConfig,
        monitor: Optional[Monitor] = None,
        step_sizes: Optional[Sequence[float]] = None,
    ) -> Trajectory:
        """Integrate the coupled system to t_max, or until ``monitor`` returns a reason.

        ``step_sizes`` replays a fixed sequence of steps (used to put
        comparison runs on the same time levels).
        """
        U0, V0 = self.resample(init, cfg)
        state = self._start(U0, V0, init.h0, p.rho)
        k_bound = self.k_bound(p, U0, V0)
        speed_cap = p.rho * self.speed_bound(k_bound, U0, init.h0)
        self._logger.info(
            "Starting coupled run",
            extra={
                "params": p.model_dump(),
                "h0": init.h0,
                "n_grid": cfg.n_grid,
                "K": k_bound,
                "rho_k": speed_cap,
            },
        )
        return self._march(
            state,
            lambda s, dt: self.step(s, p, cfg, dt),
            p,
            cfg,
            init,
            k_bound,
            species=2,
            monitor=monitor,
            step_sizes=step_sizes,
            speed_cap=speed_cap,
        )

    def simulate_logistic(
        self,
        rate: float,
        rho: float,
        init: InitialData,
        cfg: SolverConfig,
        step_sizes: Optional[Sequence[float]] = None,
    ) -> Trajectory:
        """Prey alone: w_t - w_xx = w(rate - w) with its own Stefan front.

        The predator slot of the trajectory stays identically zero.
        """
        raise_for_status(rate <= 0, DomainError, detail="rate must be positive", field="rate")
        params = ModelParams(lam=rate, mu=rate, b=0.0, c=0.0, d=1.0, m=1.0, rho=rho)
        U0, _ = self.resample(init, cfg)
        V0 = np.zeros_like(U0)
        state = self._start(U0, V0, init.h0, rho)
        k_bound = self.k_bound(params, U0, V0)
        return self._march(
            state,
            lambda s, dt: self._step_prey_only(s, rate, rho, cfg, dt),
            params,
            cfg,
            init,
            k_bound,
            species=1,
            step_sizes=step_sizes,
            speed_cap=rho * self.speed_bound(k_bound, U0, init.h0),
        )

    def simulate_prescribed_boundary(
        self,
        rate: float,
        diffusivity: float,
        reference: Trajectory,
        w0: np.ndarray,
    ) -> Trajectory:
        """Logistic w_t - D w_xx = w(rate - w) on the front history of ``reference``.

        The species lives in the predator slot; the prey slot stays zero.
        Time levels, fronts and front speeds are those recorded in
        ``reference``.
        """
        raise_for_status(rate <= 0, DomainError, detail="rate must be positive", field="rate")
        raise_for_status(
            diffusivity <= 0, DomainError, detail="diffusivity must be positive", field="diffusivity"
        )
        cfg = reference.config
        raise_for_status(
            w0.shape[0] != cfg.n_grid + 2,
            DomainError,
            detail="w0 must live on the reference xi-grid",
            field="w0",
        )
        params = ModelParams(
            lam=reference.params.lam, mu=rate, b=0.0, c=0.0, d=diffusivity, m=1.0,
            rho=reference.params.rho,
        )
        fronts = reference.fronts
        speeds = reference.front_speeds
        W0 = np.maximum(np.asarray(w0, dtype=float), 0.0)
        W0[-1] = 0.0

        def advance(s: SimulationState, dt: float) -> SimulationState:
            n = s.step_index
            t_new = s.t + dt
            W_new = advance_species(
                s.V, cfg.xi, cfg.d_xi, fronts[n], fronts[n + 1], speeds[n], dt, diffusivity,
                logistic_reaction(s.V, rate),
            )
            W_new, negatives = self._finish(W_new, t_new, cfg.clamp_negatives)
            return SimulationState(
                t=t_new,
                h=float(fronts[n + 1]),
                U=s.U,
                V=W_new,
                h_prime=float(speeds[n + 1]),
                step_index=n + 1,
                clamp_count=s.clamp_count + negatives,
            )

        state = SimulationState(
            t=float(reference.times[0]),
            h=float(fronts[0]),
            U=np.zeros_like(W0),
            V=W0,
            h_prime=float(speeds[0]),
        )
        k_bound = float(max(W0.max(), rate))
        return self._march(
            state,
            advance,
            params,
            cfg,
            None,
            k_bound,
            species=1,
            step_sizes=reference.step_sizes,
        )


pde_service = PdeService()
