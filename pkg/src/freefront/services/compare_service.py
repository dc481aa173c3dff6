# freefront/services/compare_service.py
"""
Comparison-principle harness.

Builds the decaying cosine upper solution for small habitats and checks
numerical solutions against it, and runs the logistic sandwich: the prey
between the logistic free-boundary runs at rates lambda - b/m and lambda,
the predator between logistic runs at rates mu and mu + c on the coupled
front history.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence

import numpy as np

from freefront.core.config import settings
from freefront.core.exception_utils import raise_for_status
from freefront.core.exceptions import (
    DomainError,
    OutOfRegime,
    PremiseViolated,
    PropertyViolation,
)
from freefront.schemas.compare_schema import (
    ComparisonReport,
    ExplicitUpperSolution,
    SandwichReport,
)
from freefront.schemas.model_schema import ModelParams
from freefront.schemas.solver_schema import (
    InitialData,
    SolverConfig,
    Trajectory,
    cosine_profile,
)
from freefront.services.pde_service import pde_service

logger = logging.getLogger(__name__)

DOMINATION_SAMPLES = 4001
IDENTITY_TOL = 1e-12


def _logistic_job(
    rate: float, rho: float, init: InitialData, cfg: SolverConfig, step_sizes: Sequence[float]
) -> Trajectory:
    return pde_service.simulate_logistic(rate, rho, init, cfg, step_sizes=step_sizes)


def _prescribed_job(
    rate: float, diffusivity: float, reference: Trajectory, w0: np.ndarray
) -> Trajectory:
    return pde_service.simulate_prescribed_boundary(rate, diffusivity, reference, w0)


def _on_grid(x: np.ndarray, h: float, values: np.ndarray) -> np.ndarray:
    """Profile stored on the xi-grid of front h, read at physical x, zero beyond h."""
    xi = np.linspace(0.0, 1.0, values.shape[0])
    return np.interp(x / h, xi, values, right=0.0)


class CompareService:
    """Orders numerical solutions against explicit and logistic comparison functions."""

    def __init__(self):
        self._logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def build_decaying_upper_solution(
        self, p: ModelParams, init: InitialData
    ) -> ExplicitUpperSolution:
        """C exp(-alpha t) cos(pi x / (2 sigma(t))) dominating the prey for h0 < (pi/2) lambda^(-1/2)."""
        h0, lam = init.h0, p.lam
        k2 = (0.5 * math.pi / h0) ** 2
        raise_for_status(
            lam * h0 * h0 >= (0.5 * math.pi) ** 2,
            PremiseViolated,
            detail=f"h0 = {h0:g} must lie below (pi/2)*lambda^(-1/2) = "
            f"{0.5 * math.pi / math.sqrt(lam):.6g}",
            premise="lambda < (pi/2)^2 h0^(-2)",
        )
        delta = math.sqrt(2.0 * k2 / (k2 + lam)) - 1.0
        alpha = 0.5 * (k2 - lam)
        gamma = alpha

        if init.family == "cosine":
            x = np.linspace(0.0, h0, DOMINATION_SAMPLES)
            u0 = cosine_profile(init.amp_u, x, h0)
        else:
            x = np.asarray(init.x)
            u0 = np.asarray(init.u0)
        shape = np.cos(0.5 * math.pi * x / (h0 * (1.0 + 0.5 * delta)))
        C = float(np.max(u0 / shape))
        rho0 = delta * gamma * h0 * h0 / (C * math.pi)

        gap = abs(k2 / (1.0 + delta) ** 2 - lam - alpha)
        raise_for_status(
            gap > IDENTITY_TOL * max(1.0, k2),
            PropertyViolation,
            detail=f"expansion identity off by {gap:.3e}",
            check="upper_solution_identity",
            margin=gap,
        )
        upper = ExplicitUpperSolution(
            C=C, delta=delta, gamma=gamma, alpha=alpha, rho0=rho0, h0=h0, lam=lam
        )
        self._logger.debug("Upper solution built", extra=upper.model_dump())
        return upper

    def _report(
        self,
        check: str,
        margins: np.ndarray,
        times: np.ndarray,
        xs: np.ndarray,
        tol: float,
        details: Optional[Dict[str, float]] = None,
    ) -> ComparisonReport:
        idx = int(np.argmax(margins))
        worst = float(margins[idx])
        return ComparisonReport(
            check=check,
            worst_margin=worst,
            location={"t": float(times[idx]), "x": float(xs[idx])},
            passed=worst <= tol,
            tol=tol,
            details=details or {},
        )

    def _enforce(self, reports: List[ComparisonReport], strict: bool) -> None:
        for report in reports:
            if report.passed:
                continue
            self._logger.warning(
                "Ordering violated",
                extra={
                    "check": report.check,
                    "margin": report.worst_margin,
                    "location": report.location,
                },
            )
            if strict:
                raise PropertyViolation(
                    detail=f"{report.check} ordering violated by {report.worst_margin:.3e} "
                    f"(tol {report.tol:g})",
                    check=report.check,
                    location=report.location,
                    margin=report.worst_margin,
                )

    def verify_upper_ordering(
        self,
        traj: Trajectory,
        upper: ExplicitUpperSolution,
        tol: float = settings.DEFAULT_ORDERING_TOL,
        strict: bool = True,
    ) -> SandwichReport:
        """u <= w and h <= sigma on every snapshot, relative to C and sigma."""
        raise_for_status(
            traj.params.rho > upper.rho0,
            PremiseViolated,
            detail=f"rho = {traj.params.rho:g} exceeds rho0 = {upper.rho0:.6g}",
            premise="rho <= rho0",
        )
        raise_for_status(
            abs(float(traj.fronts[0]) - upper.h0) > 1e-12 * upper.h0,
            DomainError,
            detail="trajectory and upper solution start from different h0",
            field="h0",
        )
        times, xs, margins = [], [], []
        for snap in traj.snapshots:
            x = snap.x
            gap = (snap.u - upper.w(snap.t, x)) / upper.C
            j = int(np.argmax(gap))
            times.append(snap.t)
            xs.append(x[j])
            margins.append(gap[j])
        density = self._report("u_below_w", np.asarray(margins), np.asarray(times), np.asarray(xs), tol)

        sigma = np.array([upper.sigma(t) for t in traj.times])
        front_gap = (traj.fronts - sigma) / sigma
        front = self._report(
            "h_below_sigma",
            front_gap,
            traj.times,
            traj.fronts,
            tol,
            details={"sigma_limit": upper.sigma_limit, "h_end": traj.h_end},
        )
        reports = [density, front]
        self._enforce(reports, strict)
        return SandwichReport(checks=reports)

    def verify_logistic_sandwich(
        self,
        p: ModelParams,
        init: InitialData,
        cfg: SolverConfig,
        tol: float = settings.DEFAULT_ORDERING_TOL,
        strict: bool = True,
        workers: int = 1,
    ) -> SandwichReport:
        """Coupled run against four logistic comparison runs on the same time levels."""
        raise_for_status(
            not p.prey_survives,
            OutOfRegime,
            detail="the lower prey comparison needs m*lambda > b",
            inequality="m*lambda > b",
        )
        coupled = pde_service.simulate(p, init, cfg)
        w0 = coupled.snapshots[0].v
        jobs = [
            (_logistic_job, (p.effective_prey_rate, p.rho, init, cfg, coupled.step_sizes)),
            (_logistic_job, (p.lam, p.rho, init, cfg, coupled.step_sizes)),
            (_prescribed_job, (p.mu, p.d, coupled, w0)),
            (_prescribed_job, (p.mu + p.c, p.d, coupled, w0)),
        ]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
                futures = [pool.submit(fn, *args) for fn, args in jobs]
                u_lower, u_upper, v_lower, v_upper = [f.result() for f in futures]
        else:
            u_lower, u_upper, v_lower, v_upper = [fn(*args) for fn, args in jobs]

        reports = self.sandwich_reports(coupled, u_lower, u_upper, v_lower, v_upper, tol)
        self._enforce(reports, strict)
        return SandwichReport(checks=reports)

    def sandwich_reports(
        self,
        coupled: Trajectory,
        u_lower: Trajectory,
        u_upper: Trajectory,
        v_lower: Trajectory,
        v_upper: Trajectory,
        tol: float,
    ) -> List[ComparisonReport]:
        """Pointwise orderings on matched time levels, relative to the largest density seen.

        Margins skip t = 0, where every run holds the coupled initial data,
        and the coupled front node, where u and v are pinned to zero. A
        negative worst margin means strict ordering.
        """
        for other in (u_lower, u_upper, v_lower, v_upper):
            raise_for_status(
                other.times.shape != coupled.times.shape
                or len(other.snapshots) != len(coupled.snapshots),
                DomainError,
                detail="comparison runs must share the coupled time levels",
            )
        raise_for_status(
            len(coupled.snapshots) < 2,
            DomainError,
            detail="orderings need at least one snapshot after t = 0",
        )
        u_scale = max(float(coupled.sup_u.max()), float(u_upper.sup_u.max()))
        v_scale = max(float(coupled.sup_v.max()), float(v_upper.sup_v.max()))

        rows: Dict[str, List[tuple]] = {k: [] for k in ("u_lower", "u_upper", "v_lower", "v_upper")}
        for snap, lo, hi, vlo, vhi in zip(
            coupled.snapshots[1:], u_lower.snapshots[1:], u_upper.snapshots[1:],
            v_lower.snapshots[1:], v_upper.snapshots[1:],
        ):
            x = snap.x[:-1]
            u, v = snap.u[:-1], snap.v[:-1]
            for name, gap in (
                ("u_lower", (_on_grid(x, lo.h, lo.u) - u) / u_scale),
                ("u_upper", (u - _on_grid(x, hi.h, hi.u)) / u_scale),
                ("v_lower", (vlo.v[:-1] - v) / v_scale),
                ("v_upper", (v - vhi.v[:-1]) / v_scale),
            ):
                j = int(np.argmax(gap))
                rows[name].append((snap.t, x[j], gap[j]))

        reports = []
        for name, entries in rows.items():
            t, x, gap = (np.asarray(col) for col in zip(*entries))
            reports.append(self._report(name, gap, t, x, tol))

        h, times = coupled.fronts[1:], coupled.times[1:]
        h_lo, h_hi = u_lower.fronts[1:], u_upper.fronts[1:]
        reports.append(self._report("h_lower", (h_lo - h) / h, times, h_lo, tol))
        reports.append(self._report("h_upper", (h - h_hi) / h, times, h, tol))
        return reports


compare_service = CompareService()
