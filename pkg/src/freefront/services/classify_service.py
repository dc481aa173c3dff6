# freefront/services/classify_service.py
"""
Verdicts on trajectories.

A front that passes the spreading barrier never stops, so crossing it is
conclusive. Vanishing needs both a stalled front and a collapsed prey held
over a sustained window.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from freefront.core.config import settings
from freefront.core.exception_utils import raise_for_status
from freefront.core.exceptions import (
    BracketError,
    DomainError,
    EstimateUnavailable,
    NonMonotoneVerdicts,
    OutOfRegime,
)
from freefront.schemas.classify_schema import (
    ClassificationRules,
    Evidence,
    MovingFrameSeries,
    Outcome,
    PredatorLimitReport,
    ThresholdEstimate,
    Verdict,
)
from freefront.schemas.model_schema import ModelParams
from freefront.schemas.solver_schema import (
    InitialData,
    SimulationState,
    SolverConfig,
    Trajectory,
)
from freefront.services.model_service import model_service
from freefront.services.pde_service import pde_service
from freefront.services.steady_state_service import steady_state_service
from freefront.utils.numerics import least_squares_slope

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ResolvedRules:
    barrier: float
    spread_level: float
    tol_h: float
    tol_u: float
    window: float


def resolve_rules(
    p: ModelParams, rules: ClassificationRules, t_max: float, h0: float
) -> ResolvedRules:
    """Fill in the defaults tol_h = 1e-6*Lambda/tMax and tol_u = 1e-4*lambda."""
    barrier = model_service.spreading_barrier(p).Lambda if p.prey_survives else math.inf
    scale = barrier if math.isfinite(barrier) else h0
    return ResolvedRules(
        barrier=barrier,
        spread_level=barrier * (1.0 + rules.margin_lambda),
        tol_h=rules.tol_h if rules.tol_h is not None else 1e-6 * scale / t_max,
        tol_u=rules.tol_u if rules.tol_u is not None else 1e-4 * p.lam,
        window=rules.window_fraction * t_max,
    )


class VerdictMonitor:
    """Early-stop callback for ``simulate``: returns a reason once a verdict is certain."""

    def __init__(
        self,
        p: ModelParams,
        rules: ClassificationRules,
        t_max: float,
        h0: float,
        stop_on_spreading: bool = True,
    ):
        self.resolved = resolve_rules(p, rules, t_max, h0)
        self.stop_on_spreading = stop_on_spreading
        self.started_beyond = h0 >= self.resolved.barrier
        self._stalled_since: Optional[float] = None

    def __call__(self, state: SimulationState) -> Optional[str]:
        r = self.resolved
        if self.stop_on_spreading and (self.started_beyond or state.h > r.spread_level):
            return Verdict.SPREADING.value
        if state.h_prime < r.tol_h and float(state.U.max()) < r.tol_u:
            if self._stalled_since is None:
                self._stalled_since = state.t
            elif state.t - self._stalled_since >= r.window:
                return Verdict.VANISHING.value
        else:
            self._stalled_since = None
        return None


def _stalled_stretch(
    times: np.ndarray, stalled: np.ndarray, window: float
) -> Tuple[Optional[float], float]:
    """First time a stalled stretch lasts ``window``, and the longest stretch seen."""
    start: Optional[float] = None
    longest = 0.0
    for t, flag in zip(times, stalled):
        if not flag:
            start = None
            continue
        if start is None:
            start = t
        longest = max(longest, t - start)
        if t - start >= window:
            return float(t), longest
    return None, longest


def run_and_classify(
    p: ModelParams,
    init: InitialData,
    cfg: SolverConfig,
    rules: ClassificationRules,
    stop_on_spreading: bool = True,
) -> Tuple[Outcome, Trajectory]:
    """Simulate with a verdict monitor installed and classify the result."""
    monitor = VerdictMonitor(p, rules, cfg.t_max, init.h0, stop_on_spreading)
    traj = pde_service.simulate(p, init, cfg, monitor=monitor)
    return classify_service.classify_run(traj, p, rules), traj


class ClassifyService:
    """Spreading/vanishing verdicts, threshold brackets and speed estimates."""

    def __init__(self):
        self._logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def classify_run(
        self,
        traj: Trajectory,
        p: ModelParams,
        rules: Optional[ClassificationRules] = None,
    ) -> Outcome:
        rules = rules or ClassificationRules()
        r = resolve_rules(p, rules, traj.config.t_max, float(traj.fronts[0]))

        if traj.fronts[0] >= r.barrier:
            return self._spreading(
                traj, p, Evidence(rule="initial_crossing", t=0.0, detail="h0 >= Lambda")
            )
        crossed = np.nonzero(traj.fronts > r.spread_level)[0]
        if crossed.size:
            t = float(traj.times[crossed[0]])
            return self._spreading(
                traj,
                p,
                Evidence(
                    rule="barrier_crossing",
                    t=t,
                    detail=f"h > Lambda*(1+{rules.margin_lambda:g}) = {r.spread_level:.6g}",
                ),
            )

        stalled = (traj.front_speeds < r.tol_h) & (traj.sup_u < r.tol_u)
        confirmed, longest = _stalled_stretch(traj.times, stalled, r.window)
        if confirmed is not None:
            h_inf = traj.h_end
            if h_inf > r.barrier * (1.0 + rules.grid_tol):
                self._logger.warning(
                    "Vanishing run ended above the barrier",
                    extra={"h_inf": h_inf, "Lambda": r.barrier},
                )
                return Outcome(
                    verdict=Verdict.UNDETERMINED,
                    evidence=Evidence(
                        rule="dichotomy_audit",
                        t=confirmed,
                        detail=f"stalled front at {h_inf:.6g} exceeds Lambda + gridTol",
                    ),
                )
            return Outcome(
                verdict=Verdict.VANISHING,
                h_inf_estimate=h_inf,
                evidence=Evidence(
                    rule="stalled_front_and_prey",
                    t=confirmed,
                    detail=f"h' < {r.tol_h:.3e} and sup u < {r.tol_u:.3e} for {r.window:g}",
                ),
            )

        front_ratio = float(traj.fronts.max() / r.spread_level) if math.isfinite(r.barrier) else 0.0
        stall_ratio = longest / r.window if r.window > 0 else 0.0
        closest = "barrier_crossing" if front_ratio >= stall_ratio else "stalled_front_and_prey"
        return Outcome(
            verdict=Verdict.UNDETERMINED,
            evidence=Evidence(
                rule=closest,
                t=traj.t_end,
                detail=f"max h reached {front_ratio:.3f} of the spreading level; "
                f"longest stall covered {stall_ratio:.3f} of the window",
            ),
        )

    def _spreading(self, traj: Trajectory, p: ModelParams, evidence: Evidence) -> Outcome:
        try:
            speed: Optional[float] = self.estimate_speed(traj)
        except EstimateUnavailable:
            speed = None
        error: Optional[float] = None
        if p.coexist_regime and traj.snapshots:
            eq = model_service.equilibrium_closed_form(p)
            final = traj.final
            error = max(abs(final.u[0] - eq.u_star), abs(final.v[0] - eq.v_star))
        return Outcome(
            verdict=Verdict.SPREADING,
            speed_estimate=speed,
            equilibrium_error=error,
            evidence=evidence,
        )

    def estimate_speed(
        self, traj: Trajectory, window_fraction: float = settings.DEFAULT_SPEED_WINDOW
    ) -> float:
        """Least-squares slope of h against t over the last window_fraction of the run."""
        raise_for_status(
            not 0 < window_fraction <= 1,
            DomainError,
            detail="window_fraction must lie in (0, 1]",
            field="window_fraction",
        )
        p = traj.params
        raise_for_status(
            not p.prey_survives, EstimateUnavailable, detail="prey cannot spread when m*lambda <= b"
        )
        barrier = model_service.spreading_barrier(p).Lambda
        raise_for_status(
            traj.h_end <= 3.0 * barrier,
            EstimateUnavailable,
            detail=f"front {traj.h_end:.4g} has not passed 3*Lambda = {3.0 * barrier:.4g}",
        )
        t0, t1 = float(traj.times[0]), traj.t_end
        mask = traj.times >= t1 - window_fraction * (t1 - t0)
        raise_for_status(
            int(mask.sum()) < 10,
            EstimateUnavailable,
            detail="fewer than 10 samples in the speed window",
        )
        return least_squares_slope(traj.times[mask], traj.fronts[mask])

    # ---- thresholds ----
    def _evaluate(
        self,
        points: Sequence[float],
        build: Callable[[float], Tuple[ModelParams, InitialData]],
        cfg: SolverConfig,
        rules: ClassificationRules,
        workers: int,
    ) -> List[Tuple[Outcome, Trajectory]]:
        jobs = [build(x) for x in points]
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
                futures = [
                    pool.submit(run_and_classify, p, init, cfg, rules) for p, init in jobs
                ]
                return [f.result() for f in futures]
        return [run_and_classify(p, init, cfg, rules) for p, init in jobs]

    def _bisect(
        self,
        kind: str,
        bracket: Tuple[float, float],
        n_bisect: int,
        build: Callable[[float], Tuple[ModelParams, InitialData]],
        cfg: SolverConfig,
        rules: ClassificationRules,
        lower_verdict: Verdict,
        geometric: bool,
        audit_points: int,
        workers: int,
    ) -> ThresholdEstimate:
        lo, hi = bracket
        raise_for_status(
            not 0 < lo < hi, DomainError, detail="bracket must satisfy 0 < lower < upper"
        )
        upper_verdict = (
            Verdict.SPREADING if lower_verdict is Verdict.VANISHING else Verdict.VANISHING
        )
        (lo_out, lo_traj), (hi_out, hi_traj) = self._evaluate([lo, hi], build, cfg, rules, workers)
        probes = [(lo, lo_out.verdict), (hi, hi_out.verdict)]
        raise_for_status(
            lo_out.verdict is not lower_verdict or hi_out.verdict is not upper_verdict,
            BracketError,
            detail=f"{kind} bracket ({lo:g}, {hi:g}) gives "
            f"{lo_out.verdict.value}/{hi_out.verdict.value}",
            lower=lo_out.verdict.value,
            upper=hi_out.verdict.value,
        )

        if audit_points > 0:
            grid = np.geomspace(lo, hi, audit_points + 2)[1:-1] if geometric else np.linspace(
                lo, hi, audit_points + 2
            )[1:-1]
            audited = self._evaluate(list(grid), build, cfg, rules, workers)
            probes.extend((float(x), out.verdict) for x, (out, _) in zip(grid, audited))
            seen = [(float(x), out.verdict, traj) for x, (out, traj) in zip(grid, audited)]
            seen = [(lo, lo_out.verdict, lo_traj)] + seen + [(hi, hi_out.verdict, hi_traj)]
            for i, (x_low, v_low, t_low) in enumerate(seen):
                for x_high, v_high, t_high in seen[i + 1:]:
                    if v_low is upper_verdict and v_high is lower_verdict:
                        self._logger.error(
                            "Verdicts are not monotone",
                            extra={"kind": kind, "upper_at": x_low, "lower_at": x_high},
                        )
                        spreading, vanishing = (
                            (x_low, x_high) if upper_verdict is Verdict.SPREADING
                            else (x_high, x_low)
                        )
                        raise NonMonotoneVerdicts(
                            detail=f"{upper_verdict.value} at {x_low:g} below "
                            f"{lower_verdict.value} at {x_high:g}",
                            spreading_rho=spreading,
                            vanishing_rho=vanishing,
                            trajectories=[t_low, t_high],
                        )

        complete = True
        for _ in range(n_bisect):
            mid = math.sqrt(lo * hi) if geometric else 0.5 * (lo + hi)
            [(mid_out, mid_traj)] = self._evaluate([mid], build, cfg, rules, 1)
            probes.append((mid, mid_out.verdict))
            if mid_out.verdict is lower_verdict:
                lo, lo_traj = mid, mid_traj
            elif mid_out.verdict is upper_verdict:
                hi, hi_traj = mid, mid_traj
            else:
                self._logger.warning(
                    "Undetermined verdict inside the bracket, bisection stopped",
                    extra={"kind": kind, "at": mid},
                )
                complete = False
                break

        self._logger.info(
            "Threshold bracket found",
            extra={"kind": kind, "lower": lo, "upper": hi, "runs": len(probes)},
        )
        return ThresholdEstimate(
            kind=kind,
            lower=lo,
            upper=hi,
            runs=len(probes),
            complete=complete,
            probes=probes,
            trajectories_kept=[lo_traj, hi_traj],
        )

    def find_rho_critical(
        self,
        p: ModelParams,
        init: InitialData,
        cfg: SolverConfig,
        bracket: Tuple[float, float],
        n_bisect: int,
        rules: Optional[ClassificationRules] = None,
        audit_points: int = 0,
        workers: int = 1,
    ) -> ThresholdEstimate:
        """Geometric bisection in rho between a Vanishing and a Spreading endpoint."""
        return self._bisect(
            "rhoCritical",
            bracket,
            n_bisect,
            lambda rho: (p.with_rho(rho), init),
            cfg,
            rules or ClassificationRules(),
            lower_verdict=Verdict.VANISHING,
            geometric=True,
            audit_points=audit_points,
            workers=workers,
        )

    def find_h0_band(
        self,
        p: ModelParams,
        init: InitialData,
        cfg: SolverConfig,
        bracket: Tuple[float, float],
        n_bisect: int,
        rules: Optional[ClassificationRules] = None,
        audit_points: int = 0,
        workers: int = 1,
    ) -> ThresholdEstimate:
        """Bisection in the initial habitat at fixed rho (cosine data rescaled to each h0)."""
        raise_for_status(
            init.family != "cosine",
            DomainError,
            detail="h0 bisection needs cosine initial data",
            field="init.family",
        )
        return self._bisect(
            "h0Band",
            bracket,
            n_bisect,
            lambda h0: (p, init.with_h0(h0)),
            cfg,
            rules or ClassificationRules(),
            lower_verdict=Verdict.VANISHING,
            geometric=False,
            audit_points=audit_points,
            workers=workers,
        )

    # ---- diagnostics ----
    def moving_frame_sample(self, traj: Trajectory, k: float) -> MovingFrameSeries:
        """Profiles at x = k t for every snapshot; zero ahead of the front."""
        raise_for_status(k < 0, DomainError, detail="k must be non-negative", field="k", value=k)
        times, u, v = [], [], []
        for snap in traj.snapshots:
            u_val, v_val = snap.sample(k * snap.t)
            times.append(snap.t)
            u.append(u_val)
            v.append(v_val)
        return MovingFrameSeries(k=k, times=np.asarray(times), u=np.asarray(u), v=np.asarray(v))

    def equilibrium_error_series(self, traj: Trajectory) -> Tuple[np.ndarray, np.ndarray]:
        """max(|u(t,0) - u*|, |v(t,0) - v*|) at every snapshot."""
        raise_for_status(
            not traj.params.coexist_regime,
            OutOfRegime,
            detail="equilibrium error needs the coexist regime",
            inequality="0 < m*lambda - b < b*mu/c",
        )
        eq = model_service.equilibrium_closed_form(traj.params)
        times = np.array([s.t for s in traj.snapshots])
        errors = np.array(
            [max(abs(s.u[0] - eq.u_star), abs(s.v[0] - eq.v_star)) for s in traj.snapshots]
        )
        return times, errors

    def verify_predator_limit(
        self,
        traj: Trajectory,
        outcome: Outcome,
        rules: Optional[ClassificationRules] = None,
        v_tol: Optional[float] = None,
        steady_tol: float = settings.DEFAULT_PREDATOR_LIMIT_TOL,
    ) -> PredatorLimitReport:
        """Predator fate on a vanishing run.

        Below (pi/2) sqrt(d/mu) the predator dies out; above it the final
        profile approaches the stationary logistic profile on [0, h_inf],
        within ``steady_tol`` relative to the profile maximum.
        """
        raise_for_status(
            outcome.verdict is not Verdict.VANISHING,
            DomainError,
            detail="predator limit is defined for vanishing runs only",
            field="verdict",
            value=outcome.verdict.value,
        )
        rules = rules or ClassificationRules()
        p = traj.params
        threshold = p.predator_threshold_length
        h_inf = float(outcome.h_inf_estimate)
        final = traj.final
        sup_v = float(final.v.max())

        if h_inf <= threshold * (1.0 - rules.grid_tol):
            limit = v_tol if v_tol is not None else resolve_rules(
                p, rules, traj.config.t_max, float(traj.fronts[0])
            ).tol_u
            return PredatorLimitReport(
                branch="extinct",
                threshold=threshold,
                h_inf=h_inf,
                sup_v=sup_v,
                passed=sup_v <= limit,
            )
        if h_inf >= threshold * (1.0 + rules.grid_tol):
            steady = steady_state_service.solve_logistic_bvp(p.d, p.mu, h_inf)
            expected = np.interp(final.x, steady.grid, steady.values, right=0.0)
            sup_error = float(np.max(np.abs(final.v - expected)))
            relative = sup_error / float(steady.values.max())
            return PredatorLimitReport(
                branch="persistent",
                threshold=threshold,
                h_inf=h_inf,
                sup_v=sup_v,
                sup_error=sup_error,
                relative_error=relative,
                passed=relative <= steady_tol,
            )
        return PredatorLimitReport(
            branch="borderline", threshold=threshold, h_inf=h_inf, sup_v=sup_v, passed=True
        )


classify_service = ClassifyService()
