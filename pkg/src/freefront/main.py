"""
Batch front-end.

    freefront <command> --config <path> [--out <dir>] [--threads N]

Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 property
violation.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

from freefront.core.config import settings
from freefront.core.exception_handler import handle_cli_exception
from freefront.core.exceptions import ExitCode, PremiseViolated
from freefront.crud.artifact_crud import ReportRepository, TableRepository, TrajectoryRepository
from freefront.schemas.classify_schema import Verdict
from freefront.schemas.config_schema import RunConfig
from freefront.schemas.semiwave_schema import SemiWaveProblem
from freefront.services.classify_service import classify_service, run_and_classify
from freefront.services.compare_service import compare_service
from freefront.services.config_service import config_service
from freefront.services.model_service import model_service
from freefront.services.pde_service import pde_service
from freefront.services.semiwave_service import semiwave_service
from freefront.services.steady_state_service import steady_state_service
from freefront.services.sweep_service import sweep_service

logger = logging.getLogger(__name__)

COMMANDS = ("simulate", "classify", "sweep", "semiwave", "equilibrium", "thresholds", "compare")


def configure_logging(level: str = settings.LOG_LEVEL) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freefront", description=settings.DESCRIPTION)
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, required=True, help="TOML run configuration")
    parser.add_argument("--out", type=Path, default=None, help="Output directory")
    parser.add_argument("--threads", type=int, default=None, help="Worker processes")
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.VERSION}")
    return parser


def run_simulate(cfg: RunConfig, out: Path, workers: int) -> int:
    traj = pde_service.simulate(cfg.params, cfg.init, cfg.solver)
    TrajectoryRepository(out).save(traj, name="run")
    return ExitCode.SUCCESS


def run_classify(cfg: RunConfig, out: Path, workers: int) -> int:
    outcome, traj = run_and_classify(
        cfg.params, cfg.init, cfg.solver, cfg.rules, stop_on_spreading=False
    )
    TrajectoryRepository(out).save(traj, name="run")
    extra: Dict[str, object] = {
        "params": cfg.params.model_dump(mode="json", by_alias=True),
        "init": cfg.init.model_dump(mode="json", exclude={"x", "u0", "v0"}),
    }
    if outcome.verdict is Verdict.VANISHING:
        report = classify_service.verify_predator_limit(traj, outcome, cfg.rules)
        extra["predator_limit"] = report.model_dump(mode="json")
        if report.branch == "persistent":
            steady = steady_state_service.solve_logistic_bvp(
                cfg.params.d, cfg.params.mu, outcome.h_inf_estimate
            )
            TableRepository(out).save_steady(steady, name="predator_steady_profile")
    ReportRepository(out).save(outcome, name="verdict", extra=extra)
    return ExitCode.SUCCESS


def run_sweep(cfg: RunConfig, out: Path, workers: int) -> int:
    sweep_service.run_sweep(cfg, out, workers)
    return ExitCode.SUCCESS


def run_semiwave(cfg: RunConfig, out: Path, workers: int) -> int:
    reports = ReportRepository(out)
    tables = TableRepository(out)
    spec = cfg.semiwave
    if spec is not None:
        problems = {"semiwave": spec.problem}
    else:
        p = cfg.params
        problems = {
            "semiwave_lower": SemiWaveProblem(a=p.effective_prey_rate, bcoef=1.0, d=1.0, rho=p.rho),
            "semiwave_upper": SemiWaveProblem(a=p.lam, bcoef=1.0, d=1.0, rho=p.rho),
        }
    y_max = spec.y_max if spec is not None else None
    tol = spec.tol if spec is not None and spec.tol else settings.DEFAULT_SEMIWAVE_TOL
    for name, prob in problems.items():
        solution = semiwave_service.solve_semi_wave(prob, y_max, tol)
        tables.save_semiwave(solution, name=f"{name}_profile")
        reports.save(
            semiwave_service.asymptotics(prob, solution),
            name=f"{name}_asymptotics",
            extra={
                "converged": solution.converged,
                "tail_gap": solution.tail_gap,
                "ode_residual": solution.ode_residual,
            },
        )
    if spec is not None and spec.rhos and spec.a_values:
        matrix = semiwave_service.monotone_in_rho_and_a(spec.problem, spec.rhos, spec.a_values, tol)
        reports.save(matrix, name="semiwave_monotonicity")
    return ExitCode.SUCCESS


def run_equilibrium(cfg: RunConfig, out: Path, workers: int) -> int:
    p = cfg.params
    spec = cfg.equilibrium
    reports = ReportRepository(out)
    reports.save(model_service.equilibrium_closed_form(p), name="equilibrium")
    trace = model_service.iterate_equilibrium(
        p,
        tol=spec.tol if spec and spec.tol else settings.DEFAULT_EQUILIBRIUM_TOL,
        max_iter=spec.max_iter if spec and spec.max_iter else settings.DEFAULT_MAX_ITER,
    )
    reports.save(trace, name="equilibrium_iteration")
    K = spec.K if spec and spec.K else max(p.lam, p.mu + p.c)
    reports.save(
        model_service.speed_constants(p, K),
        name="speed_constants",
        extra={
            "windows": [w.model_dump(mode="json") for w in model_service.moving_frame_windows(p, K)],
            "K_is_heuristic": spec is None or spec.K is None,
        },
    )
    return ExitCode.SUCCESS


def run_thresholds(cfg: RunConfig, out: Path, workers: int) -> int:
    p = cfg.params
    reports = ReportRepository(out)
    barrier = model_service.spreading_barrier(p)
    reports.save(
        barrier,
        name="thresholds",
        extra={
            "predator_threshold_length": p.predator_threshold_length,
            "sigma1_at_h0": barrier.sigma1(cfg.init.h0),
        },
    )
    spec = cfg.thresholds
    if spec is None:
        return ExitCode.SUCCESS
    finder = (
        classify_service.find_rho_critical
        if spec.kind == "rhoCritical"
        else classify_service.find_h0_band
    )
    estimate = finder(
        p,
        cfg.init,
        cfg.solver,
        tuple(spec.bracket),
        spec.n_bisect,
        rules=cfg.rules,
        audit_points=spec.audit_points,
        workers=workers,
    )
    reports.save(estimate, name=f"threshold_{spec.kind}")
    return ExitCode.SUCCESS


def run_compare(cfg: RunConfig, out: Path, workers: int) -> int:
    spec = cfg.compare
    tol = spec.tol if spec and spec.tol else settings.DEFAULT_ORDERING_TOL
    reports = ReportRepository(out)
    passed = True

    if spec is None or spec.upper_solution:
        try:
            upper = compare_service.build_decaying_upper_solution(cfg.params, cfg.init)
        except PremiseViolated as exc:
            logger.info("Upper-solution check skipped", extra={"reason": exc.detail})
        else:
            rho = min(cfg.params.rho, upper.rho0)
            traj = pde_service.simulate(cfg.params.with_rho(rho), cfg.init, cfg.solver)
            report = compare_service.verify_upper_ordering(traj, upper, tol, strict=False)
            reports.save(report, name="compare_upper", extra={"upper": upper.model_dump()})
            passed = passed and report.passed

    if spec is None or spec.sandwich:
        report = compare_service.verify_logistic_sandwich(
            cfg.params, cfg.init, cfg.solver, tol, strict=False, workers=workers
        )
        reports.save(report, name="compare_sandwich")
        passed = passed and report.passed

    return ExitCode.SUCCESS if passed else ExitCode.PROPERTY


HANDLERS: Dict[str, Callable[[RunConfig, Path, int], int]] = {
    "simulate": run_simulate,
    "classify": run_classify,
    "sweep": run_sweep,
    "semiwave": run_semiwave,
    "equilibrium": run_equilibrium,
    "thresholds": run_thresholds,
    "compare": run_compare,
}


def main(argv: Optional[List[str]] = None) -> int:
    configure_logging()
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which would read as a numerical failure
        return ExitCode.SUCCESS if exc.code in (0, None) else ExitCode.VALIDATION
    try:
        cfg = config_service.load_config(args.config, command=args.command)
        out = args.out or Path(cfg.output)
        workers = args.threads or cfg.threads or settings.WORKER_COUNT
        logger.info(
            "Running command",
            extra={"command": args.command, "out": str(out), "workers": workers},
        )
        code = HANDLERS[args.command](cfg, out, workers)
    except Exception as exc:
        return handle_cli_exception(exc, args.command)
    return int(code)


if __name__ == "__main__":
    sys.exit(main())
