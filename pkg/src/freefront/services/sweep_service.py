# freefront/services/sweep_service.py
"""
(h0, rho) phase-diagram sweeps on a bounded process pool.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from pathlib import Path
from typing import List, Optional, Tuple

from freefront.core.config import settings
from freefront.core.exception_utils import raise_for_status
from freefront.core.exceptions import (
    ConfigValidationError,
    ErrorCode,
    FreefrontError,
    SimulationError,
)
from freefront.crud.artifact_crud import TableRepository, TrajectoryRepository
from freefront.schemas.classify_schema import ClassificationRules
from freefront.schemas.config_schema import RunConfig
from freefront.schemas.model_schema import ModelParams
from freefront.schemas.solver_schema import InitialData, SolverConfig, Trajectory
from freefront.schemas.sweep_schema import SweepRow, SweepSummary
from freefront.services.classify_service import run_and_classify

logger = logging.getLogger(__name__)


def sweep_cell(
    h0: float,
    rho: float,
    p: ModelParams,
    init: InitialData,
    solver: SolverConfig,
    rules: ClassificationRules,
    stop_on_spreading: bool,
) -> Tuple[SweepRow, Optional[Trajectory]]:
    """One cell; failures become an Error row carrying the error code."""
    try:
        outcome, traj = run_and_classify(
            p.with_rho(rho), init.with_h0(h0), solver, rules, stop_on_spreading
        )
    except FreefrontError as exc:
        logger.warning(
            "Sweep cell failed",
            extra={"h0": h0, "rho": rho, "error_code": str(exc.error_code), "detail": exc.detail},
        )
        partial = exc.trajectory if isinstance(exc, SimulationError) else None
        code = str(getattr(exc.error_code, "value", exc.error_code))
        return SweepRow(h0=h0, rho=rho, verdict="Error", error=code), partial
    except Exception as exc:
        logger.exception(
            "Sweep cell crashed",
            extra={"h0": h0, "rho": rho, "error_type": type(exc).__name__},
        )
        code = ErrorCode.INTERNAL_ERROR.value
        return SweepRow(h0=h0, rho=rho, verdict="Error", error=code), None
    return (
        SweepRow(
            h0=h0,
            rho=rho,
            verdict=outcome.verdict.value,
            h_final=traj.h_end,
            speed=outcome.speed_estimate,
        ),
        traj,
    )


class SweepService:
    def __init__(self):
        self._logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def run_sweep(
        self, cfg: RunConfig, out: Path, workers: Optional[int] = None
    ) -> SweepSummary:
        """Run every (h0, rho) pair and write the summary plus per-run trajectories.

        Rows are ordered by (h0, rho) whatever order the workers finish in.
        """
        raise_for_status(
            cfg.sweep is None, ConfigValidationError, detail="sweep axes are missing", field="sweep"
        )
        axes = cfg.sweep
        cells: List[Tuple[float, float]] = sorted(product(set(axes.h0), set(axes.rho)))
        workers = workers or cfg.threads or settings.WORKER_COUNT
        args = (cfg.params, cfg.init, cfg.solver, cfg.rules, not axes.estimate_speed)
        self._logger.info("Starting sweep", extra={"cells": len(cells), "workers": workers})

        if workers > 1 and len(cells) > 1:
            with ProcessPoolExecutor(max_workers=min(workers, len(cells))) as pool:
                futures = [pool.submit(sweep_cell, h0, rho, *args) for h0, rho in cells]
                results = [future.result() for future in futures]
        else:
            results = [sweep_cell(h0, rho, *args) for h0, rho in cells]

        trajectories = TrajectoryRepository(out)
        for row, traj in results:
            if traj is not None:
                trajectories.save(traj, name=f"runs/h0_{row.h0:.6g}_rho_{row.rho:.6g}")

        summary = SweepSummary(rows=[row for row, _ in results])
        TableRepository(out).save_sweep(summary)
        self._logger.info(
            "Sweep finished", extra={"cells": len(cells), "failures": len(summary.failures)}
        )
        return summary


sweep_service = SweepService()
