import json
import logging
from abc import ABC, abstractmethod
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Generic, Optional, TypeVar

import numpy as np
import pandas as pd
from pydantic import BaseModel

from freefront.core.config import settings
from freefront.core.exception_utils import handle_exceptions
from freefront.core.exceptions import InternalError
from freefront.schemas.semiwave_schema import SemiWaveSolution
from freefront.schemas.solver_schema import Trajectory
from freefront.schemas.steady_schema import SteadyProfile
from freefront.schemas.sweep_schema import SweepSummary

logger = logging.getLogger(__name__)

T = TypeVar("T")

SCHEMA_LINE = "# schema_version: {version}\n"
FLOAT_FORMAT = "%.12g"


class BaseRepository(ABC, Generic[T]):
    """Abstract base repository: artifacts of one kind under an output directory."""

    def __init__(self, root: Path):
        self.root = Path(root)

    @abstractmethod
    def save(self, obj: T, *, name: str) -> Path:
        """Persist an artifact and return the path of its main file."""
        pass

    @abstractmethod
    def load(self, *, name: str) -> Any:
        """Read a persisted artifact back."""
        pass

    def _path(self, name: str) -> Path:
        path = self.root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        return path


def write_csv(path: Path, frame: pd.DataFrame) -> Path:
    with path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(SCHEMA_LINE.format(version=settings.SCHEMA_VERSION))
        frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def read_csv(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def write_json(path: Path, payload: Dict[str, Any]) -> Path:
    document = {"schema_version": settings.SCHEMA_VERSION, **payload}
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_json(path: Path) -> Dict[str, Any]:
    return json.loads(Path(path).read_text(encoding="utf-8"))


class TrajectoryRepository(BaseRepository[Trajectory]):
    """Trajectory series, profile snapshots and run metadata of one run."""

    def __init__(self, root: Path):
        super().__init__(root)
        self._logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def metadata(self, traj: Trajectory, timestamp: bool = True) -> Dict[str, Any]:
        init = None
        if traj.init is not None:
            # cosine samples are reproducible from the amplitudes
            exclude = {"x", "u0", "v0"} if traj.init.family == "cosine" else None
            init = traj.init.model_dump(mode="json", exclude=exclude)
        payload: Dict[str, Any] = {
            "code_version": settings.VERSION,
            "params": traj.params.model_dump(mode="json", by_alias=True),
            "solver": traj.config.model_dump(mode="json"),
            "init": init,
            "k_bound": traj.k_bound,
            "clamp_count": traj.clamp_count,
            "bound_warnings": traj.bound_warnings,
            "stop_reason": traj.stop_reason,
            "failed": traj.failed,
            "steps": int(traj.step_sizes.shape[0]),
        }
        if timestamp:
            payload["created_at"] = datetime.now(timezone.utc).isoformat()
        return payload

    @handle_exceptions(default_exception=InternalError, message="Failed to write trajectory.")
    def save(self, obj: Trajectory, *, name: str, timestamp: bool = True) -> Path:
        series = pd.DataFrame(
            {
                "t": obj.times,
                "h": obj.fronts,
                "h_prime": obj.front_speeds,
                "front_gradient": obj.front_gradients,
                "sup_u": obj.sup_u,
                "sup_v": obj.sup_v,
            }
        )
        main = write_csv(self._path(f"{name}/trajectory.csv"), series)

        frames = [
            pd.DataFrame(
                {"t": np.full(snap.u.shape[0], snap.t), "xi": snap.xi, "x": snap.x,
                 "u": snap.u, "v": snap.v}
            )
            for snap in obj.snapshots
        ]
        if frames:
            write_csv(self._path(f"{name}/profiles.csv"), pd.concat(frames, ignore_index=True))
        write_json(self._path(f"{name}/metadata.json"), self.metadata(obj, timestamp))
        self._logger.debug("Trajectory written", extra={"path": str(main)})
        return main

    def load(self, *, name: str) -> Dict[str, Any]:
        return {
            "trajectory": read_csv(self.root / name / "trajectory.csv"),
            "profiles": read_csv(self.root / name / "profiles.csv"),
            "metadata": read_json(self.root / name / "metadata.json"),
        }


class ReportRepository(BaseRepository[BaseModel]):
    """JSON reports (verdicts, comparisons, asymptotics, equilibria)."""

    @handle_exceptions(default_exception=InternalError, message="Failed to write report.")
    def save(
        self, obj: BaseModel, *, name: str, extra: Optional[Dict[str, Any]] = None
    ) -> Path:
        payload = obj.model_dump(mode="json", by_alias=True)
        if extra:
            payload.update(extra)
        return write_json(self._path(f"{name}.json"), payload)

    def load(self, *, name: str) -> Dict[str, Any]:
        return read_json(self.root / f"{name}.json")


class TableRepository(BaseRepository[pd.DataFrame]):
    """Plain tables: sweep summaries and stationary or semi-wave profiles."""

    @handle_exceptions(default_exception=InternalError, message="Failed to write table.")
    def save(self, obj: pd.DataFrame, *, name: str) -> Path:
        return write_csv(self._path(f"{name}.csv"), obj)

    def load(self, *, name: str) -> pd.DataFrame:
        return read_csv(self.root / f"{name}.csv")

    def save_sweep(self, summary: SweepSummary, *, name: str = "sweep") -> Path:
        columns = ["h0", "rho", "verdict", "h_final", "speed", "error"]
        frame = pd.DataFrame([row.model_dump() for row in summary.rows], columns=columns)
        return self.save(frame, name=name)

    def save_steady(self, profile: SteadyProfile, *, name: str) -> Path:
        return self.save(pd.DataFrame({"x": profile.grid, "V": profile.values}), name=name)

    def save_semiwave(self, solution: SemiWaveSolution, *, name: str) -> Path:
        frame = pd.DataFrame(
            {"y": solution.y_grid, "q": solution.q, "qprime": solution.q_prime}
        )
        return self.save(frame, name=name)


__all__ = [
    "BaseRepository",
    "TrajectoryRepository",
    "ReportRepository",
    "TableRepository",
    "read_csv",
    "read_json",
]
