from typing import List, Optional

from pydantic import BaseModel, Field


class SweepRow(BaseModel):
    """One (h0, rho) cell of the phase diagram."""

    h0: float
    rho: float
    verdict: str = Field(..., description="Spreading, Vanishing, Undetermined or Error")
    h_final: Optional[float] = None
    speed: Optional[float] = None
    error: Optional[str] = Field(None, description="Error code when the run failed")


class SweepSummary(BaseModel):
    rows: List[SweepRow] = Field(default_factory=list)

    @property
    def failures(self) -> List[SweepRow]:
        return [row for row in self.rows if row.error is not None]


__all__ = ["SweepRow", "SweepSummary"]
