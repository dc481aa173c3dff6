from enum import Enum
from typing import Dict, Optional, Any, List, TYPE_CHECKING

if TYPE_CHECKING:
    from freefront.schemas.solver_schema import Trajectory


class ErrorCode(str, Enum):
    """Enumeration of error codes for consistent error identification."""

    # Input / Configuration
    DOMAIN_ERROR = "DOMAIN_ERROR"
    OUT_OF_REGIME = "OUT_OF_REGIME"
    PREMISE_VIOLATED = "PREMISE_VIOLATED"
    CONFIG_PARSE_ERROR = "CONFIG_PARSE_ERROR"
    VALIDATION_ERROR = "VALIDATION_ERROR"

    # Numerical Failures
    NUMERICAL_BLOWUP = "NUMERICAL_BLOWUP"
    STEFAN_VIOLATION = "STEFAN_VIOLATION"
    SOLVER_FAILURE = "SOLVER_FAILURE"
    BRACKET_FAILURE = "BRACKET_FAILURE"
    BRACKET_ERROR = "BRACKET_ERROR"
    ESTIMATE_UNAVAILABLE = "ESTIMATE_UNAVAILABLE"

    # Property Checks
    PROPERTY_VIOLATION = "PROPERTY_VIOLATION"
    NON_MONOTONE_VERDICTS = "NON_MONOTONE_VERDICTS"

    # Generic
    INTERNAL_ERROR = "INTERNAL_ERROR"


class ExitCode(int, Enum):
    """Process exit codes of the batch front-end."""

    SUCCESS = 0
    VALIDATION = 1
    NUMERICAL = 2
    PROPERTY = 3


class FreefrontError(Exception):
    """
    Base exception class for all custom application exceptions.

    Every error carries the exit code the batch front-end reports, so CI can
    tell a bad configuration from a numerical failure or a broken property.
    """

    def __init__(
        self,
        exit_code: int,
        detail: str,
        error_code: Optional[str] = None,
        context: Optional[Dict[str, Any]] = None,
    ) -> None:
        self.exit_code = exit_code
        self.detail = detail
        self.error_code = error_code or self.__class__.__name__
        self.context = context or {}
        super().__init__(detail)

    def to_dict(self) -> Dict[str, Any]:
        """Convert exception to dictionary for JSON reports."""
        return {
            "error": {
                "code": str(getattr(self.error_code, "value", self.error_code)),
                "message": self.detail,
                "exit_code": int(self.exit_code),
                "context": self.context,
            }
        }


# ---- Input / Configuration Exceptions ----
class DomainError(FreefrontError):
    """Raised when an argument lies outside the mathematical domain of an operation."""

    def __init__(
        self,
        detail: str = "Argument outside the domain of the operation.",
        field: Optional[str] = None,
        value: Optional[Any] = None,
    ) -> None:
        context: Dict[str, Any] = {}
        if field:
            context["field"] = field
        if value is not None:
            context["value"] = str(value)
        super().__init__(
            exit_code=ExitCode.VALIDATION,
            detail=detail,
            error_code=ErrorCode.DOMAIN_ERROR,
            context=context,
        )


class OutOfRegime(FreefrontError):
    """Raised when a parameter set fails the inequality an operation requires."""

    def __init__(
        self,
        detail: str = "Parameters are outside the required regime.",
        inequality: Optional[str] = None,
    ) -> None:
        context = {"inequality": inequality} if inequality else {}
        super().__init__(
            exit_code=ExitCode.VALIDATION,
            detail=detail,
            error_code=ErrorCode.OUT_OF_REGIME,
            context=context,
        )


class PremiseViolated(FreefrontError):
    """Raised when the premise of an explicit construction does not hold."""

    def __init__(self, detail: str, premise: Optional[str] = None) -> None:
        context = {"premise": premise} if premise else {}
        super().__init__(
            exit_code=ExitCode.VALIDATION,
            detail=detail,
            error_code=ErrorCode.PREMISE_VIOLATED,
            context=context,
        )


class ConfigParseError(FreefrontError):
    """Raised when a run configuration document cannot be parsed."""

    def __init__(
        self,
        detail: str = "Configuration document is malformed.",
        line: Optional[int] = None,
        column: Optional[int] = None,
    ) -> None:
        context: Dict[str, Any] = {}
        if line is not None:
            context["line"] = line
        if column is not None:
            context["column"] = column
        super().__init__(
            exit_code=ExitCode.VALIDATION,
            detail=detail,
            error_code=ErrorCode.CONFIG_PARSE_ERROR,
            context=context,
        )


class ConfigValidationError(FreefrontError):
    """Raised when configuration validation fails."""

    def __init__(
        self,
        detail: str = "Validation failed",
        errors: Optional[List[Dict[str, Any]]] = None,
        field: Optional[str] = None,
    ) -> None:
        context: Dict[str, Any] = {"errors": errors or []}
        if field:
            context["field"] = field

        super().__init__(
            exit_code=ExitCode.VALIDATION,
            detail=detail,
            error_code=ErrorCode.VALIDATION_ERROR,
            context=context,
        )


# ---- Numerical Exceptions ----
class NumericalError(FreefrontError):
    """Base class for numerical failures."""

    pass


class SimulationError(NumericalError):
    """Base class for failures inside a time-stepping run.

    The partial trajectory recorded up to the failure is attached for
    post-mortem inspection.
    """

    def __init__(
        self,
        detail: str,
        error_code: ErrorCode,
        context: Optional[Dict[str, Any]] = None,
    ) -> None:
        self.trajectory: Optional["Trajectory"] = None
        super().__init__(
            exit_code=ExitCode.NUMERICAL,
            detail=detail,
            error_code=error_code,
            context=context,
        )


class NumericalBlowup(SimulationError):
    """Raised when a non-finite value (or pervasive negativity) appears."""

    def __init__(
        self,
        detail: str = "Non-finite value produced.",
        t: Optional[float] = None,
        j: Optional[int] = None,
    ) -> None:
        context: Dict[str, Any] = {}
        if t is not None:
            context["t"] = t
        if j is not None:
            context["j"] = j
        super().__init__(detail, ErrorCode.NUMERICAL_BLOWUP, context)


class StefanViolation(SimulationError):
    """Raised when the front speed is not positive."""

    def __init__(
        self,
        detail: str = "Front speed must stay positive.",
        t: Optional[float] = None,
        h_prime: Optional[float] = None,
    ) -> None:
        context: Dict[str, Any] = {}
        if t is not None:
            context["t"] = t
        if h_prime is not None:
            context["h_prime"] = h_prime
        super().__init__(detail, ErrorCode.STEFAN_VIOLATION, context)


class SolverFailure(NumericalError):
    """Raised when an iterative solver stagnates."""

    def __init__(
        self,
        detail: str = "Solver failed to converge.",
        residual: Optional[float] = None,
    ) -> None:
        context = {"residual": residual} if residual is not None else {}
        super().__init__(
            exit_code=ExitCode.NUMERICAL,
            detail=detail,
            error_code=ErrorCode.SOLVER_FAILURE,
            context=context,
        )


class BracketFailure(NumericalError):
    """Raised when both ends of a shooting bracket classify identically."""

    def __init__(
        self,
        detail: str = "Bracket endpoints classify identically.",
        y_max: Optional[float] = None,
    ) -> None:
        context = {"y_max": y_max} if y_max is not None else {}
        super().__init__(
            exit_code=ExitCode.NUMERICAL,
            detail=detail,
            error_code=ErrorCode.BRACKET_FAILURE,
            context=context,
        )


class BracketError(NumericalError):
    """Raised when a parameter bracket does not straddle a verdict change."""

    def __init__(
        self,
        detail: str = "Bracket endpoints must have different verdicts.",
        lower: Optional[str] = None,
        upper: Optional[str] = None,
    ) -> None:
        context: Dict[str, Any] = {}
        if lower:
            context["lower_verdict"] = lower
        if upper:
            context["upper_verdict"] = upper
        super().__init__(
            exit_code=ExitCode.NUMERICAL,
            detail=detail,
            error_code=ErrorCode.BRACKET_ERROR,
            context=context,
        )


class EstimateUnavailable(NumericalError):
    """Raised when a trajectory cannot support the requested estimate."""

    def __init__(self, detail: str = "Not enough data for an estimate.") -> None:
        super().__init__(
            exit_code=ExitCode.NUMERICAL,
            detail=detail,
            error_code=ErrorCode.ESTIMATE_UNAVAILABLE,
        )


# ---- Property Exceptions ----
class PropertyViolation(FreefrontError):
    """Raised when a property the theory guarantees fails beyond tolerance."""

    def __init__(
        self,
        detail: str,
        check: Optional[str] = None,
        location: Optional[Dict[str, float]] = None,
        margin: Optional[float] = None,
    ) -> None:
        context: Dict[str, Any] = {}
        if check:
            context["check"] = check
        if location:
            context["location"] = location
        if margin is not None:
            context["margin"] = margin
        super().__init__(
            exit_code=ExitCode.PROPERTY,
            detail=detail,
            error_code=ErrorCode.PROPERTY_VIOLATION,
            context=context,
        )


class NonMonotoneVerdicts(FreefrontError):
    """Raised when a Spreading verdict sits below a Vanishing one in rho."""

    def __init__(
        self,
        detail: str,
        spreading_rho: float,
        vanishing_rho: float,
        trajectories: Optional[List["Trajectory"]] = None,
    ) -> None:
        self.trajectories = trajectories or []
        super().__init__(
            exit_code=ExitCode.PROPERTY,
            detail=detail,
            error_code=ErrorCode.NON_MONOTONE_VERDICTS,
            context={"spreading_rho": spreading_rho, "vanishing_rho": vanishing_rho},
        )


class InternalError(FreefrontError):
    """Raised when an unexpected error occurs."""

    def __init__(
        self,
        detail: str = "An unexpected error occurred.",
        error_id: Optional[str] = None,
    ) -> None:
        context = {"error_id": error_id} if error_id else {}
        super().__init__(
            exit_code=ExitCode.NUMERICAL,
            detail=detail,
            error_code=ErrorCode.INTERNAL_ERROR,
            context=context,
        )
