import logging
from typing import Any, Dict, List
from uuid import uuid4

from pydantic import ValidationError as PydanticValidationError

from freefront.core.exceptions import ExitCode, FreefrontError

logger = logging.getLogger(__name__)


def app_exception_handler(exc: FreefrontError, command: str) -> int:

    if exc.exit_code >= ExitCode.NUMERICAL:
        logger.error(
            f"Run failed: {exc.error_code}",
            extra={
                "exit_code": int(exc.exit_code),
                "error_code": str(exc.error_code),
                "detail": exc.detail,
                "context": exc.context,
                "command": command,
            },
        )
    else:
        logger.warning(
            f"Invalid input: {exc.error_code}",
            extra={
                "exit_code": int(exc.exit_code),
                "error_code": str(exc.error_code),
                "detail": exc.detail,
                "context": exc.context,
                "command": command,
            },
        )
    return int(exc.exit_code)


def flatten_validation_errors(exc: PydanticValidationError) -> List[Dict[str, Any]]:
    """
    Convert pydantic validation errors into field/message/type records.
    """
    errors = []
    for error in exc.errors():
        error_detail = {
            "field": ".".join(str(loc) for loc in error["loc"]),
            "message": error["msg"],
            "type": error["type"],
        }
        errors.append(error_detail)
    return errors


def validation_exception_handler(exc: PydanticValidationError, command: str) -> int:
    """
    Handle pydantic validation errors raised outside config parsing.
    """
    errors = flatten_validation_errors(exc)
    logger.warning("Validation error", extra={"errors": errors, "command": command})
    return int(ExitCode.VALIDATION)


def unhandled_exception_handler(exc: Exception, command: str) -> int:
    """
    Handle unhandled exceptions.

    Logs the traceback with a unique error ID and reports a numerical failure.
    """
    error_id = str(uuid4())

    logger.error(
        f"Unhandled exception: {error_id}",
        extra={
            "error_id": error_id,
            "command": command,
            "exception_type": type(exc).__name__,
        },
        exc_info=True,
    )
    return int(ExitCode.NUMERICAL)


def handle_cli_exception(exc: BaseException, command: str) -> int:
    """Dispatch an exception to its handler and return the process exit code."""
    if isinstance(exc, FreefrontError):
        return app_exception_handler(exc, command)
    if isinstance(exc, PydanticValidationError):
        return validation_exception_handler(exc, command)
    return unhandled_exception_handler(exc, command)
