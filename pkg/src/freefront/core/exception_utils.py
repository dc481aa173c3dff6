from typing import Optional, Type, TypeVar, Callable, Any
from functools import wraps

from freefront.core.exceptions import FreefrontError, InternalError

T = TypeVar("T")


def handle_exceptions(
    default_exception: Type[FreefrontError] = InternalError,
    message: Optional[str] = None,
) -> Callable:

    def decorator(func: Callable[..., T]) -> Callable[..., T]:
        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> T:
            try:
                return func(*args, **kwargs)
            except FreefrontError:
                # Re-raise our custom exceptions
                raise
            except Exception as e:
                # Convert other exceptions to our custom exception
                error_message = message or f"Error in {func.__name__}: {e}"
                raise default_exception(detail=error_message) from e

        return wrapper

    return decorator


def raise_for_status(
    condition: bool,
    exception: Type[FreefrontError],
    detail: Optional[str] = None,
    **kwargs: Any,
) -> None:
    """
    Raise an exception if condition is True.

    Args:
        condition: If True, raise the exception
        exception: Exception class to raise
        detail: Custom error message
        **kwargs: Additional arguments for the exception

    Example:
        raise_for_status(
            l <= 0,
            DomainError,
            detail="l must be positive",
            field="l",
        )
    """
    if condition:
        if detail:
            kwargs["detail"] = detail
        raise exception(**kwargs)
