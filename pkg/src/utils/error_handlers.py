import logging
import sys
from typing import Optional, TextIO

from pydantic import ValidationError as PydanticValidationError

from src.schemas.errors import ErrorResponse, ErrorInfo, ErrorDetail
from src.utils.exceptions import (
    BaseSimulationException,
    ConfigError,
    InvalidTypeError,
    MissingFieldError,
    OutOfRangeError,
    UnknownKeyError,
)

logger = logging.getLogger(__name__)


def _dotted(loc, prefix: Optional[str] = None) -> Optional[str]:
    parts = [str(p) for p in loc if not isinstance(p, int)]
    if prefix:
        parts.insert(0, prefix)
    return ".".join(parts) if parts else None


def config_error_from_validation(
    exc: PydanticValidationError,
    prefix: Optional[str] = None
) -> ConfigError:
    """Map the first pydantic error onto the matching ConfigError subclass."""
    errors = exc.errors()
    if not errors:
        return ConfigError("Validation error")

    first_error = errors[0]
    error_type = first_error.get("type", "validation_error")
    error_msg = first_error.get("msg", "Validation error")
    field_name = _dotted(first_error.get("loc", ()), prefix)
    input_value = first_error.get("input")

    if error_type == "extra_forbidden":
        return UnknownKeyError(field=field_name or "<root>")
    if "missing" in error_type:
        return MissingFieldError(field=field_name or "<root>")
    if "less_than" in error_type or "greater_than" in error_type:
        ctx = first_error.get("ctx") or {}
        return OutOfRangeError(
            field=field_name or "<root>",
            value=input_value,
            min_value=ctx.get("ge", ctx.get("gt")),
            max_value=ctx.get("le", ctx.get("lt")),
        )
    if error_type.endswith("_type") or error_type.endswith("_parsing"):
        return InvalidTypeError(
            field=field_name or "<root>",
            expected_type=error_type.split("_")[0],
            received_value=input_value,
        )
    return ConfigError(
        message=f"Invalid value for '{field_name}': {error_msg}",
        field=field_name,
        constraint=error_msg,
        value=input_value if isinstance(input_value, (int, float, str, bool)) else None,
    )


def build_error_response(exc: Exception, run_id: str) -> ErrorResponse:
    if isinstance(exc, BaseSimulationException):
        error_detail = None
        if exc.field or exc.constraint or exc.value is not None or exc.reason:
            error_detail = ErrorDetail(
                field=exc.field,
                constraint=exc.constraint,
                value=exc.value,
                reason=exc.reason
            )
        return ErrorResponse(
            error=ErrorInfo(
                code=exc.error_code,
                message=exc.message,
                exitCode=exc.exit_code,
                details=error_detail
            ),
            runId=run_id
        )

    return ErrorResponse(
        error=ErrorInfo(
            code="INTERNAL_ERROR",
            message="An unexpected error occurred",
            exitCode=2,
            details=ErrorDetail(reason=f"{type(exc).__name__}: {exc}")
        ),
        runId=run_id
    )


def handle_exception(exc: Exception, run_id: str, stream: TextIO = sys.stderr) -> int:
    """Log `exc`, print its ErrorResponse envelope and return the exit code."""
    if isinstance(exc, PydanticValidationError):
        exc = config_error_from_validation(exc)

    error_response = build_error_response(exc, run_id)

    if isinstance(exc, BaseSimulationException):
        log_level = logging.ERROR if exc.exit_code >= 2 else logging.WARNING
        logger.log(
            log_level,
            f"{exc.error_code}: {exc.message}",
            extra={"run_id": run_id, "field": exc.field}
        )
    else:
        logger.error(
            f"Unexpected error: {type(exc).__name__}: {str(exc)}",
            extra={"run_id": run_id, "exception_type": type(exc).__name__},
            exc_info=True
        )

    stream.write(error_response.model_dump_json() + "\n")
    return error_response.error.exitCode
