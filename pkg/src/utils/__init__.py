from src.utils.exceptions import (
    BaseSimulationException,
    ConfigError,
    ConfigParseError,
    UnknownKeyError,
    MissingFieldError,
    InvalidTypeError,
    OutOfRangeError,
    UnknownVariantError,
    UnsupportedProblemError,
    PreconditionError,
    NumericalAbortError,
    StreamExhaustedError,
    InternalError
)
from src.utils.error_handlers import (
    config_error_from_validation,
    build_error_response,
    handle_exception
)
from src.utils.request_utils import (
    generate_run_id,
    get_timestamp
)

__all__ = [
    "BaseSimulationException",
    "ConfigError",
    "ConfigParseError",
    "UnknownKeyError",
    "MissingFieldError",
    "InvalidTypeError",
    "OutOfRangeError",
    "UnknownVariantError",
    "UnsupportedProblemError",
    "PreconditionError",
    "NumericalAbortError",
    "StreamExhaustedError",
    "InternalError",
    "config_error_from_validation",
    "build_error_response",
    "handle_exception",
    "generate_run_id",
    "get_timestamp"
]
