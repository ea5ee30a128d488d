from typing import Optional, Any


class BaseSimulationException(Exception):
    def __init__(
        self,
        message: str,
        error_code: str,
        exit_code: int = 2,
        field: Optional[str] = None,
        constraint: Optional[str] = None,
        value: Optional[Any] = None,
        reason: Optional[str] = None
    ):
        self.message = message
        self.error_code = error_code
        self.exit_code = exit_code
        self.field = field
        self.constraint = constraint
        self.value = value
        self.reason = reason
        super().__init__(self.message)


class ConfigError(BaseSimulationException):
    def __init__(
        self,
        message: str = "Invalid configuration",
        field: Optional[str] = None,
        constraint: Optional[str] = None,
        value: Optional[Any] = None,
        error_code: str = "CONFIG_ERROR"
    ):
        super().__init__(
            message=message,
            error_code=error_code,
            exit_code=1,
            field=field,
            constraint=constraint,
            value=value
        )


class ConfigParseError(ConfigError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(
            message=message,
            constraint=f"syntax error at line {line}" if line is not None else None,
            value=line,
            error_code="PARSE_ERROR"
        )


class UnknownKeyError(ConfigError):
    def __init__(self, field: str, message: Optional[str] = None):
        if message is None:
            message = f"Unknown configuration key: {field}"
        super().__init__(
            message=message,
            field=field,
            constraint="key is not recognised",
            error_code="UNKNOWN_KEY"
        )


class MissingFieldError(ConfigError):
    def __init__(
        self,
        field: str,
        message: Optional[str] = None
    ):
        if message is None:
            message = f"Required field missing: {field}"
        super().__init__(
            message=message,
            field=field,
            constraint="field is required",
            error_code="MISSING_FIELD"
        )


class InvalidTypeError(ConfigError):
    def __init__(
        self,
        field: str,
        expected_type: str,
        received_value: Any,
        message: Optional[str] = None
    ):
        if message is None:
            message = f"Field '{field}' has invalid type. Expected {expected_type}"
        super().__init__(
            message=message,
            field=field,
            value=received_value,
            constraint=f"must be of type {expected_type}",
            error_code="INVALID_TYPE"
        )


class OutOfRangeError(ConfigError):
    def __init__(
        self,
        field: str,
        value: Any,
        min_value: Optional[float] = None,
        max_value: Optional[float] = None,
        message: Optional[str] = None
    ):
        if min_value is not None and max_value is not None:
            constraint = f"must be between {min_value} and {max_value}"
        elif min_value is not None:
            constraint = f"must be at least {min_value}"
        elif max_value is not None:
            constraint = f"must be at most {max_value}"
        else:
            constraint = "value out of valid range"
        if message is None:
            message = f"Value for '{field}' is out of range"

        super().__init__(
            message=message,
            field=field,
            constraint=constraint,
            value=value,
            error_code="OUT_OF_RANGE"
        )


class UnknownVariantError(ConfigError):
    def __init__(self, variant: str, known: Optional[list] = None):
        super().__init__(
            message=f"Unknown algorithm variant: {variant}",
            field="variant",
            constraint=f"must be one of {known}" if known else None,
            value=variant,
            error_code="UNKNOWN_VARIANT"
        )


class UnsupportedProblemError(BaseSimulationException):
    def __init__(self, operation: str, problem_kind: str, reason: Optional[str] = None):
        super().__init__(
            message=f"Operation '{operation}' is not supported for {problem_kind} problems",
            error_code="UNSUPPORTED_PROBLEM",
            exit_code=1,
            value=problem_kind,
            reason=reason or "only defined for the quadratic family"
        )


class PreconditionError(BaseSimulationException):
    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        value: Optional[Any] = None,
        constraint: Optional[str] = None
    ):
        super().__init__(
            message=message,
            error_code="PRECONDITION_VIOLATION",
            exit_code=2,
            field=field,
            value=value,
            constraint=constraint
        )


class NumericalAbortError(BaseSimulationException):
    def __init__(
        self,
        round_index: int,
        message: Optional[str] = None,
        reason: Optional[str] = None
    ):
        self.round_index = round_index
        super().__init__(
            message=message or f"Run aborted at round {round_index}: non-finite values",
            error_code="NUMERICAL_ABORT",
            exit_code=2,
            field="round",
            value=round_index,
            reason=reason or "parameters or loss became NaN/Inf"
        )


class StreamExhaustedError(BaseSimulationException):
    def __init__(self, requested: int, available: int):
        super().__init__(
            message=f"Gradient stream exhausted: requested {requested} steps, {available} recorded",
            error_code="STREAM_EXHAUSTED",
            exit_code=2,
            value=requested,
            constraint=f"at most {available} steps"
        )


class InternalError(BaseSimulationException):
    def __init__(
        self,
        message: str = "Internal error",
        reason: Optional[str] = None
    ):
        super().__init__(
            message=message,
            error_code="INTERNAL_ERROR",
            exit_code=2,
            reason=reason or "An unexpected error occurred"
        )
