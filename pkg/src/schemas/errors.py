from typing import Optional, Any
from pydantic import BaseModel, ConfigDict, Field

from src.utils.request_utils import get_timestamp


class ErrorDetail(BaseModel):
    field: Optional[str] = Field(None, description="Offending configuration key or quantity")
    constraint: Optional[str] = Field(None, description="Constraint violated")
    value: Optional[Any] = Field(None, description="Value that caused the error")
    reason: Optional[str] = Field(None, description="Reason for the error")

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "field": "algorithm.betaa1",
                "constraint": "key is not recognised",
            }
        }
    )


class ErrorInfo(BaseModel):
    code: str = Field(..., description="Error code")
    message: str = Field(..., description="Human-readable error message")
    exitCode: int = Field(..., description="Process exit status")
    details: Optional[ErrorDetail] = Field(None, description="Additional error details")


class ErrorResponse(BaseModel):
    error: ErrorInfo
    timestamp: str = Field(default_factory=get_timestamp)
    runId: str

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "error": {
                    "code": "NUMERICAL_ABORT",
                    "message": "Run aborted at round 17: non-finite values",
                    "exitCode": 2,
                    "details": {"field": "round", "value": 17}
                },
                "timestamp": "2025-10-06T12:34:56.789Z",
                "runId": "run_abc123def456"
            }
        }
    )
