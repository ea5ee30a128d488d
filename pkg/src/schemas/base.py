from typing import Generic, TypeVar
from pydantic import BaseModel, ConfigDict, Field

from src.utils.request_utils import get_timestamp

T = TypeVar('T')


class BaseResponse(BaseModel, Generic[T]):
    """Envelope for every JSON report the CLI prints or writes."""

    data: T
    timestamp: str = Field(default_factory=get_timestamp)
    runId: str

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "data": {},
                "timestamp": "2025-10-06T12:34:56.789Z",
                "runId": "run_abc123def456"
            }
        }
    )
