from .base import BaseResponse
from .errors import ErrorDetail, ErrorInfo, ErrorResponse

__all__ = [
    "BaseResponse",
    "ErrorDetail",
    "ErrorInfo",
    "ErrorResponse",
]
