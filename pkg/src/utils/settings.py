import os
from functools import lru_cache
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class Settings(BaseModel):
    """Process-level settings read from DSM_* environment variables."""

    model_config = ConfigDict(frozen=True)

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(
        "INFO", description="Root logging level"
    )
    cache_dir: Optional[str] = Field(
        None, description="joblib cache directory for reference optima"
    )
    jobs: int = Field(1, ge=1, description="Default parallelism for sweeps")


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings(
        log_level=os.environ.get("DSM_LOG_LEVEL", "INFO").upper(),
        cache_dir=os.environ.get("DSM_CACHE_DIR") or None,
        jobs=int(os.environ.get("DSM_JOBS", "1")),
    )
