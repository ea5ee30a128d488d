"""TOML experiment files: strict parsing, serialization and command-line overrides."""

import logging
import re
import sys
from pathlib import Path
from typing import Any, Dict, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

import tomli_w
from pydantic import ValidationError

from src.cli.schemas import ExperimentSpec
from src.utils.error_handlers import config_error_from_validation
from src.utils.exceptions import ConfigError, ConfigParseError

logger = logging.getLogger(__name__)

_LINE = re.compile(r"line (\d+)")


def _validate(data: Dict[str, Any]) -> ExperimentSpec:
    try:
        return ExperimentSpec.model_validate(data)
    except ValidationError as e:
        raise config_error_from_validation(e)


def parse_config(path: str | Path) -> ExperimentSpec:
    """
    Read and validate an experiment file.

    Raises:
        ConfigError: missing file, or a key that fails validation
        ConfigParseError: malformed TOML, with the offending line when known
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}", field="config", value=str(path))
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as e:
        match = _LINE.search(str(e))
        raise ConfigParseError(f"Malformed TOML in {path}: {e}", line=int(match.group(1)) if match else None)

    spec = _validate(data)
    logger.debug(f"Parsed config {path}", extra={"experiment": spec.name})
    return spec


def serialize_config(spec: ExperimentSpec) -> str:
    return tomli_w.dumps(spec.model_dump(mode="json", exclude_none=True))


def write_config(spec: ExperimentSpec, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(serialize_config(spec), encoding="utf-8")
    return path


def apply_overrides(
    spec: ExperimentSpec,
    seed: Optional[int] = None,
    out: Optional[str] = None,
    fmt: Optional[str] = None,
    jobs: Optional[int] = None,
) -> ExperimentSpec:
    """Command-line flags take precedence over the file; the result is revalidated."""
    data = spec.model_dump(mode="json", exclude_none=True)
    if seed is not None:
        data["algorithm"]["seed"] = seed
    if out is not None:
        data["output"]["directory"] = out
    if fmt is not None:
        data["output"]["formats"] = [fmt]
    if jobs is not None:
        data["output"]["jobs"] = jobs
    return _validate(data)
