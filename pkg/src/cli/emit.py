import logging
from pathlib import Path
from typing import List, Literal

import pandas as pd

from src.engine.trace import TRACE_COLUMNS, RoundRecord, RunTrace
from src.utils.exceptions import ConfigError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def _unwritable(path: Path, e: OSError) -> ConfigError:
    return ConfigError(
        message=f"Cannot write {path}: {e.strerror or e}",
        field="output.directory",
        constraint="directory must be writable",
        value=str(path),
    )


def emit_trace(trace: RunTrace, fmt: Literal["csv", "jsonl"], path: str | Path) -> Path:
    """Write one row (csv) or one object (jsonl) per round, columns in TRACE_COLUMNS order."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "csv":
            trace.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        elif fmt == "jsonl":
            with path.open("w", encoding="utf-8", newline="\n") as fh:
                for record in trace.records:
                    fh.write(record.model_dump_json() + "\n")
        else:
            raise ConfigError(f"Unknown trace format: {fmt}", field="output.formats", value=fmt)
    except OSError as e:
        raise _unwritable(path, e)
    logger.debug(f"Wrote {len(trace.records)} records to {path}")
    return path


def read_trace(path: str | Path) -> List[RoundRecord]:
    path = Path(path)
    if path.suffix == ".jsonl":
        with path.open("r", encoding="utf-8") as fh:
            return [RoundRecord.model_validate_json(line) for line in fh if line.strip()]
    frame = pd.read_csv(path, float_precision="round_trip", dtype={"x_hash": str})
    if list(frame.columns) != TRACE_COLUMNS:
        raise ConfigError(f"Unexpected trace columns in {path}", field="columns", value=list(frame.columns))
    return [RoundRecord.model_validate(row) for row in frame.to_dict(orient="records")]


def emit_frame(frame: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise _unwritable(path, e)
    return path
