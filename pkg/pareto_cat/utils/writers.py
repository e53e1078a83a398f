"""Result emission: JSON documents and flat CSV tables."""
from __future__ import annotations
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any
import numpy as np
import pandas as pd
from pareto_cat.core.config import settings
from pareto_cat.core.enums import OutputFormat
from pareto_cat.core.logger import logger


def _default(value: Any):
    if isinstance(value, Fraction):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, (set, frozenset, tuple)):
        return list(value)
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def _finite(value: Any):
    """JSON has no infinity; unbounded distances are written as null."""
    if isinstance(value, float) and math.isinf(value):
        return None
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value


def to_json(payload: dict) -> str:
    return json.dumps(_finite(payload), indent=settings.output_indent, default=_default)


def to_csv(rows: list[dict]) -> str:
    return pd.DataFrame(rows).to_csv(index=False)


def emit(payload: dict, rows: list[dict] | None = None, fmt: OutputFormat = OutputFormat.JSON,
         out: str | Path | None = None):
    """
    Without --out, stdout gets JSON, or the CSV table when fmt is csv and one exists.
    With --out, the JSON document goes to out and the table to the same path with a .csv suffix.
    """
    if out is None:
        if fmt is OutputFormat.CSV and rows is not None:
            sys.stdout.write(to_csv(rows))
        else:
            sys.stdout.write(to_json(payload) + "\n")
        return
    out = Path(out)
    json_path = out.with_suffix(".json") if out.suffix == ".csv" else out
    json_path.write_text(to_json(payload) + "\n", encoding="utf-8")
    logger.info("Wrote %s", json_path)
    if rows is not None:
        csv_path = json_path.with_suffix(".csv")
        csv_path.write_text(to_csv(rows), encoding="utf-8")
        logger.info("Wrote %s", csv_path)
