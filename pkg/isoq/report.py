#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Writing experiment tables to disk.
"""

import json
import os
from typing import Any, Dict, Union

import numpy as np
import pandas as pd

from isoq import _LOGGER, __version__

FLOAT_FORMAT = "%.12g"
FORMATS = ("csv", "json")


def table_header(experiment: str, seed: int) -> str:
    return f"# experiment={experiment} version={__version__} seed={seed}"


def _jsonable(value: Any, float_format: str = FLOAT_FORMAT) -> Any:
    if isinstance(value, (np.floating, float)):
        return float(float_format % value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def write_table(
    df: pd.DataFrame,
    path: Union[str, os.PathLike],
    experiment: str,
    seed: int,
    fmt: str = "csv",
    float_format: str = FLOAT_FORMAT,
) -> str:
    """
    Write ``df`` with a provenance header.

    CSV files start with a ``# experiment=... version=... seed=...`` comment
    line followed by the column header; floats are printed with
    ``float_format`` (12 significant digits by default). JSON files hold
    the same provenance next to a list of records. Returns the path written.
    """
    if fmt not in FORMATS:
        raise ValueError(f"Output format must be one of {FORMATS}, got '{fmt}'.")
    path = str(path)
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)

    if fmt == "csv":
        with open(path, "w", newline="") as handle:
            handle.write(table_header(experiment, seed) + "\n")
            df.to_csv(handle, index=False, float_format=float_format, lineterminator="\n")
    else:
        payload: Dict[str, Any] = {
            "experiment": experiment,
            "version": __version__,
            "seed": int(seed),
            "rows": [
                {k: _jsonable(v, float_format) for k, v in row.items()}
                for row in df.to_dict(orient="records")
            ],
        }
        with open(path, "w") as handle:
            json.dump(payload, handle, indent=2)
            handle.write("\n")
    _LOGGER.info(f"Wrote {len(df)} rows of '{experiment}' to '{path}'.")
    return path


def read_table(path: Union[str, os.PathLike]) -> pd.DataFrame:
    """Read a table written by :func:`write_table` back, in either format."""
    path = str(path)
    if path.endswith(".json"):
        with open(path, "r") as handle:
            return pd.DataFrame(json.load(handle)["rows"])
    return pd.read_csv(path, comment="#")
