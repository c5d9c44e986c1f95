import json
import math
from pathlib import Path

import numpy as np
import pandas as pd

# Full double precision, independent of locale
FLOAT_FORMAT = "%.17g"


def write_csv(df: pd.DataFrame, path) -> None:
    """Write a table with 17 significant digits and '\\n' line endings."""
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def matrix_to_long(matrix: np.ndarray, time: float) -> pd.DataFrame:
    """Reshape an (n, n) site matrix into long format with columns t, m, n, p."""
    return (
        pd.DataFrame(np.asarray(matrix, dtype=float))
        .rename_axis("m")
        .reset_index()
        .melt(id_vars="m", var_name="n", value_name="p")
        .astype({"n": int})
        .assign(t=time)
        .filter(["t", "m", "n", "p"], axis=1)
        .sort_values(["m", "n"], ignore_index=True)
    )


def _jsonable(value):
    """NaN and infinities become null so the file stays strict JSON."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.integer, np.bool_)):
        return value.item()
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None

    return value


def update_json(path, new_dict: dict) -> None:
    """Update a json file by updating it with a new dictionary"""
    path = Path(path)

    # Check if the file exists, if not start from an empty document
    data = json.loads(path.read_text(encoding="utf-8")) if path.exists() else {}

    for k in new_dict.keys():
        data[k] = _jsonable(new_dict[k])

    path.write_text(json.dumps(data, indent=4, allow_nan=False) + "\n", encoding="utf-8")
