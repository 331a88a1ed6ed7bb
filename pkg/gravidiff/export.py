"""CSV and JSON writers for pattern grids and reports."""

import json
import logging
import sys
from typing import Any, Iterable, Optional

import numpy as np
import pandas as pd

from .sampling import ComplexAmplitudeField

logger = logging.getLogger(__name__)

FIELD_COLUMNS = ["x_dimless", "z_dimless", "re", "im", "intensity"]
TABLE_COLUMNS = [
    "species", "T_K", "L_m", "E_kin_eV", "z_focus0_m", "z_focus_prime0_m", "flags",
    "label", "type", "printed_z_focus0_m", "printed_z_focus_prime0_m", "E_free_fall_eV",
]

# 17 significant digits round-trip every double
FLOAT_FORMAT = "%.17g"


def field_to_frame(field: ComplexAmplitudeField, x_unit: float = 1.0, z_unit: float = 1.0) -> pd.DataFrame:
    """
    Flatten a field into one row per node, z-major then x.

    Args:
        field: Sampled amplitudes
        x_unit: Length that maps to one unit of x_dimless
        z_unit: Length that maps to one unit of z_dimless

    Returns:
        DataFrame with FIELD_COLUMNS
    """
    xs = field.grid.xs() / x_unit
    zs = field.grid.zs() / z_unit
    zz, xx = np.meshgrid(zs, xs, indexing="ij")
    amplitudes = field.amplitudes
    return pd.DataFrame({
        "x_dimless": xx.ravel(),
        "z_dimless": zz.ravel(),
        "re": amplitudes.real.ravel(),
        "im": amplitudes.imag.ravel(),
        "intensity": (np.abs(amplitudes) ** 2).ravel(),
    }, columns=FIELD_COLUMNS)


def table_to_frame(rows: Iterable[dict]) -> pd.DataFrame:
    """Table results (as dicts) in the fixed column order, flags joined by ';'."""
    records = []
    for row in rows:
        record = dict(row)
        record["flags"] = ";".join(record.get("flags", []))
        records.append(record)
    return pd.DataFrame.from_records(records, columns=TABLE_COLUMNS)


def write_csv(df: pd.DataFrame, out: Optional[str] = None) -> None:
    """Write a frame as comma-separated text with LF endings, to a file or stdout."""
    target = out if out else sys.stdout
    df.to_csv(target, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    if out:
        logger.info(f"Wrote {len(df)} rows to {out}")


def to_json_text(payload: Any) -> str:
    return json.dumps(payload, indent=2, allow_nan=True) + "\n"


def write_json(payload: Any, out: Optional[str] = None) -> None:
    """Write a JSON document to a file or stdout."""
    text = to_json_text(payload)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        logger.info(f"Wrote JSON report to {out}")
    else:
        sys.stdout.write(text)
