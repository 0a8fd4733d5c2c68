"""Flight-log I/O in the benchmark CSV schema.

A uniform log is a pandas DataFrame with the 19 core columns below at a
fixed 100 Hz rate.  Floats are serialized with 17 significant digits so
write -> read roundtrips are lossless; empty fields mark missing samples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

MOTOR_COLUMNS = ["m1_rads", "m2_rads", "m3_rads", "m4_rads"]
POSITION_COLUMNS = ["x", "y", "z"]
VELOCITY_COLUMNS = ["vx", "vy", "vz"]
QUATERNION_COLUMNS = ["qx", "qy", "qz", "qw"]
OMEGA_COLUMNS = ["wx", "wy", "wz"]
ACCEL_COLUMNS = ["ax_body", "ay_body", "az_body"]

CORE_COLUMNS = (
    ["t"]
    + MOTOR_COLUMNS
    + POSITION_COLUMNS
    + VELOCITY_COLUMNS
    + QUATERNION_COLUMNS
    + OMEGA_COLUMNS
    + ACCEL_COLUMNS
)

OUTPUT_COLUMNS = POSITION_COLUMNS + VELOCITY_COLUMNS + QUATERNION_COLUMNS + OMEGA_COLUMNS


class SchemaError(ValueError):
    """Raised when a file does not match the flight-log schema."""


@dataclass
class RawLog:
    """Asynchronous per-channel series with independent timestamps."""

    channels: dict[str, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)
    irregular: set[str] = field(default_factory=set)

    def add(self, name, t, values, irregular=False):
        t = np.asarray(t, dtype=float)
        values = np.asarray(values, dtype=float)
        if t.ndim != 1 or t.shape != values.shape:
            raise ValueError(f"channel {name}: time and values must be equal-length 1d")
        if np.any(np.diff(t) <= 0):
            raise ValueError(f"channel {name}: timestamps must be strictly increasing")
        self.channels[name] = (t, values)
        if irregular:
            self.irregular.add(name)


def validate_schema(df: pd.DataFrame):
    missing = [c for c in CORE_COLUMNS if c not in df.columns]
    if missing:
        raise SchemaError(f"missing mandatory column(s): {', '.join(missing)}")
    t = df["t"].to_numpy(dtype=float)
    if np.any(~np.isfinite(t)):
        raise SchemaError("non-finite timestamps")
    if np.any(np.diff(t) <= 0):
        raise SchemaError("timestamps are not strictly increasing")


def read_csv(path) -> pd.DataFrame:
    """Read a flight log, validating the 19-column core schema.

    Unknown extra columns are preserved; empty fields become NaN.
    """
    path = Path(path)
    df = pd.read_csv(path, float_precision="round_trip")
    for col in df.columns:
        if col in CORE_COLUMNS:
            try:
                df[col] = pd.to_numeric(df[col], errors="raise")
            except (ValueError, TypeError):
                bad = pd.to_numeric(df[col], errors="coerce")
                row = int(np.nonzero(bad.isna().to_numpy() & df[col].notna().to_numpy())[0][0])
                raise SchemaError(
                    f"{path.name}: cannot parse column {col!r} at data row {row}"
                ) from None
    validate_schema(df)
    return df


def write_csv(df: pd.DataFrame, path):
    validate_schema(df)
    df.to_csv(path, index=False, float_format="%.17g", na_rep="")


def write_sidecar(path, metadata: dict):
    """JSON metadata next to a CSV artifact."""
    Path(path).with_suffix(".json").write_text(json.dumps(metadata, indent=2, default=str))


def frame_from_arrays(t, motors, p, v, q, w, a_body) -> pd.DataFrame:
    data = {"t": t}
    for cols, arr in (
        (MOTOR_COLUMNS, motors),
        (POSITION_COLUMNS, p),
        (VELOCITY_COLUMNS, v),
        (QUATERNION_COLUMNS, q),
        (OMEGA_COLUMNS, w),
        (ACCEL_COLUMNS, a_body),
    ):
        for i, c in enumerate(cols):
            data[c] = np.asarray(arr)[:, i]
    return pd.DataFrame(data, columns=CORE_COLUMNS)
