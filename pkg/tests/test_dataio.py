"""CSV flight-log schema I/O."""

import json

import numpy as np
import pandas as pd
import pytest

from nanoquad import dataio


def tiny_log(n=20):
    rng = np.random.default_rng(0)
    q = rng.normal(size=(n, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    return dataio.frame_from_arrays(
        t=np.arange(n) / 100.0,
        motors=rng.uniform(1000, 3000, (n, 4)),
        p=rng.normal(size=(n, 3)),
        v=rng.normal(size=(n, 3)),
        q=q,
        w=rng.normal(size=(n, 3)),
        a_body=rng.normal(size=(n, 3)),
    )


def test_roundtrip_lossless(tmp_path):
    df = tiny_log()
    path = tmp_path / "log.csv"
    dataio.write_csv(df, path)
    back = dataio.read_csv(path)
    for c in dataio.CORE_COLUMNS:
        np.testing.assert_array_equal(back[c].to_numpy(), df[c].to_numpy())


def test_missing_column_reported(tmp_path):
    df = tiny_log().drop(columns=["qw"])
    path = tmp_path / "bad.csv"
    df.to_csv(path, index=False)
    with pytest.raises(dataio.SchemaError, match="qw"):
        dataio.read_csv(path)


def test_parse_failure_reports_row_and_column(tmp_path):
    df = tiny_log().astype(object)
    df.loc[7, "vz"] = "oops"
    path = tmp_path / "bad.csv"
    df.to_csv(path, index=False)
    with pytest.raises(dataio.SchemaError, match=r"vz.*row 7"):
        dataio.read_csv(path)


def test_nonmonotonic_time_rejected(tmp_path):
    df = tiny_log()
    df.loc[5, "t"] = df.loc[3, "t"]
    with pytest.raises(dataio.SchemaError, match="increasing"):
        dataio.write_csv(df, tmp_path / "x.csv")


def test_extra_columns_preserved(tmp_path):
    df = tiny_log()
    df["battery_v"] = 3.7
    path = tmp_path / "log.csv"
    dataio.write_csv(df, path)
    back = dataio.read_csv(path)
    assert "battery_v" in back.columns


def test_missing_values_roundtrip_as_nan(tmp_path):
    df = tiny_log()
    df.loc[4, "wx"] = np.nan
    path = tmp_path / "log.csv"
    dataio.write_csv(df, path)
    # empty field in the file, NaN in memory
    line = path.read_text().splitlines()[5]
    assert ",," in line
    back = dataio.read_csv(path)
    assert np.isnan(back.loc[4, "wx"])


def test_sidecar(tmp_path):
    path = tmp_path / "log.csv"
    dataio.write_sidecar(path, {"lag": 3, "config_hash": "abc"})
    meta = json.loads((tmp_path / "log.json").read_text())
    assert meta == {"lag": 3, "config_hash": "abc"}


def test_rawlog_validation():
    raw = dataio.RawLog()
    with pytest.raises(ValueError, match="increasing"):
        raw.add("x", [0.0, 0.0, 1.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError, match="equal-length"):
        raw.add("x", [0.0, 1.0], [1.0, 2.0, 3.0])
    raw.add("x", [0.0, 1.0, 2.0], [1.0, 2.0, 3.0], irregular=True)
    assert "x" in raw.irregular
