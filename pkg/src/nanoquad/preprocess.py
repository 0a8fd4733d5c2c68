"""Flight-log preprocessing: timestamp sync, retiming, segment extraction,
motor/acceleration alignment, gap filling, and zero-phase filtering.
"""

from __future__ import annotations

import numpy as np
import pandas as pd
from scipy.signal import butter, filtfilt

from . import dataio
from .params import FilterSpec
from .rotations import quat_normalize, quat_to_rotvec, rotvec_to_quat

DEFAULT_MAX_LAG_S = 2.0


class PreprocessError(ValueError):
    pass


def estimate_lag_xcorr(a, b, max_lag=None):
    """Integer lag (samples) maximizing cross-correlation of zero-mean copies.

    Positive lag means ``b`` is delayed relative to ``a``
    (``b[n] ~ a[n - lag]``).  Ties break toward the smallest |lag|.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) < 32 or len(b) < 32:
        raise PreprocessError("series too short for lag estimation (need >= 32)")
    a = a - a.mean()
    b = b - b.mean()
    if a.std() == 0.0 or b.std() == 0.0:
        raise PreprocessError("constant input: lag is undefined")
    corr = np.correlate(b, a, mode="full")  # index len(a)-1 <-> lag 0
    lags = np.arange(-len(a) + 1, len(b))
    if max_lag is not None:
        keep = np.abs(lags) <= max_lag
        corr, lags = corr[keep], lags[keep]
    best = corr.max()
    candidates = lags[np.isclose(corr, best, rtol=0.0, atol=1e-12 * max(abs(best), 1.0))]
    return int(candidates[np.argmin(np.abs(candidates))])


def estimate_position_lag(p_a, p_b, max_lag=None):
    """Mean of per-axis lags between two (N, 3) position signals, rounded."""
    lags = [estimate_lag_xcorr(p_a[:, i], p_b[:, i], max_lag) for i in range(3)]
    return int(round(float(np.mean(lags))))


def shift_series(x, lag):
    """Shift forward by ``lag`` samples, holding the edge value."""
    x = np.asarray(x, dtype=float)
    if lag == 0:
        return x.copy()
    out = np.empty_like(x)
    if lag > 0:
        out[lag:] = x[:-lag]
        out[:lag] = x[0]
    else:
        out[:lag] = x[-lag:]
        out[lag:] = x[-1]
    return out


def resample_retime(raw: dataio.RawLog, fs=100.0, t_grid=None) -> pd.DataFrame:
    """Resample every raw channel onto a common uniform grid.

    Regular channels are linearly interpolated; channels flagged as
    irregular are retimed with nearest-neighbor interpolation, which also
    fills dropped packets with the closest available measurement.
    """
    if not raw.channels:
        raise PreprocessError("raw log has no channels")
    if t_grid is None:
        t0 = max(t[0] for t, _ in raw.channels.values())
        t1 = min(t[-1] for t, _ in raw.channels.values())
        if t1 <= t0:
            raise PreprocessError("channels do not overlap in time")
        n = int(np.floor((t1 - t0) * fs)) + 1
        t_grid = t0 + np.arange(n) / fs
    out = {"t": t_grid}
    for name, (t, v) in raw.channels.items():
        if t[0] > t_grid[0] + 1e-12 or t[-1] < t_grid[-1] - 1e-12:
            raise PreprocessError(f"channel {name!r} does not cover the requested span")
        if name in raw.irregular:
            idx = np.searchsorted(t, t_grid)
            idx = np.clip(idx, 1, len(t) - 1)
            left = t_grid - t[idx - 1]
            right = t[idx] - t_grid
            nearest = np.where(left <= right, idx - 1, idx)
            out[name] = v[nearest]
        else:
            out[name] = np.interp(t_grid, t, v)
    return pd.DataFrame(out)


def extract_flight_segment(df: pd.DataFrame, reference_p: np.ndarray) -> tuple[pd.DataFrame, tuple[int, int]]:
    """Crop to the maximal contiguous interval where ||p_ref|| > 0."""
    norm = np.linalg.norm(np.asarray(reference_p, dtype=float), axis=-1)
    active = norm > 0.0
    if not np.any(active):
        raise PreprocessError("reference position is zero everywhere: empty flight segment")
    # longest contiguous run of active samples
    edges = np.diff(np.concatenate([[0], active.astype(int), [0]]))
    starts = np.nonzero(edges == 1)[0]
    ends = np.nonzero(edges == -1)[0]
    i = int(np.argmax(ends - starts))
    lo, hi = int(starts[i]), int(ends[i])
    return df.iloc[lo:hi].reset_index(drop=True), (lo, hi)


def align_motors_to_accel(df: pd.DataFrame, max_lag=None) -> tuple[pd.DataFrame, int]:
    """Shift motor channels to maximize xcorr(az_body, sum of squared speeds)."""
    az = df["az_body"].to_numpy(dtype=float)
    s = (df[dataio.MOTOR_COLUMNS].to_numpy(dtype=float) ** 2).sum(axis=1)
    # lag > 0 means the thrust proxy is delayed w.r.t. az; undo it
    shift = -estimate_lag_xcorr(az, s, max_lag)
    out = df.copy()
    for col in dataio.MOTOR_COLUMNS:
        out[col] = shift_series(df[col].to_numpy(dtype=float), shift)
    return out, shift


def fill_gaps(series, max_gap=10):
    """Linearly interpolate NaN runs of <= max_gap samples; leave longer runs."""
    x = np.asarray(series, dtype=float).copy()
    isnan = np.isnan(x)
    if not isnan.any():
        return x
    edges = np.diff(np.concatenate([[0], isnan.astype(int), [0]]))
    starts = np.nonzero(edges == 1)[0]
    ends = np.nonzero(edges == -1)[0]
    idx = np.arange(len(x))
    for lo, hi in zip(starts, ends):
        if hi - lo > max_gap or lo == 0 or hi == len(x):
            continue  # too long, or no anchor on one side
        x[lo:hi] = np.interp(idx[lo:hi], [lo - 1, hi], [x[lo - 1], x[hi]])
    return x


def butter_filtfilt(series, cutoff, order=4, fs=100.0):
    """Zero-phase Butterworth low-pass (forward-backward, odd-reflection pad)."""
    x = np.asarray(series, dtype=float)
    if len(x) <= 6 * order:
        raise PreprocessError(f"series too short to filter (need > {6 * order} samples)")
    b, a = butter(order, cutoff, fs=fs)
    return filtfilt(b, a, x, padtype="odd", padlen=3 * order)


def filter_quaternions(q_series, cutoff, order=4, fs=100.0):
    """Low-pass attitude via the log map: sign-align, filter rotation
    vectors component-wise, map back; outputs stay unit-norm."""
    q = np.asarray(q_series, dtype=float)
    flips = np.cumprod(np.where(np.sum(q[1:] * q[:-1], axis=-1) < 0.0, -1.0, 1.0))
    q = np.concatenate([q[:1], q[1:] * flips[:, None]], axis=0)
    r = quat_to_rotvec(q, canonical=False)
    r_f = np.stack([butter_filtfilt(r[:, i], cutoff, order, fs) for i in range(3)], axis=-1)
    return quat_normalize(rotvec_to_quat(r_f))


def apply_filters(df: pd.DataFrame, cfg: FilterSpec) -> pd.DataFrame:
    """Per-group low-pass filtering of a uniform log at the Table cutoffs."""
    out = df.copy()
    groups = [
        (dataio.POSITION_COLUMNS, cfg.position),
        (dataio.VELOCITY_COLUMNS, cfg.velocity),
        (dataio.OMEGA_COLUMNS, cfg.velocity),
        (dataio.ACCEL_COLUMNS, cfg.acceleration),
        (dataio.MOTOR_COLUMNS, cfg.motor),
    ]
    for cols, cutoff in groups:
        for c in cols:
            out[c] = butter_filtfilt(df[c].to_numpy(dtype=float), cutoff, cfg.order, cfg.fs)
    q = df[dataio.QUATERNION_COLUMNS].to_numpy(dtype=float)
    out[dataio.QUATERNION_COLUMNS] = filter_quaternions(q, cfg.quaternion, cfg.order, cfg.fs)
    return out


def preprocess_pipeline(
    raw: dataio.RawLog,
    cfg: FilterSpec = FilterSpec(),
    reference_p: np.ndarray | None = None,
    onboard_position: dict[str, str] | None = None,
    max_gap: int = 10,
    max_lag_s: float = DEFAULT_MAX_LAG_S,
) -> tuple[pd.DataFrame, dict]:
    """Full preprocessing chain on an asynchronous raw log.

    Order: timestamp sync (if an onboard position estimate is provided) ->
    resample/retime -> flight-segment extraction (if a reference is
    provided) -> motor/acceleration alignment -> gap filling -> per-group
    filtering.  Returns the uniform log and a metadata record of every
    lag and crop applied.
    """
    meta: dict = {"filters": {
        "position": cfg.position, "velocity": cfg.velocity,
        "acceleration": cfg.acceleration, "motor": cfg.motor,
        "quaternion": cfg.quaternion, "order": cfg.order, "fs": cfg.fs,
    }}
    max_lag = int(round(max_lag_s * cfg.fs))

    try:
        df = resample_retime(raw, fs=cfg.fs)
    except PreprocessError as e:
        raise PreprocessError(f"resample: {e}") from e

    if onboard_position:
        # align the mocap position group to the onboard estimate
        mocap = df[dataio.POSITION_COLUMNS].to_numpy(dtype=float)
        onboard = df[[onboard_position[c] for c in dataio.POSITION_COLUMNS]].to_numpy(dtype=float)
        lag = estimate_position_lag(onboard, mocap, max_lag)
        for col in dataio.POSITION_COLUMNS + dataio.QUATERNION_COLUMNS:
            df[col] = shift_series(df[col].to_numpy(dtype=float), -lag)
        meta["timestamp_sync_lag"] = lag
    else:
        meta["timestamp_sync_lag"] = 0

    if reference_p is not None:
        try:
            df, (lo, hi) = extract_flight_segment(df, reference_p)
        except PreprocessError as e:
            raise PreprocessError(f"segment extraction: {e}") from e
        meta["crop"] = [lo, hi]

    try:
        df, motor_lag = align_motors_to_accel(df, max_lag)
    except PreprocessError as e:
        raise PreprocessError(f"motor alignment: {e}") from e
    meta["motor_accel_lag"] = motor_lag

    for col in df.columns:
        if col == "t":
            continue
        df[col] = fill_gaps(df[col].to_numpy(dtype=float), max_gap)

    try:
        df = apply_filters(df, cfg)
    except PreprocessError as e:
        raise PreprocessError(f"filtering: {e}") from e
    return df, meta
