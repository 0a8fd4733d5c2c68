"""Fixed-horizon input/output windows and channel normalization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .. import dataio
from ..params import HORIZON
from ..rotations import quat_to_rotvec
from ..states import INPUT_DIM, LEARN_DIM


def log_to_learn_array(df: pd.DataFrame) -> np.ndarray:
    """(N, 12) learning-state array from a uniform log."""
    p = df[dataio.POSITION_COLUMNS].to_numpy(dtype=float)
    v = df[dataio.VELOCITY_COLUMNS].to_numpy(dtype=float)
    q = df[dataio.QUATERNION_COLUMNS].to_numpy(dtype=float)
    w = df[dataio.OMEGA_COLUMNS].to_numpy(dtype=float)
    return np.concatenate([p, v, quat_to_rotvec(q), w], axis=-1)


@dataclass
class Normalizer:
    """Per-channel statistics fitted on training data only.

    State channels are standardized; increments and inputs are scaled by
    their std only (no mean shift), so a zero network output denormalizes
    to exactly zero.
    """

    y_mean: np.ndarray
    y_std: np.ndarray
    dy_std: np.ndarray
    u_mean: np.ndarray
    u_std: np.ndarray

    @classmethod
    def fit(cls, y: np.ndarray, u: np.ndarray) -> "Normalizer":
        dy = np.diff(y, axis=0)

        def safe_std(x):
            s = x.std(axis=0)
            return np.where(s > 0.0, s, 1.0)

        return cls(
            y_mean=y.mean(axis=0),
            y_std=safe_std(y),
            dy_std=safe_std(dy),
            u_mean=u.mean(axis=0),
            u_std=safe_std(u),
        )

    @classmethod
    def identity(cls) -> "Normalizer":
        return cls(
            y_mean=np.zeros(LEARN_DIM),
            y_std=np.ones(LEARN_DIM),
            dy_std=np.ones(LEARN_DIM),
            u_mean=np.zeros(INPUT_DIM),
            u_std=np.ones(INPUT_DIM),
        )

    def norm_y(self, y):
        return (y - self.y_mean) / self.y_std

    def norm_u(self, u):
        return (u - self.u_mean) / self.u_std

    def denorm_dy(self, dy):
        return dy * self.dy_std

    def to_dict(self):
        return {k: getattr(self, k).tolist() for k in
                ("y_mean", "y_std", "dy_std", "u_mean", "u_std")}

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: np.asarray(v, dtype=float) for k, v in d.items()})


@dataclass
class WindowDataset:
    """Stride-1 windows: initial states, input sequences, target sequences."""

    y0: np.ndarray       # (N, 12)
    u: np.ndarray        # (N, H, 4)
    targets: np.ndarray  # (N, H, 12)
    horizon: int
    normalizer: Normalizer = field(default_factory=Normalizer.identity)

    def __len__(self):
        return len(self.y0)


def make_windows(logs, H: int = HORIZON, normalizer: Normalizer | None = None) -> WindowDataset:
    """Build a window dataset from one or more uniform logs.

    Each log of length T contributes T - H windows.  If no normalizer is
    given, one is fitted on the supplied logs.
    """
    if isinstance(logs, pd.DataFrame):
        logs = [logs]
    y0_l, u_l, tgt_l, y_all, u_all = [], [], [], [], []
    for df in logs:
        y = log_to_learn_array(df)
        u = df[dataio.MOTOR_COLUMNS].to_numpy(dtype=float)
        T = len(y)
        if T < H + 1:
            raise ValueError(f"log too short for horizon {H}: {T} samples")
        n = T - H
        idx = np.arange(n)
        y0_l.append(y[idx])
        u_l.append(np.stack([u[idx + k] for k in range(H)], axis=1))
        tgt_l.append(np.stack([y[idx + 1 + k] for k in range(H)], axis=1))
        y_all.append(y)
        u_all.append(u)
    if normalizer is None:
        normalizer = Normalizer.fit(np.concatenate(y_all), np.concatenate(u_all))
    return WindowDataset(
        y0=np.concatenate(y0_l),
        u=np.concatenate(u_l),
        targets=np.concatenate(tgt_l),
        horizon=H,
        normalizer=normalizer,
    )
