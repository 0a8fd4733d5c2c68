"""State representations.

Two layouts are used throughout:

* ``State`` — the 13-dim benchmark output ``[p, v, q, w]`` with a unit
  quaternion attitude (scalar-last).
* ``LearnState`` — the 12-dim learning representation ``[p, v, r, w]``
  with a rotation-vector attitude.

Both also exist as flat numpy arrays (``(..., 13)`` / ``(..., 12)``)
which is what the batched code paths operate on; the dataclasses are the
scalar convenience layer on top.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rotations import quat_normalize, quat_to_rotvec, rotvec_to_quat

# column slices of the flat layouts
POS = slice(0, 3)
VEL = slice(3, 6)
QUAT = slice(6, 10)   # State only
ATT = slice(6, 9)     # LearnState rotation vector
OMEGA_STATE = slice(10, 13)
OMEGA_LEARN = slice(9, 12)

STATE_DIM = 13
LEARN_DIM = 12
INPUT_DIM = 4


@dataclass(frozen=True)
class State:
    """13-dim quadrotor state: world position/velocity, attitude, body rates."""

    p: np.ndarray
    v: np.ndarray
    q: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        for name in ("p", "v", "q", "w"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not np.all(np.isfinite(self.as_array())):
            raise ValueError("non-finite state component")
        if abs(np.linalg.norm(self.q) - 1.0) > 1e-6:
            raise ValueError("attitude quaternion is not unit-norm")
        object.__setattr__(self, "q", quat_normalize(self.q))

    def as_array(self):
        return np.concatenate([self.p, self.v, self.q, self.w])

    @classmethod
    def from_array(cls, x):
        x = np.asarray(x, dtype=float)
        return cls(p=x[POS], v=x[VEL], q=x[QUAT], w=x[OMEGA_STATE])


@dataclass(frozen=True)
class LearnState:
    """12-dim learning state with canonical rotation-vector attitude."""

    p: np.ndarray
    v: np.ndarray
    r: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        for name in ("p", "v", "r", "w"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not np.all(np.isfinite(self.as_array())):
            raise ValueError("non-finite state component")

    def as_array(self):
        return np.concatenate([self.p, self.v, self.r, self.w])

    @classmethod
    def from_array(cls, y):
        y = np.asarray(y, dtype=float)
        return cls(p=y[POS], v=y[VEL], r=y[ATT], w=y[OMEGA_LEARN])


def state_to_learn_array(x):
    """(..., 13) state array -> (..., 12) learning array."""
    x = np.asarray(x, dtype=float)
    r = quat_to_rotvec(x[..., QUAT])
    return np.concatenate([x[..., POS], x[..., VEL], r, x[..., OMEGA_STATE]], axis=-1)


def learn_to_state_array(y):
    """(..., 12) learning array -> (..., 13) state array."""
    y = np.asarray(y, dtype=float)
    q = rotvec_to_quat(y[..., ATT])
    return np.concatenate([y[..., POS], y[..., VEL], q, y[..., OMEGA_LEARN]], axis=-1)


def pack(x: State) -> LearnState:
    """State -> LearnState (attitude via the log map)."""
    return LearnState.from_array(state_to_learn_array(x.as_array()))


def unpack(y: LearnState) -> State:
    """LearnState -> State (attitude via the exp map)."""
    return State.from_array(learn_to_state_array(y.as_array()))
