"""Rigid-body quadrotor dynamics, rotor wrench model, RK4 integration,
and the physics baseline predictor.

All functions are pure and broadcast over leading axes, so a batch of
states can be integrated in one call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import DT, RigidBodyParams, RotorParams
from .rotations import quat_normalize, rotate
from .states import (
    OMEGA_STATE,
    POS,
    QUAT,
    VEL,
    learn_to_state_array,
    state_to_learn_array,
)


@dataclass(frozen=True)
class MotorSpeeds:
    """Propeller angular speeds [rad/s], all nonnegative."""

    omega: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        if w.shape[-1] != 4 or np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("motor speeds must be 4 nonnegative finite values")
        object.__setattr__(self, "omega", w)


@dataclass(frozen=True)
class BodyWrench:
    """Total thrust [N] along body z and body-frame torque [N m]."""

    T: float
    tau: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tau", np.asarray(self.tau, dtype=float))


def _speeds(u):
    return u.omega if isinstance(u, MotorSpeeds) else np.asarray(u, dtype=float)


def mixer_matrix(rp: RotorParams) -> np.ndarray:
    """4x4 map from squared motor speeds to (T, tau_x, tau_y, tau_z)."""
    kF, kM, L = rp.kF, rp.kM, rp.L
    return np.array(
        [
            [kF, kF, kF, kF],
            [-kF * L, -kF * L, kF * L, kF * L],
            [-kF * L, kF * L, kF * L, -kF * L],
            [-kM, kM, -kM, kM],
        ]
    )


def rotor_wrench(u, rp: RotorParams) -> BodyWrench:
    """Quadratic rotor model: wrench generated by the four propellers."""
    s = _speeds(u) ** 2
    w = s @ mixer_matrix(rp).T
    return BodyWrench(T=w[..., 0], tau=w[..., 1:4])


def mixer_inverse(w: BodyWrench, rp: RotorParams):
    """Allocate a body wrench to motor speeds.

    Returns ``(MotorSpeeds, saturated)``; negative squared speeds are
    clamped to zero and flagged, in which case the wrench is not exactly
    realized.
    """
    a = np.asarray(w.T, dtype=float) / rp.kF
    b = np.asarray(w.tau[..., 0], dtype=float) / (rp.kF * rp.L)
    c = np.asarray(w.tau[..., 1], dtype=float) / (rp.kF * rp.L)
    d = np.asarray(w.tau[..., 2], dtype=float) / rp.kM
    s = 0.25 * np.stack([a - b - c - d, a - b + c + d, a + b + c - d, a + b - c + d], axis=-1)
    # flag only clamping beyond rounding noise of the linear solve
    tol = 1e-9 * (np.max(np.abs(s)) + 1e-300)
    saturated = bool(np.any(s < -tol))
    s = np.maximum(s, 0.0)
    return MotorSpeeds(np.sqrt(s)), saturated


def hover_speed(bp: RigidBodyParams, rp: RotorParams) -> float:
    """Per-motor speed balancing gravity."""
    return float(np.sqrt(bp.m * bp.g / (4.0 * rp.kF)))


def continuous_dynamics(x, u, bp: RigidBodyParams, rp: RotorParams,
                        frozen_omega=False, drag=0.0):
    """Time derivative of the 13-dim state (broadcasts over leading axes).

    ``drag`` adds a linear body-drag acceleration ``-drag * v`` (used only
    to generate synthetic data with a known unmodeled effect).
    """
    x = np.asarray(x, dtype=float)
    s = _speeds(u) ** 2
    w_ = s @ mixer_matrix(rp).T
    T, tau = w_[..., 0], w_[..., 1:4]

    q = quat_normalize(x[..., QUAT])
    v = x[..., VEL]
    om = x[..., OMEGA_STATE]

    thrust_world = rotate(q, np.stack([np.zeros_like(T), np.zeros_like(T), T], axis=-1))
    vdot = thrust_world / bp.m
    vdot = vdot - drag * v
    vdot = vdot + np.array([0.0, 0.0, -bp.g])

    # qdot = 1/2 q (x) (omega, 0), written out to avoid renormalization
    qx, qy, qz, qw = (q[..., i] for i in range(4))
    ox, oy, oz = (om[..., i] for i in range(3))
    qdot = 0.5 * np.stack(
        [
            qw * ox + qy * oz - qz * oy,
            qw * oy - qx * oz + qz * ox,
            qw * oz + qx * oy - qy * ox,
            -qx * ox - qy * oy - qz * oz,
        ],
        axis=-1,
    )

    if frozen_omega:
        omdot = np.zeros_like(om)
    else:
        J = bp.J_vec
        Jom = J * om
        omdot = (tau - np.cross(om, Jom)) / J

    return np.concatenate([v, vdot, qdot, omdot], axis=-1)


def rk4_step(x, u, dt, bp: RigidBodyParams, rp: RotorParams,
             frozen_omega=False, drag=0.0):
    """Classical RK4 step with zero-order hold input; quaternion renormalized."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    x = np.asarray(x, dtype=float)

    def f(z):
        return continuous_dynamics(z, u, bp, rp, frozen_omega=frozen_omega, drag=drag)

    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    out[..., QUAT] = quat_normalize(out[..., QUAT])
    return out


def learn_step(y, u, dt, bp: RigidBodyParams, rp: RotorParams,
               frozen_omega=True, drag=0.0):
    """One discrete transition in the 12-dim learning representation."""
    x = learn_to_state_array(y)
    x = rk4_step(x, u, dt, bp, rp, frozen_omega=frozen_omega, drag=drag)
    return state_to_learn_array(x)


def physics_predict(y0, u_seq, H, mode="frozen_omega",
                    bp: RigidBodyParams = RigidBodyParams(),
                    rp: RotorParams = RotorParams(),
                    dt=DT, drag=0.0):
    """Open-loop physics rollout of the learning state.

    ``y0``: ``(..., 12)``; ``u_seq``: ``(H, ..., 4)`` motor speeds held
    constant over each step.  Returns ``(H, ..., 12)`` predictions for
    h = 1..H.  ``mode`` is ``"full"`` or ``"frozen_omega"`` (the default
    baseline, which holds the body rates at their initial value).
    """
    if mode not in ("full", "frozen_omega"):
        raise ValueError(f"unknown physics mode {mode!r}")
    if H < 1:
        raise ValueError("H must be >= 1")
    u_seq = np.asarray(u_seq, dtype=float)
    if u_seq.shape[0] != H:
        raise ValueError("input sequence length must equal H")
    frozen = mode == "frozen_omega"
    y = np.asarray(y0, dtype=float)
    out = np.empty((H,) + y.shape, dtype=float)
    for h in range(H):
        y = learn_step(y, u_seq[h], dt, bp, rp, frozen_omega=frozen, drag=drag)
        out[h] = y
    return out
