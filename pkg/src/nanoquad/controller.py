"""Geometric position/attitude tracking controller.

Outer loop builds a desired force vector from PID position feedback plus
feedforward; the inner loop tracks the induced desired attitude on SO(3)
with a PD + integral law on the rotation error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import BodyWrench
from .params import ControllerGains, RigidBodyParams
from .rotations import quat_to_matrix

_F_EPS = 1e-9


@dataclass
class ControllerState:
    """Integrators and the last valid desired attitude (mutated in place)."""

    int_ep: np.ndarray = field(default_factory=lambda: np.zeros(3))
    int_eR: np.ndarray = field(default_factory=lambda: np.zeros(3))
    last_Rd: np.ndarray = field(default_factory=lambda: np.eye(3))
    degenerate: bool = False


def _vee(S):
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def desired_attitude(F_d, yaw):
    """Rotation with z-axis along F_d and heading yaw."""
    z_d = F_d / np.linalg.norm(F_d)
    x_c = np.array([np.cos(yaw), np.sin(yaw), 0.0])
    y_d = np.cross(z_d, x_c)
    y_d = y_d / np.linalg.norm(y_d)
    x_d = np.cross(y_d, z_d)
    return np.stack([x_d, y_d, z_d], axis=1)


def geometric_control(x, ref_p, ref_v, ref_a, ref_yaw,
                      gains: ControllerGains, bp: RigidBodyParams,
                      cs: ControllerState, dt) -> BodyWrench:
    """One controller update; ``x`` is the 13-dim state array.

    Integrator states in ``cs`` are advanced by ``dt * error``.
    """
    p, v = x[0:3], x[3:6]
    R = quat_to_matrix(x[6:10])
    omega = x[10:13]

    e_p = ref_p - p
    e_v = ref_v - v
    cs.int_ep = cs.int_ep + dt * e_p
    F_d = (
        np.asarray(gains.Kp) * e_p
        + np.asarray(gains.Ki) * cs.int_ep
        + np.asarray(gains.Kd) * e_v
        + bp.m * (ref_a + np.array([0.0, 0.0, bp.g]))
    )

    z_B = R[:, 2]
    T = float(F_d @ z_B)

    if np.linalg.norm(F_d) < _F_EPS:
        R_d = cs.last_Rd
        cs.degenerate = True
    else:
        R_d = desired_attitude(F_d, ref_yaw)
        cs.last_Rd = R_d
        cs.degenerate = False

    e_R = 0.5 * _vee(R_d.T @ R - R.T @ R_d)
    cs.int_eR = cs.int_eR + dt * e_R
    e_w = omega  # omega_d = 0 for the fixed-yaw references
    tau = (
        -np.asarray(gains.KR) * e_R
        - np.asarray(gains.KRi) * cs.int_eR
        - np.asarray(gains.Kw) * e_w
    )
    return BodyWrench(T=T, tau=tau)
