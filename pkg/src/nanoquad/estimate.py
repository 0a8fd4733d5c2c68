"""Least-squares identification of the rotor thrust/moment coefficients."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .params import RigidBodyParams


class UnidentifiableError(ValueError):
    """Raised when the regressor carries no excitation."""


@dataclass(frozen=True)
class EstimationReport:
    kF: float
    kM: float
    kF_residual_rms: float
    kM_residual_rms: float
    samples: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    def table(self) -> str:
        return "\n".join(
            [
                f"{'coefficient':<14}{'value':>14}{'residual RMS':>16}",
                f"{'kF [N s^2]':<14}{self.kF:>14.4e}{self.kF_residual_rms:>16.4e}",
                f"{'kM [N m s^2]':<14}{self.kM:>14.4e}{self.kM_residual_rms:>16.4e}",
                f"samples: {self.samples}",
            ]
        )


def reconstruct_torque(w_series, J, dt):
    """Body torque from gyro rates: J*wdot + w x (J*w), central differences."""
    w = np.asarray(w_series, dtype=float)
    if len(w) < 3:
        raise ValueError("need at least 3 samples to differentiate")
    J = np.asarray(J, dtype=float)
    wdot = np.gradient(w, dt, axis=0)
    return wdot * J + np.cross(w, w * J)


def _scalar_lsq(target, regressor):
    denom = float(regressor @ regressor)
    if denom == 0.0:
        raise UnidentifiableError("regressor is identically zero")
    k = float(target @ regressor) / denom
    rms = float(np.sqrt(np.mean((target - k * regressor) ** 2)))
    return k, rms


def fit_kF(az_imu, motors, m):
    """Thrust coefficient from the body-z force balance m*az = kF * sum(w_i^2)."""
    az = np.asarray(az_imu, dtype=float)
    motors = np.asarray(motors, dtype=float)
    if len(az) < 100:
        raise ValueError("need >= 100 samples")
    s = (motors**2).sum(axis=1)
    if not np.any(s > 0):
        raise UnidentifiableError("all-zero motor data")
    k, rms = _scalar_lsq(m * az, s)
    return k, rms


def fit_kM(tau_z, motors):
    """Moment coefficient from tau_z = kM * (-w1^2 + w2^2 - w3^2 + w4^2)."""
    tau_z = np.asarray(tau_z, dtype=float)
    motors = np.asarray(motors, dtype=float)
    s = motors**2
    reg = -s[:, 0] + s[:, 1] - s[:, 2] + s[:, 3]
    if np.max(np.abs(reg)) <= 1e-12 * max(float(np.max(s)), 1.0):
        raise UnidentifiableError("no yaw excitation: kM is unidentifiable")
    return _scalar_lsq(tau_z, reg)


def estimate_coefficients(logs, bp: RigidBodyParams = RigidBodyParams(), dt=0.01) -> EstimationReport:
    """Fit kF and kM jointly over a list of uniform logs (training split)."""
    from . import dataio  # local import to keep this module numpy-only at top

    az_all, s_motors, tz_all = [], [], []
    n = 0
    for df in logs:
        motors = df[dataio.MOTOR_COLUMNS].to_numpy(dtype=float)
        az_all.append(df["az_body"].to_numpy(dtype=float))
        w = df[dataio.OMEGA_COLUMNS].to_numpy(dtype=float)
        tz_all.append(reconstruct_torque(w, bp.J_vec, dt)[:, 2])
        s_motors.append(motors)
        n += len(df)
    motors = np.concatenate(s_motors)
    kF, kF_rms = fit_kF(np.concatenate(az_all), motors, bp.m)
    kM, kM_rms = fit_kM(np.concatenate(tz_all), motors)
    return EstimationReport(kF=kF, kM=kM, kF_residual_rms=kF_rms, kM_residual_rms=kM_rms, samples=n)
