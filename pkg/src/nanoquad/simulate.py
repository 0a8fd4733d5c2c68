"""Closed-loop synthetic flight generation.

Controller -> wrench allocation -> rotor model -> RK4 plant, logged in
the benchmark CSV schema with the IMU specific-acceleration channels.
"""

from __future__ import annotations

import numpy as np
import pandas as pd

from . import dataio
from .controller import ControllerState, geometric_control
from .dynamics import continuous_dynamics, mixer_inverse, rk4_step
from .params import ControllerGains, NoiseSpec, RigidBodyParams, RotorParams
from .rotations import quat_mul, quat_normalize, quat_to_matrix, rotvec_to_quat
from .trajectories import ReferenceTrajectory, TrajectorySpec, generate


class SimulationDiverged(RuntimeError):
    pass


def simulate_flight(
    traj: TrajectorySpec | ReferenceTrajectory,
    gains: ControllerGains = ControllerGains(),
    bp: RigidBodyParams = RigidBodyParams(),
    rp: RotorParams = RotorParams(),
    noise: NoiseSpec = NoiseSpec(),
    drag: float = 0.0,
) -> pd.DataFrame:
    """Simulate one flight along a reference trajectory.

    Returns a uniform flight log in the dataset schema.  ``drag`` adds a
    linear body-drag term to the plant only (the logged data then contains
    an effect the nominal physics model does not explain).
    """
    ref = generate(traj) if isinstance(traj, TrajectorySpec) else traj
    n = len(ref)
    dt = float(ref.t[1] - ref.t[0])

    x = np.zeros(13)
    x[0:3] = ref.p[0]
    x[6:10] = [0.0, 0.0, 0.0, 1.0]
    cs = ControllerState()

    motors = np.zeros((n, 4))
    states = np.zeros((n, 13))
    accels = np.zeros((n, 3))
    saturated_steps = 0

    for k in range(n):
        wrench = geometric_control(
            x, ref.p[k], ref.v[k], ref.a[k], ref.yaw[k], gains, bp, cs, dt
        )
        u, sat = mixer_inverse(wrench, rp)
        saturated_steps += int(sat)

        states[k] = x
        motors[k] = u.omega
        # specific acceleration: R^T (vdot - g_vec)
        xdot = continuous_dynamics(x, u.omega, bp, rp, drag=drag)
        vdot = xdot[3:6]
        R = quat_to_matrix(x[6:10])
        accels[k] = R.T @ (vdot - np.array([0.0, 0.0, -bp.g]))

        if k + 1 < n:
            x = rk4_step(x, u.omega, dt, bp, rp, drag=drag)
            if not np.all(np.isfinite(x)) or np.linalg.norm(x[0:3]) > 100.0:
                raise SimulationDiverged(
                    f"state diverged at t = {ref.t[k]:.2f} s (|p| = {np.linalg.norm(x[0:3]):.1f})"
                )

    rng = np.random.default_rng(noise.seed)
    p_log = states[:, 0:3] + rng.normal(0.0, 1.0, (n, 3)) * noise.position
    v_log = states[:, 3:6] + rng.normal(0.0, 1.0, (n, 3)) * noise.velocity
    q_log = states[:, 6:10]
    if noise.quaternion_rotvec > 0:
        dq = rotvec_to_quat(rng.normal(0.0, noise.quaternion_rotvec, (n, 3)))
        q_log = quat_mul(q_log, dq)
    q_log = quat_normalize(q_log)
    w_log = states[:, 10:13] + rng.normal(0.0, 1.0, (n, 3)) * noise.omega
    a_log = accels + rng.normal(0.0, 1.0, (n, 3)) * noise.accel
    m_log = np.maximum(motors + rng.normal(0.0, 1.0, (n, 4)) * noise.motor, 0.0)

    df = dataio.frame_from_arrays(ref.t, m_log, p_log, v_log, q_log, w_log, a_log)
    df.attrs["saturated_steps"] = saturated_steps
    return df


def log_to_state_array(df: pd.DataFrame) -> np.ndarray:
    """(N, 13) state array from a uniform log."""
    cols = (
        dataio.POSITION_COLUMNS
        + dataio.VELOCITY_COLUMNS
        + dataio.QUATERNION_COLUMNS
        + dataio.OMEGA_COLUMNS
    )
    return df[cols].to_numpy(dtype=float)


def log_to_motor_array(df: pd.DataFrame) -> np.ndarray:
    return df[dataio.MOTOR_COLUMNS].to_numpy(dtype=float)
