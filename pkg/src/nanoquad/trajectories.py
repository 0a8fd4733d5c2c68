"""Reference trajectory generators: Square, Random, Melon, Chirp.

Every generator emits ``duration * sample_rate + 1`` uniformly spaced
samples of desired position, velocity, acceleration, and yaw (always 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .params import SAMPLE_RATE

TRAJECTORY_KINDS = ("square", "random", "melon", "chirp")

DEFAULT_DURATIONS = {"square": 19.0, "random": 60.0, "melon": 65.0, "chirp": 60.0}


@dataclass(frozen=True)
class TrajectorySpec:
    kind: str
    duration: float | None = None
    sample_rate: float = SAMPLE_RATE
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in TRAJECTORY_KINDS:
            raise ValueError(f"unknown trajectory kind {self.kind!r}")
        dur = self.duration if self.duration is not None else DEFAULT_DURATIONS[self.kind]
        if dur <= 0:
            raise ValueError("duration must be positive")
        object.__setattr__(self, "duration", float(dur))


@dataclass(frozen=True)
class ReferenceTrajectory:
    """Sampled reference: arrays of shape (N,) / (N, 3)."""

    t: np.ndarray
    p: np.ndarray
    v: np.ndarray
    a: np.ndarray
    yaw: np.ndarray

    def __len__(self):
        return len(self.t)


def _time_grid(duration, fs):
    n = int(round(duration * fs)) + 1
    return np.arange(n) / fs


def _smooth_step(tau):
    """7th-order profile with zero velocity/acceleration/jerk at both ends."""
    s = 35 * tau**4 - 84 * tau**5 + 70 * tau**6 - 20 * tau**7
    ds = 140 * tau**3 - 420 * tau**4 + 420 * tau**5 - 140 * tau**6
    dds = 420 * tau**2 - 1680 * tau**3 + 2100 * tau**4 - 840 * tau**5
    return s, ds, dds


def _quintic(p0, v0, a0, p1, v1, a1, T):
    """Coefficients of the quintic joining full boundary states over [0, T]."""
    A = np.array(
        [
            [1, 0, 0, 0, 0, 0],
            [0, 1, 0, 0, 0, 0],
            [0, 0, 2, 0, 0, 0],
            [1, T, T**2, T**3, T**4, T**5],
            [0, 1, 2 * T, 3 * T**2, 4 * T**3, 5 * T**4],
            [0, 0, 2, 6 * T, 12 * T**2, 20 * T**3],
        ]
    )
    rhs = np.stack([p0, v0, a0, p1, v1, a1])  # (6, 3)
    return np.linalg.solve(A, rhs)  # (6, 3)


def _eval_poly(coef, t):
    powers = np.stack([t**k for k in range(6)], axis=-1)          # (N, 6)
    dpow = np.stack([k * t ** max(k - 1, 0) for k in range(6)], axis=-1)
    ddpow = np.stack([k * (k - 1) * t ** max(k - 2, 0) for k in range(6)], axis=-1)
    return powers @ coef, dpow @ coef, ddpow @ coef


def gen_square(spec: TrajectorySpec) -> ReferenceTrajectory:
    """Two stacked 1 m squares 1 m apart: 1 s per edge, 1 s hover between moves."""
    z_lo, z_hi = 1.0, 2.0
    corners_lo = [(-0.5, -0.5, z_lo), (0.5, -0.5, z_lo), (0.5, 0.5, z_lo), (-0.5, 0.5, z_lo)]
    corners_hi = [(c[0], c[1], z_hi) for c in corners_lo]
    waypoints = (
        corners_lo + [corners_lo[0]]          # lower loop
        + [corners_hi[0]]                     # ascend
        + corners_hi[1:] + [corners_hi[0]]    # upper loop
        + [corners_lo[0]]                     # descend
    )
    # 10 moves of 1 s separated by 9 hovers of 1 s -> 19 s
    segments = []  # (t0, kind, p_from, p_to)
    t0 = 0.0
    for i in range(len(waypoints) - 1):
        segments.append((t0, "move", np.array(waypoints[i]), np.array(waypoints[i + 1])))
        t0 += 1.0
        if i < len(waypoints) - 2:
            segments.append((t0, "hover", np.array(waypoints[i + 1]), np.array(waypoints[i + 1])))
            t0 += 1.0

    t = _time_grid(spec.duration, spec.sample_rate)
    p = np.empty((len(t), 3))
    v = np.zeros((len(t), 3))
    a = np.zeros((len(t), 3))
    starts = np.array([s[0] for s in segments])
    idx = np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(segments) - 1)
    for k, (ts, kind, pa, pb) in enumerate(segments):
        sel = idx == k
        if not np.any(sel):
            continue
        if kind == "hover":
            p[sel] = pa
        else:
            tau = np.clip(t[sel] - ts, 0.0, 1.0)
            s, ds, dds = _smooth_step(tau)
            d = pb - pa
            p[sel] = pa + s[:, None] * d
            v[sel] = ds[:, None] * d
            a[sel] = dds[:, None] * d
    return ReferenceTrajectory(t=t, p=p, v=v, a=a, yaw=np.zeros(len(t)))


def gen_random(spec: TrajectorySpec) -> ReferenceTrajectory:
    """52 uniform waypoints in a 1 x 1 x 0.5 m box at (0, 0, 1.5), cubic-spline path."""
    n_wp = spec.params.get("waypoints", 52)
    rng = np.random.default_rng(spec.seed)
    lo = np.array([-0.5, -0.5, 1.25])
    hi = np.array([0.5, 0.5, 1.75])
    wp = rng.uniform(lo, hi, size=(n_wp, 3))
    t_wp = np.linspace(0.0, spec.duration, n_wp)
    spline = CubicSpline(t_wp, wp, axis=0, bc_type="natural")
    t = _time_grid(spec.duration, spec.sample_rate)
    return ReferenceTrajectory(
        t=t, p=spline(t), v=spline(t, 1), a=spline(t, 2), yaw=np.zeros(len(t))
    )


def gen_melon(spec: TrajectorySpec) -> ReferenceTrajectory:
    """0.75 m circle at 2.5 rad/s in a plane rotating about x at 0.4 rad/s."""
    R = spec.params.get("radius", 0.75)
    w_c = spec.params.get("omega_circle", 2.5)
    w_p = spec.params.get("omega_plane", 0.4)
    center = np.array(spec.params.get("center", (0.0, 0.0, 1.5)))
    t_return = spec.params.get("return_time", 2.0)
    t = _time_grid(spec.duration, spec.sample_rate)
    t1 = spec.duration - t_return

    def main_segment(tt):
        C, S = np.cos(w_c * tt), np.sin(w_c * tt)
        c, s = np.cos(w_p * tt), np.sin(w_p * tt)
        p = np.stack([R * C, -R * s * S, R * c * S], axis=-1) + center
        v = np.stack(
            [
                -R * w_c * S,
                -R * (w_p * c * S + w_c * s * C),
                R * (-w_p * s * S + w_c * c * C),
            ],
            axis=-1,
        )
        a = np.stack(
            [
                -R * w_c**2 * C,
                -R * (2 * w_p * w_c * c * C - (w_p**2 + w_c**2) * s * S),
                R * (-2 * w_p * w_c * s * C - (w_p**2 + w_c**2) * c * S),
            ],
            axis=-1,
        )
        return p, v, a

    p = np.empty((len(t), 3))
    v = np.empty((len(t), 3))
    a = np.empty((len(t), 3))
    mask = t <= t1
    p[mask], v[mask], a[mask] = main_segment(t[mask])
    if np.any(~mask):
        # return segment in polar form: the radius shrinks along a
        # minimum-jerk profile while both angles coast to rest, so the
        # instantaneous radius stays <= R throughout
        tt = t[~mask] - t1
        tau = tt / t_return
        s, ds, dds = _smooth_step(tau)
        Rr = R * (1.0 - s)
        dRr = -R * ds / t_return
        ddRr = -R * dds / t_return**2
        th1, ps1 = w_c * t1, w_p * t1
        cth = _quintic(
            np.array([th1, ps1, 0.0]), np.array([w_c, w_p, 0.0]), np.zeros(3),
            np.array([th1 + 0.5 * w_c * t_return, ps1 + 0.5 * w_p * t_return, 0.0]),
            np.zeros(3), np.zeros(3), t_return,
        )
        ang, dang, ddang = _eval_poly(cth, tt)
        th, ps = ang[:, 0], ang[:, 1]
        dth, dps = dang[:, 0], dang[:, 1]
        ddth, ddps = ddang[:, 0], ddang[:, 1]
        C, S = np.cos(th), np.sin(th)
        c, s_ = np.cos(ps), np.sin(ps)
        d = np.stack([C, -s_ * S, c * S], axis=-1)
        d_th = np.stack([-S, -s_ * C, c * C], axis=-1)
        d_ps = np.stack([np.zeros_like(C), -c * S, -s_ * S], axis=-1)
        d_thth = -d
        d_thps = np.stack([np.zeros_like(C), -c * C, -s_ * C], axis=-1)
        d_psps = np.stack([np.zeros_like(C), s_ * S, -c * S], axis=-1)
        ddir = d_th * dth[:, None] + d_ps * dps[:, None]
        dddir = (
            d_thth * (dth**2)[:, None]
            + 2.0 * d_thps * (dth * dps)[:, None]
            + d_psps * (dps**2)[:, None]
            + d_th * ddth[:, None]
            + d_ps * ddps[:, None]
        )
        p[~mask] = center + Rr[:, None] * d
        v[~mask] = dRr[:, None] * d + Rr[:, None] * ddir
        a[~mask] = ddRr[:, None] * d + 2.0 * dRr[:, None] * ddir + Rr[:, None] * dddir
    return ReferenceTrajectory(t=t, p=p, v=v, a=a, yaw=np.zeros(len(t)))


def gen_chirp(spec: TrajectorySpec) -> ReferenceTrajectory:
    """Independent 0.5 m sinusoids per axis, frequency swept 0.1 -> 0.5 Hz."""
    A = spec.params.get("amplitude", 0.5)
    f0 = spec.params.get("f0", 0.1)
    f1 = spec.params.get("f1", 0.5)
    center = np.array(spec.params.get("center", (0.0, 0.0, 1.5)))
    T = spec.duration
    rng = np.random.default_rng(spec.seed)
    phase0 = rng.uniform(0.0, 2.0 * np.pi, size=3)
    t = _time_grid(T, spec.sample_rate)
    phi = 2.0 * np.pi * (f0 * t + (f1 - f0) * t**2 / (2.0 * T))
    dphi = 2.0 * np.pi * (f0 + (f1 - f0) * t / T)
    ddphi = 2.0 * np.pi * (f1 - f0) / T
    arg = phi[:, None] + phase0[None, :]
    p = A * np.sin(arg) + center
    v = A * dphi[:, None] * np.cos(arg)
    a = A * (ddphi * np.cos(arg) - dphi[:, None] ** 2 * np.sin(arg))
    return ReferenceTrajectory(t=t, p=p, v=v, a=a, yaw=np.zeros(len(t)))


_GENERATORS = {
    "square": gen_square,
    "random": gen_random,
    "melon": gen_melon,
    "chirp": gen_chirp,
}


def generate(spec: TrajectorySpec) -> ReferenceTrajectory:
    return _GENERATORS[spec.kind](spec)
