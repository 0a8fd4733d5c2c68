"""Differentiable (torch) mirror of the physics transition, used to train
the hybrid model by backpropagation through the rollout."""

from __future__ import annotations

import torch

from ..params import RigidBodyParams, RotorParams

_EPS = 1e-12


def rotvec_to_quat_t(r):
    angle = torch.linalg.norm(r, dim=-1, keepdim=True)
    half = 0.5 * angle
    small = angle < 1e-8
    safe = torch.where(small, torch.ones_like(angle), angle)
    k = torch.where(small, torch.full_like(angle, 0.5), torch.sin(half) / safe)
    return torch.cat([r * k, torch.cos(half)], dim=-1)


def quat_to_rotvec_t(q):
    sign = torch.where(q[..., 3:4] < 0.0, -1.0, 1.0)
    q = q * sign
    qv = q[..., :3]
    n = torch.linalg.norm(qv, dim=-1, keepdim=True)
    angle = 2.0 * torch.arctan2(n, q[..., 3:4])
    small = n < 1e-8
    safe_n = torch.where(small, torch.ones_like(n), n)
    scale = torch.where(small, 2.0 / torch.clamp(q[..., 3:4], min=_EPS), angle / safe_n)
    return qv * scale


def _qnormalize(q):
    return q / torch.linalg.norm(q, dim=-1, keepdim=True)


def _rotate(q, v):
    qv, qw = q[..., :3], q[..., 3:4]
    t = 2.0 * torch.cross(qv, v, dim=-1)
    return v + qw * t + torch.cross(qv, t, dim=-1)


def _deriv(x, u, bp: RigidBodyParams, rp: RotorParams, frozen_omega, drag):
    s = u**2
    T = rp.kF * s.sum(dim=-1, keepdim=True)
    v = x[..., 3:6]
    q = _qnormalize(x[..., 6:10])
    om = x[..., 10:13]

    zeros = torch.zeros_like(T)
    thrust = torch.cat([zeros, zeros, T], dim=-1)
    g_vec = torch.tensor([0.0, 0.0, -bp.g], dtype=x.dtype, device=x.device)
    vdot = _rotate(q, thrust) / bp.m - drag * v + g_vec

    qx, qy, qz, qw = (q[..., i] for i in range(4))
    ox, oy, oz = (om[..., i] for i in range(3))
    qdot = 0.5 * torch.stack(
        [
            qw * ox + qy * oz - qz * oy,
            qw * oy - qx * oz + qz * ox,
            qw * oz + qx * oy - qy * ox,
            -qx * ox - qy * oy - qz * oz,
        ],
        dim=-1,
    )

    if frozen_omega:
        omdot = torch.zeros_like(om)
    else:
        kFL = rp.kF * rp.L
        tau = torch.stack(
            [
                kFL * (-s[..., 0] - s[..., 1] + s[..., 2] + s[..., 3]),
                kFL * (-s[..., 0] + s[..., 1] + s[..., 2] - s[..., 3]),
                rp.kM * (-s[..., 0] + s[..., 1] - s[..., 2] + s[..., 3]),
            ],
            dim=-1,
        )
        J = torch.tensor(bp.J, dtype=x.dtype, device=x.device)
        Jom = J * om
        omdot = (tau - torch.cross(om, Jom, dim=-1)) / J

    return torch.cat([v, vdot, qdot, omdot], dim=-1)


def rk4_step_t(x, u, dt, bp, rp, frozen_omega=True, drag=0.0):
    k1 = _deriv(x, u, bp, rp, frozen_omega, drag)
    k2 = _deriv(x + 0.5 * dt * k1, u, bp, rp, frozen_omega, drag)
    k3 = _deriv(x + 0.5 * dt * k2, u, bp, rp, frozen_omega, drag)
    k4 = _deriv(x + dt * k3, u, bp, rp, frozen_omega, drag)
    out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    q = _qnormalize(out[..., 6:10])
    return torch.cat([out[..., :6], q, out[..., 10:13]], dim=-1)


def learn_step_t(y, u, dt, bp, rp, frozen_omega=True, drag=0.0):
    """One physics transition on the 12-dim learning state (batched)."""
    q = rotvec_to_quat_t(y[..., 6:9])
    x = torch.cat([y[..., :6], q, y[..., 9:12]], dim=-1)
    x = rk4_step_t(x, u, dt, bp, rp, frozen_omega=frozen_omega, drag=drag)
    r = quat_to_rotvec_t(x[..., 6:10])
    return torch.cat([x[..., :6], r, x[..., 10:13]], dim=-1)
