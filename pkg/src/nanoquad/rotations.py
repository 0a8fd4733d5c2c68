"""Quaternion / SO(3) utilities shared by every other module.

Quaternions are scalar-last ``[qx, qy, qz, qw]`` numpy arrays of shape
``(..., 4)``; rotation vectors are axis*angle arrays of shape ``(..., 3)``
in radians.  All functions broadcast over leading axes and return fresh
arrays (inputs are never mutated).
"""

from __future__ import annotations

import numpy as np

IDENTITY_QUAT = np.array([0.0, 0.0, 0.0, 1.0])

_SMALL_ANGLE = 1e-8


def quat_normalize(q):
    """Rescale to unit norm."""
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def quat_conj(q):
    q = np.asarray(q, dtype=float)
    return q * np.array([-1.0, -1.0, -1.0, 1.0])


def quat_canonical(q):
    """Flip sign so the scalar part is nonnegative (double-cover choice)."""
    q = np.asarray(q, dtype=float)
    sign = np.where(q[..., 3:4] < 0.0, -1.0, 1.0)
    return q * sign


def quat_mul(a, b):
    """Hamilton product a (x) b, renormalized."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ax, ay, az, aw = (a[..., i] for i in range(4))
    bx, by, bz, bw = (b[..., i] for i in range(4))
    out = np.stack(
        [
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
            aw * bw - ax * bx - ay * by - az * bz,
        ],
        axis=-1,
    )
    return quat_normalize(out)


def rotate(q, v):
    """Apply the rotation R(q) to a vector: body -> world for attitude q."""
    q = np.asarray(q, dtype=float)
    v = np.asarray(v, dtype=float)
    qv = q[..., :3]
    qw = q[..., 3:4]
    # v' = v + 2*qw*(qv x v) + 2*qv x (qv x v)
    t = 2.0 * np.cross(qv, v)
    return v + qw * t + np.cross(qv, t)


def quat_to_matrix(q):
    """Rotation matrix of shape (..., 3, 3)."""
    q = np.asarray(q, dtype=float)
    x, y, z, w = (q[..., i] for i in range(4))
    row0 = np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)], axis=-1)
    row1 = np.stack([2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)], axis=-1)
    row2 = np.stack([2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)], axis=-1)
    return np.stack([row0, row1, row2], axis=-2)


def quat_to_rotvec(q, canonical=True):
    """Logarithmic map: r = 2*atan2(||qv||, qw) * qv/||qv||.

    With ``canonical=True`` the quaternion sign is first chosen so that
    qw >= 0, which keeps ||r|| <= pi.  Pass ``canonical=False`` for
    sign-aligned time series where continuity matters more.
    """
    q = np.asarray(q, dtype=float)
    if canonical:
        q = quat_canonical(q)
    qv = q[..., :3]
    qw = q[..., 3]
    n = np.linalg.norm(qv, axis=-1)
    angle = 2.0 * np.arctan2(n, qw)
    small = n < _SMALL_ANGLE
    # first-order branch: r ~= 2*qv/qw near identity
    safe_n = np.where(small, 1.0, n)
    scale = np.where(small, 2.0 / np.where(qw == 0.0, 1.0, qw), angle / safe_n)
    return qv * scale[..., None]


def rotvec_to_quat(r):
    """Exponential map, inverse of :func:`quat_to_rotvec`."""
    r = np.asarray(r, dtype=float)
    angle = np.linalg.norm(r, axis=-1)
    half = 0.5 * angle
    small = angle < _SMALL_ANGLE
    safe = np.where(small, 1.0, angle)
    # sin(a/2)/a -> 1/2 as a -> 0
    k = np.where(small, 0.5, np.sin(half) / safe)
    qv = r * k[..., None]
    qw = np.cos(half)[..., None]
    return quat_normalize(np.concatenate([qv, qw], axis=-1))


def rotvec_canonicalize(r):
    """Wrap a rotation vector back onto the ball of radius pi."""
    return quat_to_rotvec(rotvec_to_quat(r))


def geodesic_error(q, qhat):
    """Shortest-arc angle between two orientations, in [0, pi] rad."""
    rel = quat_mul(quat_conj(q), qhat)
    rel = quat_canonical(rel)
    n = np.linalg.norm(rel[..., :3], axis=-1)
    return 2.0 * np.arctan2(n, rel[..., 3])


def random_unit_quaternions(n, rng):
    """Uniform random rotations (normalized 4d Gaussians)."""
    q = rng.standard_normal((n, 4))
    return quat_normalize(q)
