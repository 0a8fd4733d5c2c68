"""Physical parameters, controller gains, and configuration records."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field

import numpy as np

GRAVITY = 9.81
SAMPLE_RATE = 100.0
DT = 1.0 / SAMPLE_RATE
HORIZON = 50

# Effective arm length is not published for this airframe; this value is
# the 46 mm motor-to-motor half diagonal projected on the body axes and
# is a documented configuration default, not a measured constant.
DEFAULT_ARM_LENGTH = 0.046 / np.sqrt(2.0)


@dataclass(frozen=True)
class RigidBodyParams:
    """Mass, diagonal inertia, gravity; defaults for the 45 g airframe."""

    m: float = 0.045
    J: tuple[float, float, float] = (2.3951e-5, 2.3951e-5, 3.2347e-5)
    g: float = GRAVITY

    def __post_init__(self):
        if self.m <= 0 or any(j <= 0 for j in self.J):
            raise ValueError("mass and inertia diagonals must be positive")

    @property
    def J_vec(self):
        return np.asarray(self.J, dtype=float)


@dataclass(frozen=True)
class RotorParams:
    """Quadratic rotor model coefficients and effective arm length."""

    kF: float = 3.72e-8
    kM: float = 7.73e-11
    L: float = DEFAULT_ARM_LENGTH

    def __post_init__(self):
        if self.kF <= 0 or self.kM <= 0 or self.L <= 0:
            raise ValueError("rotor coefficients must be positive")


@dataclass(frozen=True)
class ControllerGains:
    """Diagonal gains of the position/attitude tracking controller.

    Defaults were tuned once against the noise-free simulator; the
    firmware gains are not public.
    """

    Kp: tuple[float, float, float] = (1.3, 1.3, 1.5)
    Ki: tuple[float, float, float] = (0.15, 0.15, 0.18)
    Kd: tuple[float, float, float] = (0.48, 0.48, 0.55)
    KR: tuple[float, float, float] = (1.0e-2, 1.0e-2, 5.0e-3)
    KRi: tuple[float, float, float] = (2.0e-4, 2.0e-4, 1.0e-4)
    Kw: tuple[float, float, float] = (1.4e-3, 1.4e-3, 1.1e-3)

    def __post_init__(self):
        for name in ("Kp", "Ki", "Kd", "KR", "KRi", "Kw"):
            if any(g < 0 for g in getattr(self, name)):
                raise ValueError(f"negative gain in {name}")


@dataclass(frozen=True)
class FilterSpec:
    """Per-group low-pass cutoffs [Hz] for the preprocessing pipeline."""

    position: float = 10.0
    velocity: float = 18.0       # linear and angular rates
    acceleration: float = 25.0
    motor: float = 20.0
    quaternion: float = 12.0     # applied in rotation-vector space
    order: int = 4
    fs: float = SAMPLE_RATE

    def __post_init__(self):
        for c in (self.position, self.velocity, self.acceleration, self.motor, self.quaternion):
            if not 0.0 < c < self.fs / 2.0:
                raise ValueError("cutoff must lie in (0, fs/2)")


@dataclass(frozen=True)
class NoiseSpec:
    """Additive Gaussian sensor noise (std dev per channel group); zero by default."""

    position: float = 0.0
    velocity: float = 0.0
    quaternion_rotvec: float = 0.0  # applied as a rotation-vector perturbation
    omega: float = 0.0
    accel: float = 0.0
    motor: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    batch_size: int = 256
    learning_rate: float = 1e-3
    seed: int = 0
    grad_clip: float = 1.0
    horizon: int = HORIZON

    def __post_init__(self):
        if min(self.epochs, self.batch_size, self.horizon) < 1 or self.learning_rate <= 0:
            raise ValueError("training hyperparameters must be positive")


def config_hash(obj) -> str:
    """Stable short hash of any dataclass/dict config tree."""
    if hasattr(obj, "__dataclass_fields__"):
        obj = asdict(obj)
    blob = json.dumps(obj, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class RunConfig:
    """Top-level configuration for the CLI."""

    body: RigidBodyParams = field(default_factory=RigidBodyParams)
    rotor: RotorParams = field(default_factory=RotorParams)
    gains: ControllerGains = field(default_factory=ControllerGains)
    filters: FilterSpec = field(default_factory=FilterSpec)
    train: TrainConfig = field(default_factory=TrainConfig)
    horizon: int = HORIZON
    fs: float = SAMPLE_RATE
    seed: int = 0

    def hash(self) -> str:
        return config_hash(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        def tup(x):
            return tuple(x) if isinstance(x, list) else x

        kwargs = {}
        for key, sub in (
            ("body", RigidBodyParams),
            ("rotor", RotorParams),
            ("gains", ControllerGains),
            ("filters", FilterSpec),
            ("train", TrainConfig),
        ):
            if key in d:
                kwargs[key] = sub(**{k: tup(v) for k, v in d[key].items()})
        for key in ("horizon", "fs", "seed"):
            if key in d:
                kwargs[key] = d[key]
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return asdict(self)
