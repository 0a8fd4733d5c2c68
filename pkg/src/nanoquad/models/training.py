"""Training by backpropagation through the multi-step rollout.

All models minimize the mean squared error of the normalized H-step
rollout against the target windows, with Adam and gradient-norm
clipping; everything runs in float64 so the exported weights drive the
numpy inference path without precision loss.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from ..params import DT, RigidBodyParams, RotorParams, TrainConfig
from .baselines import (
    FF_HIDDEN,
    LSTM_HIDDEN,
    LSTM_INIT_HIDDEN,
    FFParams,
    INPUT_IN,
    OUT,
    RecurrentParams,
    STATE_IN,
)
from .torch_phys import learn_step_t
from .windows import Normalizer, WindowDataset

_DTYPE = torch.float64


class TrainingDiverged(RuntimeError):
    pass


class ResidualMLP(nn.Module):
    def __init__(self, hidden=FF_HIDDEN):
        super().__init__()
        sizes = (STATE_IN + INPUT_IN, *hidden, OUT)
        self.layers = nn.ModuleList(
            nn.Linear(sizes[i], sizes[i + 1]) for i in range(len(sizes) - 1)
        )
        self.hidden = tuple(hidden)

    def forward(self, z):
        for layer in self.layers[:-1]:
            z = torch.tanh(layer(z))
        return self.layers[-1](z)


class ResidualLSTM(nn.Module):
    def __init__(self, hidden=LSTM_HIDDEN, init_hidden=LSTM_INIT_HIDDEN):
        super().__init__()
        self.hidden = hidden
        self.init_mlp = nn.Sequential(
            nn.Linear(STATE_IN, init_hidden), nn.Tanh(), nn.Linear(init_hidden, 2 * hidden)
        )
        self.cell = nn.LSTMCell(STATE_IN + INPUT_IN, hidden)
        self.readout = nn.Linear(hidden, OUT)


@dataclass
class RolloutModel:
    """A trainable model plus everything needed to roll it out."""

    kind: str                       # residual | lstm | hybrid
    net: nn.Module
    normalizer: Normalizer
    bp: RigidBodyParams = field(default_factory=RigidBodyParams)
    rp: RotorParams = field(default_factory=RotorParams)
    dt: float = DT

    def rollout(self, y0, u_seq):
        """(B, 12), (B, H, 4) -> (B, H, 12) open-loop predictions."""
        norm = self.normalizer
        y_mean = torch.as_tensor(norm.y_mean, dtype=_DTYPE)
        y_std = torch.as_tensor(norm.y_std, dtype=_DTYPE)
        dy_std = torch.as_tensor(norm.dy_std, dtype=_DTYPE)
        u_mean = torch.as_tensor(norm.u_mean, dtype=_DTYPE)
        u_std = torch.as_tensor(norm.u_std, dtype=_DTYPE)

        H = u_seq.shape[1]
        y = y0
        if self.kind == "lstm":
            hc = self.net.init_mlp((y - y_mean) / y_std)
            state = (hc[..., : self.net.hidden], hc[..., self.net.hidden :])
        preds = []
        for h in range(H):
            u = u_seq[:, h]
            z = torch.cat([(y - y_mean) / y_std, (u - u_mean) / u_std], dim=-1)
            if self.kind == "residual":
                y = y + self.net(z) * dy_std
            elif self.kind == "lstm":
                state = self.net.cell(z, state)
                y = y + self.net.readout(state[0]) * dy_std
            elif self.kind == "hybrid":
                correction = self.net(z) * dy_std
                y = learn_step_t(y, u, self.dt, self.bp, self.rp) + correction
            else:
                raise ValueError(f"unknown model kind {self.kind!r}")
            preds.append(y)
        return torch.stack(preds, dim=1)

    def loss(self, y0, u_seq, targets):
        y_std = torch.as_tensor(self.normalizer.y_std, dtype=_DTYPE)
        pred = self.rollout(y0, u_seq)
        return torch.mean(((pred - targets) / y_std) ** 2)

    def export(self):
        """Numpy parameter struct for the inference path."""
        with torch.no_grad():
            if self.kind in ("residual", "hybrid"):
                weights = [
                    (l.weight.numpy().copy(), l.bias.numpy().copy()) for l in self.net.layers
                ]
                return FFParams(weights, self.net.hidden)
            init_layers = [m for m in self.net.init_mlp if isinstance(m, nn.Linear)]
            return RecurrentParams(
                init_weights=[(l.weight.numpy().copy(), l.bias.numpy().copy()) for l in init_layers],
                W_ih=self.net.cell.weight_ih.numpy().copy(),
                W_hh=self.net.cell.weight_hh.numpy().copy(),
                b_ih=self.net.cell.bias_ih.numpy().copy(),
                b_hh=self.net.cell.bias_hh.numpy().copy(),
                readout=(self.net.readout.weight.numpy().copy(), self.net.readout.bias.numpy().copy()),
                hidden=self.net.hidden,
            )


def build_model(kind, normalizer: Normalizer, hidden=None,
                bp: RigidBodyParams = RigidBodyParams(),
                rp: RotorParams = RotorParams(), dt=DT, seed=0) -> RolloutModel:
    torch.manual_seed(seed)
    if kind in ("residual", "hybrid"):
        net = ResidualMLP(hidden or FF_HIDDEN)
        if kind == "hybrid":
            # residual correction starts at zero: last layer zeroed
            with torch.no_grad():
                net.layers[-1].weight.zero_()
                net.layers[-1].bias.zero_()
    elif kind == "lstm":
        net = ResidualLSTM(hidden or LSTM_HIDDEN)
    else:
        raise ValueError(f"unknown model kind {kind!r}")
    net.to(_DTYPE)
    return RolloutModel(kind=kind, net=net, normalizer=normalizer, bp=bp, rp=rp, dt=dt)


def train(model: RolloutModel, data: WindowDataset, cfg: TrainConfig):
    """Optimize a rollout model on a window dataset.

    Returns ``(numpy params, loss history)``; deterministic for a fixed
    seed and batch size.
    """
    if len(data) == 0:
        raise ValueError("empty training dataset")
    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)

    H = min(cfg.horizon, data.horizon)
    y0 = torch.as_tensor(data.y0, dtype=_DTYPE)
    u = torch.as_tensor(data.u[:, :H], dtype=_DTYPE)
    tgt = torch.as_tensor(data.targets[:, :H], dtype=_DTYPE)

    opt = torch.optim.Adam(model.net.parameters(), lr=cfg.learning_rate)
    history = []
    n = len(data)
    step = 0
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        for lo in range(0, n, cfg.batch_size):
            idx = order[lo : lo + cfg.batch_size]
            opt.zero_grad()
            loss = model.loss(y0[idx], u[idx], tgt[idx])
            if not torch.isfinite(loss):
                grad_norm = _grad_norm(model.net)
                raise TrainingDiverged(
                    f"non-finite loss at step {step} (grad norm {grad_norm:.3e})"
                )
            loss.backward()
            nn.utils.clip_grad_norm_(model.net.parameters(), cfg.grad_clip)
            opt.step()
            history.append(float(loss.detach()))
            step += 1
    return model.export(), history


def _grad_norm(net):
    total = 0.0
    for p in net.parameters():
        if p.grad is not None:
            total += float(p.grad.norm()) ** 2
    return total**0.5
