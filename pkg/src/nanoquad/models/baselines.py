"""The five baseline predictors (inference path, numpy).

All learned models predict state increments and accumulate them over the
rollout; a zero-weight network therefore reproduces the naive constant
predictor exactly, and a zero residual on top of the physics step
reproduces the physics baseline exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit as _sigmoid

from ..dynamics import learn_step
from ..params import DT, RigidBodyParams, RotorParams
from ..rotations import quat_to_rotvec, rotvec_to_quat
from ..states import ATT
from .windows import Normalizer

# default layouts, sized to land near the published parameter budgets
FF_HIDDEN = (122, 122)
LSTM_HIDDEN = 64
LSTM_INIT_HIDDEN = 24

STATE_IN = 12
INPUT_IN = 4
OUT = 12


def _mlp_shapes(sizes):
    return [((sizes[i + 1], sizes[i]), (sizes[i + 1],)) for i in range(len(sizes) - 1)]


@dataclass
class FFParams:
    """Fully connected residual network: input 16 (state + motors), output 12."""

    weights: list  # [(W, b), ...], tanh between layers, linear output
    hidden: tuple = FF_HIDDEN

    @classmethod
    def zeros(cls, hidden=FF_HIDDEN):
        sizes = (STATE_IN + INPUT_IN, *hidden, OUT)
        return cls([(np.zeros(w), np.zeros(b)) for w, b in _mlp_shapes(sizes)], hidden)

    @classmethod
    def random(cls, rng, hidden=FF_HIDDEN, scale=None):
        sizes = (STATE_IN + INPUT_IN, *hidden, OUT)
        ws = []
        for (wshape, bshape) in _mlp_shapes(sizes):
            s = scale if scale is not None else 1.0 / np.sqrt(wshape[1])
            ws.append((rng.normal(0.0, s, wshape), rng.normal(0.0, s, bshape)))
        return cls(ws, hidden)

    def forward(self, z):
        for i, (W, b) in enumerate(self.weights):
            z = z @ W.T + b
            if i < len(self.weights) - 1:
                z = np.tanh(z)
        return z

    def param_count(self):
        return sum(W.size + b.size for W, b in self.weights)


@dataclass
class RecurrentParams:
    """Gated recurrent (LSTM) residual model with a learned initial state.

    ``init_weights`` maps the 12-dim state to (h0, c0); ``W_ih/W_hh`` are
    the stacked gate matrices in [input, forget, cell, output] order;
    ``readout`` is the linear map from hidden state to state increment.
    """

    init_weights: list          # MLP 12 -> init_hidden -> 2*hidden
    W_ih: np.ndarray            # (4*hidden, 16)
    W_hh: np.ndarray            # (4*hidden, hidden)
    b_ih: np.ndarray
    b_hh: np.ndarray
    readout: tuple              # (W (12, hidden), b (12,))
    hidden: int = LSTM_HIDDEN

    @classmethod
    def zeros(cls, hidden=LSTM_HIDDEN, init_hidden=LSTM_INIT_HIDDEN):
        init_sizes = (STATE_IN, init_hidden, 2 * hidden)
        return cls(
            init_weights=[(np.zeros(w), np.zeros(b)) for w, b in _mlp_shapes(init_sizes)],
            W_ih=np.zeros((4 * hidden, STATE_IN + INPUT_IN)),
            W_hh=np.zeros((4 * hidden, hidden)),
            b_ih=np.zeros(4 * hidden),
            b_hh=np.zeros(4 * hidden),
            readout=(np.zeros((OUT, hidden)), np.zeros(OUT)),
            hidden=hidden,
        )

    @classmethod
    def random(cls, rng, hidden=LSTM_HIDDEN, init_hidden=LSTM_INIT_HIDDEN, scale=None):
        def mat(shape):
            s = scale if scale is not None else 1.0 / np.sqrt(shape[-1])
            return rng.normal(0.0, s, shape)

        init_sizes = (STATE_IN, init_hidden, 2 * hidden)
        return cls(
            init_weights=[(mat(w), mat(b)) for w, b in _mlp_shapes(init_sizes)],
            W_ih=mat((4 * hidden, STATE_IN + INPUT_IN)),
            W_hh=mat((4 * hidden, hidden)),
            b_ih=mat((4 * hidden,)),
            b_hh=mat((4 * hidden,)),
            readout=(mat((OUT, hidden)), mat((OUT,))),
            hidden=hidden,
        )

    def init_state(self, y_norm):
        z = y_norm
        for i, (W, b) in enumerate(self.init_weights):
            z = z @ W.T + b
            if i < len(self.init_weights) - 1:
                z = np.tanh(z)
        return z[..., : self.hidden], z[..., self.hidden :]

    def cell(self, z, h, c):
        gates = z @ self.W_ih.T + self.b_ih + h @ self.W_hh.T + self.b_hh
        n = self.hidden
        i = _sigmoid(gates[..., 0 * n : 1 * n])
        f = _sigmoid(gates[..., 1 * n : 2 * n])
        g = np.tanh(gates[..., 2 * n : 3 * n])
        o = _sigmoid(gates[..., 3 * n : 4 * n])
        c = f * c + i * g
        h = o * np.tanh(c)
        return h, c

    def param_count(self):
        n = sum(W.size + b.size for W, b in self.init_weights)
        n += self.W_ih.size + self.W_hh.size + self.b_ih.size + self.b_hh.size
        n += self.readout[0].size + self.readout[1].size
        return n




def _wrap_attitude(y):
    """Re-canonicalize rotation vectors only where ||r|| exceeded pi.

    Untouched rows are returned bit-for-bit, preserving the exact
    equivalence of zero-weight networks with their reference baselines.
    """
    r = y[..., ATT]
    over = np.linalg.norm(r, axis=-1) > np.pi
    if not np.any(over):
        return y
    y = y.copy()
    y[..., ATT] = np.where(over[..., None], quat_to_rotvec(rotvec_to_quat(r)), r)
    return y


def naive_predict(y0, H):
    """Constant-hold baseline: every horizon step repeats the initial state."""
    y0 = np.asarray(y0, dtype=float)
    return np.broadcast_to(y0, (H,) + y0.shape).copy()


def ff_residual_predict(params: FFParams, norm: Normalizer, y0, u_seq, H):
    """Rolling feed-forward residual model."""
    y = np.asarray(y0, dtype=float)
    u_seq = np.asarray(u_seq, dtype=float)
    out = np.empty((H,) + y.shape)
    for h in range(H):
        z = np.concatenate([norm.norm_y(y), norm.norm_u(u_seq[h])], axis=-1)
        y = _wrap_attitude(y + norm.denorm_dy(params.forward(z)))
        out[h] = y
    return out


def recurrent_predict(params: RecurrentParams, norm: Normalizer, y0, u_seq, H):
    """LSTM residual model with state-inferred initial hidden state."""
    y = np.asarray(y0, dtype=float)
    u_seq = np.asarray(u_seq, dtype=float)
    h_st, c_st = params.init_state(norm.norm_y(y))
    out = np.empty((H,) + y.shape)
    W_out, b_out = params.readout
    for h in range(H):
        z = np.concatenate([norm.norm_y(y), norm.norm_u(u_seq[h])], axis=-1)
        h_st, c_st = params.cell(z, h_st, c_st)
        y = _wrap_attitude(y + norm.denorm_dy(h_st @ W_out.T + b_out))
        out[h] = y
    return out


def hybrid_predict(res: FFParams, norm: Normalizer, y0, u_seq, H,
                   bp: RigidBodyParams = RigidBodyParams(),
                   rp: RotorParams = RotorParams(),
                   dt=DT, mode="frozen_omega"):
    """Physics step plus learned residual correction."""
    y = np.asarray(y0, dtype=float)
    u_seq = np.asarray(u_seq, dtype=float)
    frozen = mode == "frozen_omega"
    out = np.empty((H,) + y.shape)
    for h in range(H):
        z = np.concatenate([norm.norm_y(y), norm.norm_u(u_seq[h])], axis=-1)
        correction = norm.denorm_dy(res.forward(z))
        y = _wrap_attitude(learn_step(y, u_seq[h], dt, bp, rp, frozen_omega=frozen) + correction)
        out[h] = y
    return out
