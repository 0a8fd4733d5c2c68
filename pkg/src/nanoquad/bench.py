"""Multi-horizon open-loop evaluation protocol and model comparison."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import pandas as pd

from . import dataio
from .dynamics import physics_predict
from .models.baselines import (
    FFParams,
    RecurrentParams,
    ff_residual_predict,
    hybrid_predict,
    naive_predict,
    recurrent_predict,
)
from .models.windows import Normalizer, log_to_learn_array
from .params import DT, HORIZON, RigidBodyParams, RotorParams
from .rotations import geodesic_error, rotvec_to_quat
from .states import ATT, OMEGA_LEARN, POS, VEL

CHANNELS = ("p", "v", "w", "R")


def step_errors(y, yhat):
    """Instantaneous errors (e_p, e_v, e_w, e_R) between 13-dim states."""
    y = np.asarray(y, dtype=float)
    yhat = np.asarray(yhat, dtype=float)
    e_p = np.linalg.norm(y[..., 0:3] - yhat[..., 0:3], axis=-1)
    e_v = np.linalg.norm(y[..., 3:6] - yhat[..., 3:6], axis=-1)
    e_w = np.linalg.norm(y[..., 10:13] - yhat[..., 10:13], axis=-1)
    e_R = geodesic_error(y[..., 6:10], yhat[..., 6:10])
    return e_p, e_v, e_w, e_R


@dataclass
class HorizonMetrics:
    """MAE curves over h = 1..H for the four error channels."""

    mae: dict[str, np.ndarray]  # channel -> (H,)
    window_count: int

    @property
    def horizon(self):
        return len(next(iter(self.mae.values())))

    def cumulative(self, channel):
        return float(self.mae[channel].sum())

    def at(self, channel, h):
        return float(self.mae[channel][h - 1])

    def to_dict(self):
        d = {c: self.mae[c].tolist() for c in CHANNELS}
        d["cumulative"] = {c: self.cumulative(c) for c in CHANNELS}
        d["window_count"] = self.window_count
        return d

    @classmethod
    def average(cls, metrics_list):
        """Equal-weight average of per-run curves."""
        H = metrics_list[0].horizon
        if any(m.horizon != H for m in metrics_list):
            raise ValueError("mismatched horizons")
        mae = {
            c: np.mean([m.mae[c] for m in metrics_list], axis=0) for c in CHANNELS
        }
        return cls(mae=mae, window_count=sum(m.window_count for m in metrics_list))


@dataclass
class RunResult:
    model_id: str
    trajectory_ids: list
    metrics: HorizonMetrics
    config_hash: str = ""
    elapsed_s: float = 0.0


def make_predictor(kind, params=None, normalizer: Normalizer | None = None,
                   bp: RigidBodyParams = RigidBodyParams(),
                   rp: RotorParams = RotorParams(), dt=DT, mode="frozen_omega"):
    """Batched predictor: (y0 (N,12), u (N,H,4), H) -> (N, H, 12)."""
    norm = normalizer or Normalizer.identity()

    def predict(y0, u, H):
        u_hf = np.swapaxes(np.asarray(u, dtype=float), 0, 1)  # (H, N, 4)
        if kind == "naive":
            out = naive_predict(y0, H)
        elif kind == "physics":
            out = physics_predict(y0, u_hf, H, mode=mode, bp=bp, rp=rp, dt=dt)
        elif kind == "residual":
            out = ff_residual_predict(params, norm, y0, u_hf, H)
        elif kind == "lstm":
            out = recurrent_predict(params, norm, y0, u_hf, H)
        elif kind == "hybrid":
            out = hybrid_predict(params, norm, y0, u_hf, H, bp=bp, rp=rp, dt=dt, mode=mode)
        else:
            raise ValueError(f"unknown model kind {kind!r}")
        return np.swapaxes(out, 0, 1)  # (N, H, 12)

    return predict


def evaluate(predict, test_log: pd.DataFrame, H: int = HORIZON) -> HorizonMetrics:
    """Run the windowed open-loop protocol over one test log.

    Admissible starts t = 0 .. T - H - 1 (every full-length window); each
    window is rolled out once and errors accumulated per horizon step.
    """
    y = log_to_learn_array(test_log)
    q_true = test_log[dataio.QUATERNION_COLUMNS].to_numpy(dtype=float)
    u = test_log[dataio.MOTOR_COLUMNS].to_numpy(dtype=float)
    T = len(y)
    if T <= H + 1:
        raise ValueError(f"test log too short for horizon {H}")
    starts = np.arange(T - H)
    y0 = y[starts]
    u_win = np.stack([u[starts + k] for k in range(H)], axis=1)

    pred = predict(y0, u_win, H)  # (N, H, 12)
    if pred.shape != (len(starts), H, 12):
        raise RuntimeError(f"predictor returned shape {pred.shape}")

    idx = starts[:, None] + 1 + np.arange(H)[None, :]
    e_p = np.linalg.norm(y[idx][..., POS] - pred[..., POS], axis=-1)
    e_v = np.linalg.norm(y[idx][..., VEL] - pred[..., VEL], axis=-1)
    e_w = np.linalg.norm(y[idx][..., OMEGA_LEARN] - pred[..., OMEGA_LEARN], axis=-1)
    e_R = geodesic_error(q_true[idx], rotvec_to_quat(pred[..., ATT]))

    mae = {
        "p": e_p.mean(axis=0),
        "v": e_v.mean(axis=0),
        "w": e_w.mean(axis=0),
        "R": e_R.mean(axis=0),
    }
    return HorizonMetrics(mae=mae, window_count=len(starts))


def evaluate_runs(predict, logs, H: int = HORIZON) -> HorizonMetrics:
    """Average the per-run metric curves over multiple runs (equal weight)."""
    return HorizonMetrics.average([evaluate(predict, df, H) for df in logs])


_UNITS = {"p": "m", "v": "m/s", "R": "rad", "w": "rad/s"}


def compare(results: list[RunResult], h_marks=(1, 10, 50)) -> str:
    """Markdown table of MAE at selected horizons plus cumulative scores."""
    if not results:
        raise ValueError("no results to compare")
    H = results[0].metrics.horizon
    if any(r.metrics.horizon != H for r in results):
        raise ValueError("results have mismatched horizons")
    h_marks = tuple(h for h in h_marks if h <= H) or (H,)
    header = ["Model"]
    for c in ("p", "v", "R", "w"):
        for h in h_marks:
            header.append(f"MAE_{c},{h} [{_UNITS[c]}]")
        header.append(f"MAE_{c},1:{H}")
    lines = ["| " + " | ".join(header) + " |",
             "|" + "---|" * len(header)]
    for r in results:
        row = [r.model_id]
        for c in ("p", "v", "R", "w"):
            row += [f"{r.metrics.at(c, h):.4f}" for h in h_marks]
            row.append(f"{r.metrics.cumulative(c):.4f}")
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines)


def curves_frame(results: list[RunResult]) -> pd.DataFrame:
    """Long-format MAE curves for plotting."""
    rows = []
    for r in results:
        for c in CHANNELS:
            for h, val in enumerate(r.metrics.mae[c], start=1):
                rows.append({"model": r.model_id, "channel": c, "h": h, "mae": val})
    return pd.DataFrame(rows)


def results_json(results: list[RunResult]) -> str:
    return json.dumps(
        [
            {
                "model": r.model_id,
                "trajectories": r.trajectory_ids,
                "config_hash": r.config_hash,
                "elapsed_s": r.elapsed_s,
                "metrics": r.metrics.to_dict(),
            }
            for r in results
        ],
        indent=2,
    )
