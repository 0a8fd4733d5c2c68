"""Versioned model checkpoints: weights + normalizer + architecture."""

from __future__ import annotations

import json

import numpy as np

from .baselines import FFParams, RecurrentParams
from .windows import Normalizer

FORMAT_VERSION = 1


def save_checkpoint(path, kind: str, params, normalizer: Normalizer, extra: dict | None = None):
    arrays = {}
    if isinstance(params, FFParams):
        desc = {"hidden": list(params.hidden), "layers": len(params.weights)}
        for i, (W, b) in enumerate(params.weights):
            arrays[f"W{i}"] = W
            arrays[f"b{i}"] = b
    elif isinstance(params, RecurrentParams):
        desc = {"hidden": params.hidden, "init_layers": len(params.init_weights)}
        for i, (W, b) in enumerate(params.init_weights):
            arrays[f"initW{i}"] = W
            arrays[f"initb{i}"] = b
        arrays.update(
            W_ih=params.W_ih, W_hh=params.W_hh, b_ih=params.b_ih, b_hh=params.b_hh,
            W_out=params.readout[0], b_out=params.readout[1],
        )
    elif params is None:  # naive / physics have no weights
        desc = {}
    else:
        raise TypeError(f"cannot checkpoint {type(params).__name__}")

    header = {
        "version": FORMAT_VERSION,
        "kind": kind,
        "architecture": desc,
        "normalizer": normalizer.to_dict(),
        "extra": extra or {},
    }
    np.savez(path, __header__=np.frombuffer(json.dumps(header).encode(), dtype=np.uint8), **arrays)


def load_checkpoint(path):
    """Returns (kind, params, normalizer, extra)."""
    with np.load(path) as data:
        header = json.loads(bytes(data["__header__"]).decode())
        if header["version"] != FORMAT_VERSION:
            raise ValueError(f"unsupported checkpoint version {header['version']}")
        kind = header["kind"]
        norm = Normalizer.from_dict(header["normalizer"])
        desc = header["architecture"]
        if kind in ("residual", "hybrid"):
            weights = [(data[f"W{i}"], data[f"b{i}"]) for i in range(desc["layers"])]
            params = FFParams(weights, tuple(desc["hidden"]))
        elif kind == "lstm":
            params = RecurrentParams(
                init_weights=[
                    (data[f"initW{i}"], data[f"initb{i}"]) for i in range(desc["init_layers"])
                ],
                W_ih=data["W_ih"], W_hh=data["W_hh"],
                b_ih=data["b_ih"], b_hh=data["b_hh"],
                readout=(data["W_out"], data["b_out"]),
                hidden=desc["hidden"],
            )
        elif kind in ("naive", "physics"):
            params = None
        else:
            raise ValueError(f"unknown checkpoint kind {kind!r}")
        return kind, params, norm, header["extra"]
