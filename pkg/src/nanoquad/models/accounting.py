"""Parameter and FLOP accounting for the baseline predictors.

Convention (documented as part of the contract): one FLOP per fused
multiply-accumulate in dense layers (bias adds included in the MAC
count), one FLOP per elementwise multiply/add, and one FLOP per scalar
nonlinearity evaluation.  For the recurrent model the hidden-state
initializer is part of the deployed one-step predictor and is included.
"""

from __future__ import annotations

from .baselines import FFParams, RecurrentParams

# Rigid-body one-step transition cost, counted from the RK4 structure:
# 4 derivative evaluations (rotor wrench 20, rotation 30, vdot 6,
# qdot 28, omega dynamics 18 -> ~102 each), the RK4 state combines
# (~169), quaternion renormalization (~12) and the rotation-vector
# boundary conversions (~40).
PHYSICS_STEP_FLOPS = 4 * 102 + 169 + 12 + 40


def _mlp_counts(weights):
    params = sum(W.size + b.size for W, b in weights)
    macs = sum(W.size + b.size for W, b in weights)
    nonlin = sum(b.size for _, b in weights[:-1])
    return params, macs + nonlin


def count_params_flops(model):
    """(trainable parameter count, FLOPs per one-step prediction)."""
    if isinstance(model, str):
        kind = model.lower()
        if kind == "naive":
            return 0, 0
        if kind == "physics":
            return 0, PHYSICS_STEP_FLOPS
        raise ValueError(f"unknown model {model!r}")

    if isinstance(model, FFParams):
        params, flops = _mlp_counts(model.weights)
        return params, flops

    if isinstance(model, RecurrentParams):
        n = model.hidden
        init_params, init_flops = _mlp_counts(model.init_weights)
        gate_params = model.W_ih.size + model.W_hh.size + model.b_ih.size + model.b_hh.size
        readout_params = model.readout[0].size + model.readout[1].size
        params = init_params + gate_params + readout_params
        gate_macs = model.W_ih.size + model.W_hh.size + model.b_ih.size  # b_hh folded
        cell_elementwise = 4 * n          # f*c, i*g, sum, o*tanh(c)
        nonlin = 4 * n + n                # gates + cell tanh
        flops = init_flops + gate_macs + model.b_hh.size + readout_params + cell_elementwise + nonlin
        return params, flops

    if isinstance(model, tuple) and len(model) == 2 and isinstance(model[1], FFParams):
        # hybrid: (physics marker, residual net)
        params, flops = _mlp_counts(model[1].weights)
        return params, flops + PHYSICS_STEP_FLOPS

    raise TypeError(f"cannot count {type(model).__name__}")
