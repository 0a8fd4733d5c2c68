#!/usr/bin/env python3
"""Hybrid-learnability study with injected linear body drag.

Simulates flights whose plant has an extra unmodeled -c*v term in the
velocity dynamics, trains the hybrid (physics + residual) model, and
reports how much of the physics baseline's velocity error it removes on
a held-out run.

Example:
    python3 scripts/drag_experiment.py --drag 0.1
"""

import argparse
import time

from nanoquad import bench
from nanoquad.models.training import build_model, train
from nanoquad.models.windows import WindowDataset, make_windows
from nanoquad.params import TrainConfig
from nanoquad.simulate import simulate_flight
from nanoquad.trajectories import TrajectorySpec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--drag", type=float, default=0.1, help="drag coefficient c [1/s]")
    ap.add_argument("--epochs", type=int, default=8, help="epochs per stage")
    ap.add_argument("--horizon", type=int, default=10, help="training rollout horizon")
    ap.add_argument("--stride", type=int, default=4, help="window subsampling stride")
    ap.add_argument("--test-seed", type=int, default=7)
    args = ap.parse_args()

    t0 = time.perf_counter()
    print(f"simulating training runs (drag c = {args.drag} 1/s) ...")
    train_logs = [
        simulate_flight(TrajectorySpec(kind, seed=seed), drag=args.drag)
        for kind in ("random", "chirp")
        for seed in (0, 1)
    ]
    test_log = simulate_flight(TrajectorySpec("random", seed=args.test_seed), drag=args.drag)

    data = make_windows(train_logs, H=50)
    sub = WindowDataset(
        y0=data.y0[:: args.stride], u=data.u[:: args.stride],
        targets=data.targets[:: args.stride], horizon=50, normalizer=data.normalizer,
    )
    print(f"{len(sub)} training windows")

    model = build_model("hybrid", data.normalizer, seed=0)
    for stage, (lr, seed) in enumerate([(1e-3, 0), (3e-4, 1)], start=1):
        cfg = TrainConfig(epochs=args.epochs, batch_size=256, learning_rate=lr,
                          seed=seed, horizon=args.horizon)
        params, history = train(model, sub, cfg)
        print(f"stage {stage}: lr {lr:g}, final loss {history[-1]:.3e}")

    m_phys = bench.evaluate(bench.make_predictor("physics"), test_log, H=50)
    m_hyb = bench.evaluate(
        bench.make_predictor("hybrid", params, data.normalizer), test_log, H=50
    )
    red = 1.0 - m_hyb.cumulative("v") / m_phys.cumulative("v")
    print(f"\nphysics  MAE_v,1:50 = {m_phys.cumulative('v'):.4f} m/s")
    print(f"hybrid   MAE_v,1:50 = {m_hyb.cumulative('v'):.4f} m/s")
    print(f"reduction: {100 * red:.1f}%  ({time.perf_counter() - t0:.0f} s total)")


if __name__ == "__main__":
    main()
