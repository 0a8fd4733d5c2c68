#!/usr/bin/env python3
"""End-to-end benchmark pipeline on synthetic data.

Simulates the train/test trajectories, preprocesses the logs, fits the
rotor coefficients, trains the learned baselines, evaluates every model
on the held-out melon runs, and writes a comparison table.

Example:
    python3 scripts/run_pipeline.py --workdir out/ --epochs 10
"""

import argparse
import json
import sys
from pathlib import Path

from nanoquad.cli import TEST_TRAJECTORY, TRAIN_TRAJECTORIES, main as cli


def run(argv):
    print("+ nanoquad " + " ".join(argv))
    rc = cli(argv)
    if rc != 0:
        sys.exit(rc)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--workdir", default="pipeline_out")
    ap.add_argument("--runs", type=int, default=1, help="runs per training trajectory")
    ap.add_argument("--test-runs", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--epochs", type=int, default=10)
    ap.add_argument("--horizon", type=int, default=10, help="training rollout horizon")
    ap.add_argument("--drag", type=float, default=0.0)
    ap.add_argument("--models", nargs="+", default=["residual", "hybrid"],
                    choices=["residual", "lstm", "hybrid"])
    args = ap.parse_args()

    wd = Path(args.workdir)
    raw, clean = wd / "raw", wd / "clean"
    for d in (raw, clean):
        d.mkdir(parents=True, exist_ok=True)

    cfg_path = wd / "config.json"
    cfg_path.write_text(json.dumps(
        {"train": {"epochs": args.epochs, "horizon": args.horizon, "seed": args.seed}},
        indent=2,
    ))

    # 1. simulate
    for traj in TRAIN_TRAJECTORIES:
        run(["simulate", "--traj", traj, "--runs", str(args.runs),
             "--seed", str(args.seed), "--out", str(raw), "--drag", str(args.drag)])
    run(["simulate", "--traj", TEST_TRAJECTORY, "--runs", str(args.test_runs),
         "--seed", str(args.seed + 100), "--out", str(raw), "--drag", str(args.drag)])

    # 2. preprocess
    for p in sorted(raw.glob("*.csv")):
        run(["preprocess", str(p), str(clean / p.name)])

    train_logs = [str(p) for t in TRAIN_TRAJECTORIES for p in sorted(clean.glob(f"{t}_run*.csv"))]
    test_logs = [str(p) for p in sorted(clean.glob(f"{TEST_TRAJECTORY}_run*.csv"))]

    # 3. estimate rotor coefficients
    run(["estimate", *train_logs, "--out", str(wd / "coefficients.json")])

    # 4. train + 5. evaluate
    results = []
    for model in ("naive", "physics"):
        out = wd / f"{model}_metrics.json"
        run(["evaluate", "--model", model, "--data", *test_logs, "--out", str(out)])
        results.append(str(out))
    for model in args.models:
        ckpt = wd / f"{model}.npz"
        run(["--config", str(cfg_path), "train", "--model", model,
             "--data", *train_logs, "--out", str(ckpt)])
        out = wd / f"{model}_metrics.json"
        run(["evaluate", "--checkpoint", str(ckpt), "--data", *test_logs,
             "--out", str(out)])
        results.append(str(out))

    # 6. report
    run(["report", *results, "--out", str(wd / "comparison.md"),
         "--curves", str(wd / "curves.csv")])
    print(f"\nartifacts in {wd}/ (comparison.md, curves.csv, coefficients.json)")


if __name__ == "__main__":
    main()
