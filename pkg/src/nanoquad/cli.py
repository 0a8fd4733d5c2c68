"""Command-line surface: simulate | preprocess | estimate | train | evaluate | report."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import bench, dataio, estimate, preprocess
from .models import checkpoint as ckpt
from .models.windows import make_windows
from .models.training import build_model, train as train_model
from .params import NoiseSpec, RunConfig
from .simulate import SimulationDiverged, simulate_flight
from .trajectories import TRAJECTORY_KINDS, TrajectorySpec

CONFIG_ENV = "NANOQUAD_CONFIG"

TRAIN_TRAJECTORIES = ("square", "random", "chirp")
TEST_TRAJECTORY = "melon"


def load_config(path=None) -> RunConfig:
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return RunConfig()
    with open(path) as f:
        return RunConfig.from_dict(json.load(f))


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    noise = NoiseSpec(
        position=args.noise_position, velocity=args.noise_velocity,
        omega=args.noise_omega, accel=args.noise_accel, motor=args.noise_motor,
        seed=args.seed,
    )
    for run in range(args.runs):
        spec = TrajectorySpec(kind=args.traj, seed=args.seed + run)
        run_noise = NoiseSpec(**{**noise.__dict__, "seed": args.seed + run})
        try:
            df = simulate_flight(spec, cfg.gains, cfg.body, cfg.rotor,
                                 noise=run_noise, drag=args.drag)
        except SimulationDiverged as e:
            print(f"error: {e}", file=sys.stderr)
            return 1
        path = out_dir / f"{args.traj}_run{run + 1}.csv"
        dataio.write_csv(df, path)
        dataio.write_sidecar(path, {
            "trajectory": args.traj, "run": run + 1, "seed": args.seed + run,
            "drag": args.drag, "config_hash": cfg.hash(),
        })
        print(f"wrote {path} ({len(df)} rows)")
    return 0


def cmd_preprocess(args) -> int:
    cfg = load_config(args.config)
    df = dataio.read_csv(args.infile)
    meta = {"config_hash": cfg.hash()}
    df, lag = preprocess.align_motors_to_accel(df)
    meta["motor_accel_lag"] = lag
    for col in df.columns:
        if col != "t":
            df[col] = preprocess.fill_gaps(df[col].to_numpy(dtype=float), args.max_gap)
    df = preprocess.apply_filters(df, cfg.filters)
    dataio.write_csv(df, args.out)
    dataio.write_sidecar(args.out, meta)
    print(f"wrote {args.out} (motor lag {lag} samples)")
    return 0


def cmd_estimate(args) -> int:
    cfg = load_config(args.config)
    logs = [dataio.read_csv(p) for p in args.infiles]
    report = estimate.estimate_coefficients(logs, cfg.body, dt=1.0 / cfg.fs)
    print(report.table())
    if args.out:
        Path(args.out).write_text(report.to_json())
    return 0


def cmd_train(args) -> int:
    cfg = load_config(args.config)
    logs = [dataio.read_csv(p) for p in args.data]
    data = make_windows(logs, H=cfg.train.horizon)
    model = build_model(args.model, data.normalizer, bp=cfg.body, rp=cfg.rotor,
                        seed=cfg.train.seed)
    params, history = train_model(model, data, cfg.train)
    ckpt.save_checkpoint(args.out, args.model, params, data.normalizer,
                         extra={"config_hash": cfg.hash(), "final_loss": history[-1]})
    print(f"wrote {args.out} (final loss {history[-1]:.3e}, {len(history)} steps)")
    return 0


def cmd_evaluate(args) -> int:
    cfg = load_config(args.config)
    logs = [dataio.read_csv(p) for p in args.data]
    if args.checkpoint:
        kind, params, norm, _ = ckpt.load_checkpoint(args.checkpoint)
        if args.model and args.model != kind:
            print(f"error: checkpoint is a {kind!r} model, not {args.model!r}", file=sys.stderr)
            return 1
    else:
        kind, params, norm = args.model, None, None
        if kind not in ("naive", "physics"):
            print("error: --checkpoint required for learned models", file=sys.stderr)
            return 1
    predict = bench.make_predictor(kind, params, norm, bp=cfg.body, rp=cfg.rotor)
    t0 = time.perf_counter()
    metrics = bench.evaluate_runs(predict, logs, H=args.horizon or cfg.horizon)
    result = bench.RunResult(
        model_id=kind, trajectory_ids=[str(p) for p in args.data],
        metrics=metrics, config_hash=cfg.hash(), elapsed_s=time.perf_counter() - t0,
    )
    out = args.out or f"{kind}_metrics.json"
    Path(out).write_text(bench.results_json([result]))
    print(bench.compare([result]))
    print(f"wrote {out}")
    return 0


def cmd_report(args) -> int:
    results = []
    for p in args.results:
        for entry in json.loads(Path(p).read_text()):
            m = entry["metrics"]
            metrics = bench.HorizonMetrics(
                mae={c: np.asarray(m[c], dtype=float) for c in bench.CHANNELS},
                window_count=m["window_count"],
            )
            results.append(bench.RunResult(
                model_id=entry["model"], trajectory_ids=entry["trajectories"],
                metrics=metrics, config_hash=entry.get("config_hash", ""),
            ))
    table = bench.compare(results)
    print(table)
    if args.out:
        Path(args.out).write_text(table + "\n")
    if args.curves:
        bench.curves_frame(results).to_csv(args.curves, index=False)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nanoquad",
                                description="nano-quadrotor sysid benchmark toolkit")
    p.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="generate synthetic closed-loop flight logs")
    s.add_argument("--traj", required=True, choices=TRAJECTORY_KINDS)
    s.add_argument("--runs", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=".")
    s.add_argument("--drag", type=float, default=0.0,
                   help="linear body drag coefficient added to the plant [1/s]")
    for ch in ("position", "velocity", "omega", "accel", "motor"):
        s.add_argument(f"--noise-{ch}", type=float, default=0.0, dest=f"noise_{ch}")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("preprocess", help="align, gap-fill, and filter a flight log")
    s.add_argument("infile")
    s.add_argument("out")
    s.add_argument("--max-gap", type=int, default=10)
    s.set_defaults(func=cmd_preprocess)

    s = sub.add_parser("estimate", help="fit rotor coefficients by least squares")
    s.add_argument("infiles", nargs="+")
    s.add_argument("--out")
    s.set_defaults(func=cmd_estimate)

    s = sub.add_parser("train", help="train a learned baseline")
    s.add_argument("--model", required=True, choices=("residual", "lstm", "hybrid"))
    s.add_argument("--data", nargs="+", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("evaluate", help="run the multi-horizon protocol")
    s.add_argument("--model", choices=("naive", "physics", "residual", "lstm", "hybrid"))
    s.add_argument("--checkpoint")
    s.add_argument("--data", nargs="+", required=True)
    s.add_argument("--horizon", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("report", help="tabulate evaluation results")
    s.add_argument("results", nargs="+")
    s.add_argument("--out")
    s.add_argument("--curves", help="write full MAE curves as CSV")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (dataio.SchemaError, preprocess.PreprocessError,
            estimate.UnidentifiableError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
