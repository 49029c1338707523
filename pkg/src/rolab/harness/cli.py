"""Command-line interface.

Subcommands: simulate, train, infer, table, sweep, noise, te, selftest.
Outputs land in --out or $ROLAB_OUTPUT_DIR (default: current directory).
`table` and `selftest` exit nonzero when an acceptance check fails.
"""
import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from ..containers import load_observer, save_observer
from ..dynamics import Trajectory
from ..enhance import ResidualSpec, apply_observer, train_observer
from ..infotheory import te_profile, te_profile_csv
from ..rng import derived_seed
from . import plots
from .config import PRESETS, load_config, preset_config
from .experiment import generate_clean, prepare_data, run_experiment
from .selftest import run_selftest
from .sweeps import (noise_plot, noise_study, noise_to_csv, sweep_hyperparameter,
                     sweep_plot, sweep_to_csv)
from .tables import TABLES, format_table, reproduce_table, table_rows_to_csv


def _out_dir(args):
    out = args.out or os.environ.get("ROLAB_OUTPUT_DIR", ".")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _config_from_args(args):
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = preset_config(args.preset)
    for name in ("n_runs", "master_seed", "workers"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if getattr(args, "input_vars", None):
        cfg.input_vars = args.input_vars.split(",")
    return cfg


def cmd_simulate(args):
    cfg = _config_from_args(args)
    if args.n_steps:
        cfg.inference_len = max(0, args.n_steps - cfg.train_len
                                - cfg.washout - 1)
    traj = generate_clean(cfg, 0)
    out = _out_dir(args) / (args.name or f"{cfg.system}.csv")
    traj.to_csv(out)
    print(f"wrote {traj.n_steps} samples x {traj.n_vars} variables to {out}")
    return 0


def cmd_train(args):
    cfg = _config_from_args(args)
    if args.data:
        traj = Trajectory.from_csv(args.data)
        clean = None
    else:
        traj, clean = prepare_data(cfg, 0)
    spec = cfg.reservoir
    if args.run_seed is not None:
        from dataclasses import replace

        spec = replace(spec, seed=derived_seed(cfg.master_seed, "run",
                                               args.run_seed))
    observer, result = train_observer(
        args.variant, traj, cfg.input_vars, spec, cfg.train_len,
        residual=ResidualSpec(lam=cfg.lam, w_in_mode=cfg.residual_win),
        sigma=cfg.sigma, n_c=cfg.n_c, h_mode=cfg.h_mode, washout=cfg.washout,
        square_targets=cfg.square_targets,
        eval_len=args.eval_len, eval_targets_raw=clean)
    out = _out_dir(args) / (args.name or f"observer_{args.variant}.json")
    save_observer(observer, out)
    print(f"trained {args.variant} observer -> {out}")
    if result is not None:
        for name, m in zip(result.target_names, result.mse_norm):
            print(f"  eval mse[{name}] = {m:.6g} (normalized units)")
    return 0


def cmd_infer(args):
    observer = load_observer(args.observer)
    traj = Trajectory.from_csv(args.data)
    estimates, start = apply_observer(observer, traj)
    out_dir = _out_dir(args)
    out = out_dir / (args.name or "estimates.csv")
    est_traj = Trajectory(dt=traj.dt, values=estimates,
                          var_names=[f"{n}_hat" for n in observer.target_names])
    # shift the time column so rows align with the source trajectory
    with open(out, "w") as fh:
        fh.write("t," + ",".join(est_traj.var_names) + "\n")
        for i, row in enumerate(estimates):
            cells = [f"{(start + i) * traj.dt:.17g}"]
            cells += [f"{v:.17g}" for v in row]
            fh.write(",".join(cells) + "\n")
    print(f"wrote {estimates.shape[0]} estimate rows to {out}")
    if args.plot:
        idx = list(range(start, traj.n_steps))
        t = np.array(idx) * traj.dt
        for j, name in enumerate(observer.target_names):
            if name in traj.var_names:
                target = traj.values[start:, traj.var_names.index(name)]
                plots.trace_plot(out_dir / f"trace_{name}.svg", t, target,
                                 estimates[:, j], var_name=name,
                                 title=f"{observer.variant} estimate vs target")
    return 0


def cmd_table(args):
    result = reproduce_table(args.which, n_runs=args.n_runs,
                             master_seed=args.master_seed,
                             workers=args.workers, ks_full=args.full)
    print(format_table(result))
    out_dir = _out_dir(args)
    table_rows_to_csv(result, out_dir / f"table_{result['table']}.csv")
    for key, report in result["reports"].items():
        tag = f"table_{result['table']}_{key}"
        report.to_files(out_dir / f"{tag}_runs.csv",
                        out_dir / f"{tag}_summary.json")
    return 0 if result["passed"] else 1


def cmd_sweep(args):
    cfg = _config_from_args(args)
    values = [float(v) for v in args.values.split(",")]
    curve = sweep_hyperparameter(cfg, args.param, values,
                                 variants=tuple(args.variants.split(",")))
    out_dir = _out_dir(args)
    sweep_to_csv(curve, cfg.input_vars, out_dir / f"sweep_{args.param}.csv")
    sweep_plot(curve, cfg.input_vars, out_dir / f"sweep_{args.param}.svg",
               logx=args.log_axis)
    for value, report in zip(curve["values"], curve["reports"]):
        print(f"{args.param} = {value:g}: " + "  ".join(
            f"{v}={curve['mean_mse'][v][curve['values'].index(value)]:.4g}"
            for v in sorted(curve["mean_mse"])))
    return 0


def cmd_noise(args):
    cfg = _config_from_args(args)
    etas = [float(v) for v in args.etas.split(",")]
    rows = noise_study(cfg, etas)
    out_dir = _out_dir(args)
    noise_to_csv(rows, out_dir / "noise_study.csv")
    noise_plot(rows, out_dir / "noise_mse.svg", out_dir / "noise_reduction.svg")
    for r in rows:
        print(f"eta = {r['eta']:g}: basic mse {r['ro_mse']:.4g}, "
              f"ROR reduction {r['reduction_pct']:.1f}%")
    return 0


def cmd_te(args):
    cfg = _config_from_args(args)
    cfg.inference_len = max(cfg.inference_len,
                            args.samples - cfg.train_len - cfg.washout - 1)
    traj = generate_clean(cfg, 0)
    traj = Trajectory(dt=traj.dt, values=traj.values[:args.samples],
                      var_names=traj.var_names)
    rows = te_profile(traj, n_bins=args.bins)
    out_dir = _out_dir(args)
    te_profile_csv(rows, out_dir / f"te_{cfg.system}.csv")
    series = {}
    l_values = sorted({r["l"] for r in rows})
    for r in rows:
        series.setdefault(f"{r['source']}->{r['target']}", [None] * len(l_values))
        series[f"{r['source']}->{r['target']}"][l_values.index(r["l"])] = \
            r["te_nats"]
    plots.line_plot(out_dir / f"te_{cfg.system}.svg", l_values, series,
                    xlabel="source history length l",
                    ylabel="transfer entropy (nats)",
                    title=f"{cfg.system} transfer entropy")
    for label, vals in sorted(series.items()):
        print(label, " ".join(f"{v:.4f}" for v in vals))
    return 0


def cmd_selftest(args):
    ok = run_selftest()
    print("selftest:", "all checks passed" if ok else "FAILURES above")
    return 0 if ok else 1


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="rolab",
        description="Reservoir-observer laboratory: data generators, observer "
                    "variants, and reproduction of the published comparisons.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, preset_default="rossler"):
        p.add_argument("--config", help="YAML experiment config")
        p.add_argument("--preset", default=preset_default, choices=PRESETS)
        p.add_argument("--out", help="output directory "
                                     "(default: $ROLAB_OUTPUT_DIR or .)")
        p.add_argument("--n-runs", type=int, dest="n_runs")
        p.add_argument("--master-seed", type=int, dest="master_seed")
        p.add_argument("--workers", type=int)
        p.add_argument("--input-vars", dest="input_vars",
                       help="comma-separated measured variables")

    p = sub.add_parser("simulate", help="emit a trajectory CSV")
    add_common(p)
    p.add_argument("--n-steps", type=int, help="total samples to emit")
    p.add_argument("--name", help="output file name")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("train", help="train an observer, save its container")
    add_common(p)
    p.add_argument("--variant", default="RORA",
                   choices=["RO", "ROR", "ROR-al", "ROA", "RORA", "RO2d", "PRC"])
    p.add_argument("--data", help="trajectory CSV (default: simulate)")
    p.add_argument("--eval-len", type=int, default=0, dest="eval_len")
    p.add_argument("--run-seed", type=int, dest="run_seed")
    p.add_argument("--name", help="output file name")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("infer", help="apply a saved observer to a CSV")
    p.add_argument("--observer", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out")
    p.add_argument("--name")
    p.add_argument("--plot", action="store_true",
                   help="emit estimate-vs-target SVG traces")
    p.set_defaults(fn=cmd_infer)

    p = sub.add_parser("table", help="reproduce a published table")
    p.add_argument("--which", required=True, choices=list(TABLES))
    p.add_argument("--n-runs", type=int, default=20, dest="n_runs")
    p.add_argument("--master-seed", type=int, default=2024, dest="master_seed")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--full", action="store_true",
                   help="KS full-scale preset (long-running)")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_table)

    p = sub.add_parser("sweep", help="vary one hyperparameter")
    add_common(p)
    p.add_argument("--param", required=True)
    p.add_argument("--values", required=True, help="comma-separated grid")
    p.add_argument("--variants", default="RO,RORA")
    p.add_argument("--log-axis", action="store_true", dest="log_axis")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("noise", help="measurement-noise study")
    add_common(p)
    p.add_argument("--etas", required=True, help="comma-separated noise levels")
    p.set_defaults(fn=cmd_noise)

    p = sub.add_parser("te", help="transfer-entropy profile of a system")
    add_common(p)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--bins", type=int, default=8)
    p.set_defaults(fn=cmd_te)

    p = sub.add_parser("selftest", help="run the fast property suite")
    p.set_defaults(fn=cmd_selftest)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
