"""Hyperparameter sweeps and the measurement-noise study."""
from dataclasses import replace

from .config import with_param
from .experiment import run_experiment
from .plots import line_plot

SWEEPABLE = ("d", "density", "alpha", "xi", "rho", "gamma", "beta",
             "state_noise", "lam", "sigma", "n_c")


def sweep_hyperparameter(cfg, param, values, variants=("RO", "RORA")):
    """Mean MSE per swept value for each variant, holding everything else
    (including the master seed, hence the data and layer draws) fixed."""
    if param not in SWEEPABLE:
        raise ValueError(f"param must be one of {SWEEPABLE}")
    cfg = replace(cfg, variants=list(variants))
    curve = {"param": param, "values": list(values),
             "mean_mse": {v: [] for v in variants}, "reports": []}
    for value in values:
        report = run_experiment(with_param(cfg, param, value))
        for v in variants:
            curve["mean_mse"][v].append(
                sweep_curve_values(report, v, cfg.input_vars))
        curve["reports"].append(report)
    return curve


def sweep_curve_values(report, variant, input_vars):
    """Mean MSE over the non-input targets (the quantities the tables list)."""
    names = [t for t in report.target_names if t not in input_vars]
    vals = [report.mean_mse(variant, t) for t in names]
    return sum(vals) / len(vals)


def sweep_to_csv(curve, input_vars, path):
    variants = sorted(curve["mean_mse"])
    with open(path, "w") as fh:
        fh.write("param,value," + ",".join(f"mse_{v}" for v in variants) + "\n")
        for i, value in enumerate(curve["values"]):
            cells = [curve["param"], f"{value:.17g}"]
            for v in variants:
                cells.append(f"{sweep_curve_values(curve['reports'][i], v, input_vars):.17g}")
            fh.write(",".join(cells) + "\n")


def sweep_plot(curve, input_vars, path, logx=False):
    series = {}
    for v in sorted(curve["mean_mse"]):
        series[v] = [sweep_curve_values(r, v, input_vars)
                     for r in curve["reports"]]
    line_plot(path, curve["values"], series, xlabel=curve["param"],
              ylabel="mean MSE", logx=logx, logy=True,
              title=f"MSE vs {curve['param']}")


def noise_study(cfg, etas, target=None):
    """Basic-observer MSE against the noise-free truth and the percentage
    reduction achieved by residual calibration, per noise half-width."""
    cfg = replace(cfg, variants=["RO", "ROR"])
    rows = []
    for eta in etas:
        report = run_experiment(replace(cfg, noise_eta=float(eta)))
        names = ([target] if target else
                 [t for t in report.target_names if t not in cfg.input_vars])
        ro = sum(report.mean_mse("RO", t) for t in names) / len(names)
        ror = sum(report.mean_mse("ROR", t) for t in names) / len(names)
        rows.append({"eta": float(eta), "ro_mse": ro, "ror_mse": ror,
                     "reduction_pct": (1.0 - ror / ro) * 100.0})
    return rows


def noise_to_csv(rows, path):
    with open(path, "w") as fh:
        fh.write("eta,ro_mse,ror_mse,reduction_pct\n")
        for r in rows:
            fh.write(f"{r['eta']:.17g},{r['ro_mse']:.17g},"
                     f"{r['ror_mse']:.17g},{r['reduction_pct']:.17g}\n")


def noise_plot(rows, path_mse, path_reduction):
    etas = [max(r["eta"], 1e-12) for r in rows]  # log axis; eta=0 pinned
    line_plot(path_mse, etas, {"R_basic": [r["ro_mse"] for r in rows]},
              xlabel="eta", ylabel="MSE vs noise-free truth", logx=True,
              logy=True, title="Basic observer MSE vs noise level")
    line_plot(path_reduction, etas,
              {"ROR": [r["reduction_pct"] for r in rows]},
              xlabel="eta", ylabel="MSE reduction (%)", logx=True,
              title="Residual-calibration reduction vs noise level")
