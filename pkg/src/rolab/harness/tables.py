"""Reproduction of the published comparison tables.

Each runner builds one experiment per input variable, reports our run-mean
MSEs next to the bundled reference values, and applies the corresponding
acceptance checks.  Desk-scale default is 20 runs (the reference values were
averaged over 100); per-run seeds stay paired across variants.
"""
from dataclasses import replace

from .config import ks_input_names, preset_config
from .experiment import run_experiment

# Reference MSE values from the original study (normalized units), keyed by
# (input, target).
REFERENCE = {
    "II": {  # rossler
        ("x", "y"): {"RO": 8.12e-4, "ROR": 2.71e-4, "ROA": 2.88e-4,
                     "RORA": 1.50e-4},
        ("x", "z"): {"RO": 7.51e-4, "ROR": 1.94e-4, "ROA": 1.79e-4,
                     "RORA": 9.05e-5},
        ("y", "x"): {"RO": 5.74e-4, "ROR": 2.85e-4, "ROA": 2.71e-4,
                     "RORA": 1.56e-4},
        ("y", "z"): {"RO": 5.99e-2, "ROR": 2.99e-2, "ROA": 1.84e-2,
                     "RORA": 1.66e-2},
        ("z", "x"): {"RO": 14.56, "ROR": 6.33, "ROA": 0.67, "RORA": 0.13},
        ("z", "y"): {"RO": 76.44, "ROR": 27.68, "ROA": 8.28, "RORA": 2.54},
    },
    "III": {  # lorenz; z input estimates squared coordinates
        ("x", "y"): {"RO": 5.04e-3, "ROR": 2.45e-3, "ROA": 8.11e-4,
                     "RORA": 1.62e-4},
        ("x", "z"): {"RO": 3.01e-2, "ROR": 1.31e-2, "ROA": 9.64e-3,
                     "RORA": 6.74e-3},
        ("y", "x"): {"RO": 1.52e-6, "ROR": 4.68e-7, "ROA": 7.57e-7,
                     "RORA": 3.21e-7},
        ("y", "z"): {"RO": 4.11e-2, "ROR": 1.24e-2, "ROA": 1.05e-2,
                     "RORA": 9.97e-3},
        ("z", "x^2"): {"RO": 9.82e-7, "ROR": 3.77e-7, "ROA": 5.59e-8,
                       "RORA": 3.43e-8},
        ("z", "y^2"): {"RO": 1.35e-4, "ROR": 6.99e-5, "ROA": 6.29e-6,
                       "RORA": 2.90e-6},
    },
    "IV": {  # chua
        ("x", "y"): {"RO": 6.25e-5, "ROR": 9.40e-6, "ROA": 2.25e-5,
                     "RORA": 2.16e-6},
        ("x", "z"): {"RO": 2.14e-3, "ROR": 2.51e-4, "ROA": 5.42e-4,
                     "RORA": 1.31e-4},
        ("y", "x"): {"RO": 68.31, "ROR": 21.25, "ROA": 9.59, "RORA": 2.17},
        ("y", "z"): {"RO": 70.82, "ROR": 23.60, "ROA": 10.66, "RORA": 2.18},
        ("z", "x"): {"RO": 6.72e-3, "ROR": 2.25e-3, "ROA": 1.39e-3,
                     "RORA": 1.10e-3},
        ("z", "y"): {"RO": 2.47e-5, "ROR": 8.21e-6, "ROA": 8.11e-6,
                     "RORA": 4.82e-6},
    },
    "V": {  # KS, one initial condition, by input count
        (2, "all"): {"RO": 1.0716, "ROR": 0.6521, "ROA": 0.6377,
                     "RORA": 0.4757},
        (4, "all"): {"RO": 0.5294, "ROR": 0.3691, "ROA": 0.2414,
                     "RORA": 0.1449},
        (6, "all"): {"RO": 0.1533, "ROR": 0.1051, "ROA": 0.0488,
                     "RORA": 0.0385},
        (8, "all"): {"RO": 0.0385, "ROR": 0.0129, "ROA": 0.0059,
                     "RORA": 0.0013},
    },
    "VIII": {  # rossler, split-interval vs full-interval residual training
        ("x", "y"): {"ROR": 2.71e-4, "ROR-al": 3.52e-4},
        ("x", "z"): {"ROR": 1.94e-4, "ROR-al": 3.26e-4},
        ("y", "x"): {"ROR": 2.85e-4, "ROR-al": 3.31e-4},
        ("y", "z"): {"ROR": 2.99e-2, "ROR-al": 3.37e-2},
        ("z", "x"): {"ROR": 6.33, "ROR-al": 7.72},
        ("z", "y"): {"ROR": 27.68, "ROR-al": 33.68},
    },
    "IX": {  # rossler, size-matched baselines
        ("x", "y"): {"RO-2d": 6.44e-4, "P-RC": 6.06e-4},
        ("x", "z"): {"RO-2d": 6.65e-4, "P-RC": 3.92e-4},
        ("y", "x"): {"RO-2d": 4.87e-4, "P-RC": 4.79e-4},
        ("y", "z"): {"RO-2d": 5.46e-2, "P-RC": 2.57e-2},
        ("z", "x"): {"RO-2d": 12.22, "P-RC": 9.15},
        ("z", "y"): {"RO-2d": 60.11, "P-RC": 42.63},
    },
}

TABLES = tuple(sorted(REFERENCE))

_SYSTEM_FOR_TABLE = {"II": "rossler", "III": "lorenz", "IV": "chua",
                     "V": "ks_desk", "VIII": "rossler", "IX": "rossler"}

_VARIANT_KEY = {"RO2d": "RO-2d", "PRC": "P-RC"}


# Reduced attention dimension per experiment: the catastrophic inputs use
# the fixed illustration value (a small rank is what makes their attention
# geometry meaningful); elsewhere the hard-threshold rule picks h.
_H_MODE = {("rossler", "z"): 10, ("chua", "y"): 10}


def _ode_reports(preset, variants, n_runs, master_seed, workers=1):
    """One experiment per input variable; paired seeds across variants."""
    reports = {}
    for input_var in ("x", "y", "z"):
        square = ()
        if preset == "lorenz" and input_var == "z":
            square = ("x", "y")
        cfg = preset_config(preset, input_vars=[input_var],
                            square_targets=square, variants=list(variants),
                            n_runs=n_runs, master_seed=master_seed,
                            workers=workers,
                            h_mode=_H_MODE.get((preset, input_var), "auto"))
        reports[input_var] = run_experiment(cfg)
    return reports


def _rows_from_reports(reports, table, variants):
    rows = []
    for (inp, target), refs in REFERENCE[table].items():
        report = reports[inp]
        for variant in variants:
            key = _VARIANT_KEY.get(variant, variant)
            rows.append({
                "input": inp, "target": target, "variant": variant,
                "mse": report.mean_mse(variant, target),
                "reference_mse": refs.get(key),
                "reduction_pct": (report.reduction(variant, target)
                                  if "RO" in report.variants and variant != "RO"
                                  else None),
            })
    return rows


def _check(rows, checks):
    results = []
    lookup = {(r["input"], r["target"], r["variant"]): r for r in rows}

    def m(inp, tgt, variant):
        return lookup[(inp, tgt, variant)]["mse"]

    for label, fn in checks:
        try:
            ok = bool(fn(m))
        except KeyError:
            ok = False
        results.append((label, ok))
    return results


def reproduce_table(which, n_runs=20, master_seed=2024, workers=1,
                    ks_full=False):
    """Run the experiments behind one published table.

    Returns {"rows": [...], "checks": [(label, ok)], "passed": bool}.
    """
    which = str(which).upper()
    if which not in TABLES:
        raise ValueError(f"unknown table {which!r}; choose from {TABLES}")

    if which in ("II", "III", "IV"):
        variants = ["RO", "ROR", "ROA", "RORA"]
        reports = _ode_reports(_SYSTEM_FOR_TABLE[which], variants, n_runs,
                               master_seed, workers)
        rows = _rows_from_reports(reports, which, variants)
        checks = _MAIN_TABLE_CHECKS[which]
    elif which == "V":
        variants = ["RO", "ROR", "ROA", "RORA"]
        preset = "ks" if ks_full else "ks_desk"
        reports, rows = {}, []
        for n_inputs in (2, 4, 6, 8):
            cfg = preset_config(preset, ks_n_inputs=n_inputs,
                                variants=variants, n_runs=n_runs,
                                master_seed=master_seed, workers=workers)
            cfg.input_vars = ks_input_names(cfg.ks.grid_points, n_inputs)
            report = run_experiment(cfg)
            reports[n_inputs] = report
            mean_over = [t for t in report.target_names]
            for variant in variants:
                ours = sum(report.mean_mse(variant, t) for t in mean_over) \
                    / len(mean_over)
                base = sum(report.mean_mse("RO", t) for t in mean_over) \
                    / len(mean_over)
                rows.append({
                    "input": n_inputs, "target": "all", "variant": variant,
                    "mse": ours,
                    "reference_mse": REFERENCE["V"][(n_inputs, "all")].get(variant),
                    "reduction_pct": (1 - ours / base) * 100 if variant != "RO"
                    else None,
                })
        threshold = 85.0 if ks_full else 70.0
        checks = [(f"RORA reduction at n=8 >= {threshold:g}%",
                   lambda m, th=threshold: _row_reduction(rows, 8, "RORA") >= th)]
    elif which == "VIII":
        variants = ["RO", "ROR", "ROR-al"]
        reports = _ode_reports("rossler", variants, n_runs, master_seed,
                               workers)
        rows = _rows_from_reports(reports, which, ["ROR", "ROR-al"])
        checks = [("ROR below ROR-al on every input->target pair",
                   lambda m: all(m(i, t, "ROR") < m(i, t, "ROR-al")
                                 for (i, t) in REFERENCE["VIII"]))]
    else:  # IX
        variants = ["RO", "ROR", "ROA", "RORA", "RO2d", "PRC"]
        reports = _ode_reports("rossler", variants, n_runs, master_seed,
                               workers)
        rows = _rows_from_reports(reports, which, ["ROR", "RORA", "RO2d", "PRC"])
        checks = [
            ("ROR at or below RO-2d on every pair",
             lambda m: all(m(i, t, "ROR") <= m(i, t, "RO2d")
                           for (i, t) in REFERENCE["IX"])),
            ("RORA at or below P-RC on every pair",
             lambda m: all(m(i, t, "RORA") <= m(i, t, "PRC")
                           for (i, t) in REFERENCE["IX"])),
        ]

    check_results = _check(rows, checks)
    return {"table": which, "rows": rows, "checks": check_results,
            "passed": all(ok for _, ok in check_results),
            "reports": reports}


def _row_reduction(rows, inp, variant):
    for r in rows:
        if r["input"] == inp and r["variant"] == variant:
            return r["reduction_pct"]
    raise KeyError((inp, variant))


_MAIN_TABLE_CHECKS = {
    "II": [
        ("RORA at most 0.4x RO for x->y",
         lambda m: m("x", "y", "RORA") <= 0.4 * m("x", "y", "RO")),
        ("ROR at most 0.7x RO for x->y",
         lambda m: m("x", "y", "ROR") <= 0.7 * m("x", "y", "RO")),
        ("ROA at most 0.7x RO for x->y",
         lambda m: m("x", "y", "ROA") <= 0.7 * m("x", "y", "RO")),
        ("RO above 1.0 for both z-input targets",
         lambda m: m("z", "x", "RO") > 1.0 and m("z", "y", "RO") > 1.0),
        ("RORA cuts z->x by at least 90%",
         lambda m: m("z", "x", "RORA") <= 0.1 * m("z", "x", "RO")),
        ("RORA reduction at least 60% on every pair",
         lambda m: all(m(i, t, "RORA") <= 0.4 * m(i, t, "RO")
                       for (i, t) in REFERENCE["II"])),
    ],
    "III": [
        ("RORA reduction at least 80% for x->y",
         lambda m: m("x", "y", "RORA") <= 0.2 * m("x", "y", "RO")),
        ("RORA reduction at least 85% for z->x^2",
         lambda m: m("z", "x^2", "RORA") <= 0.15 * m("z", "x^2", "RO")),
    ],
    "IV": [
        ("RO above 10 for both y-input targets",
         lambda m: m("y", "x", "RO") > 10.0 and m("y", "z", "RO") > 10.0),
        ("RORA cuts y->x by at least 90%",
         lambda m: m("y", "x", "RORA") <= 0.1 * m("y", "x", "RO")),
        ("RORA cuts y->z by at least 90%",
         lambda m: m("y", "z", "RORA") <= 0.1 * m("y", "z", "RO")),
    ],
}


def format_table(result):
    lines = [f"table {result['table']}  (ours vs reference, run-mean MSE)"]
    header = f"{'input':>6} {'target':>7} {'variant':>8} {'mse':>12} " \
             f"{'reference':>12} {'reduction':>10}"
    lines.append(header)
    lines.append("-" * len(header))
    for r in result["rows"]:
        red = f"{r['reduction_pct']:9.2f}%" if r["reduction_pct"] is not None \
            else "         -"
        ref = f"{r['reference_mse']:12.3g}" if r["reference_mse"] is not None \
            else "           -"
        lines.append(f"{r['input']!s:>6} {r['target']:>7} {r['variant']:>8} "
                     f"{r['mse']:12.3g} {ref} {red}")
    lines.append("")
    for label, ok in result["checks"]:
        lines.append(f"[{'PASS' if ok else 'FAIL'}] {label}")
    return "\n".join(lines)


def table_rows_to_csv(result, path):
    with open(path, "w") as fh:
        fh.write("input,target,variant,mse,reference_mse,reduction_pct\n")
        for r in result["rows"]:
            ref = "" if r["reference_mse"] is None else f"{r['reference_mse']:.17g}"
            red = "" if r["reduction_pct"] is None else f"{r['reduction_pct']:.17g}"
            fh.write(f"{r['input']},{r['target']},{r['variant']},"
                     f"{r['mse']:.17g},{ref},{red}\n")
