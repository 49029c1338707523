"""Experiment reports: per-run records, aggregates, and lossless round-trip
to a CSV (per-run numbers) plus JSON (config, metadata, residual stats).
"""
import json
from dataclasses import dataclass, field

import numpy as np


@dataclass
class ExperimentReport:
    config: dict
    target_names: list
    variants: list
    runs: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add_run(self, run_index, seed, mse_norm, mse_raw, residual_stats=None):
        self.runs.append({
            "run": int(run_index),
            "seed": int(seed),
            "mse_norm": {v: list(map(float, m)) for v, m in mse_norm.items()},
            "mse_raw": {v: list(map(float, m)) for v, m in mse_raw.items()},
            "residual_stats": residual_stats or {},
        })

    def per_run(self, variant, target, units="norm"):
        t = self.target_names.index(target)
        key = f"mse_{units}"
        return np.array([r[key][variant][t] for r in self.runs])

    def mean_mse(self, variant, target=None, units="norm"):
        """Mean over runs; with target=None, additionally the mean over all
        target variables (the spatiotemporal-field convention)."""
        key = f"mse_{units}"
        rows = np.array([r[key][variant] for r in self.runs])
        per_target = rows.mean(axis=0)
        if target is None:
            return float(per_target.mean())
        return float(per_target[self.target_names.index(target)])

    def reduction(self, variant, target=None, units="norm"):
        """Percentage reduction of the run-mean MSE relative to RO."""
        base = self.mean_mse("RO", target, units)
        ours = self.mean_mse(variant, target, units)
        return (1.0 - ours / base) * 100.0

    def to_files(self, csv_path, json_path):
        with open(csv_path, "w") as fh:
            fh.write("run,seed,variant,target,mse_norm,mse_raw\n")
            for r in self.runs:
                for v in self.variants:
                    for t, name in enumerate(self.target_names):
                        fh.write(f"{r['run']},{r['seed']},{v},{name},"
                                 f"{r['mse_norm'][v][t]:.17g},"
                                 f"{r['mse_raw'][v][t]:.17g}\n")
        payload = {
            "config": self.config,
            "target_names": self.target_names,
            "variants": self.variants,
            "metadata": self.metadata,
            "residual_stats": [r["residual_stats"] for r in self.runs],
            "run_seeds": [r["seed"] for r in self.runs],
            "aggregates": self.aggregates(),
        }
        with open(json_path, "w") as fh:
            json.dump(payload, fh, indent=1)

    def aggregates(self):
        out = {}
        for v in self.variants:
            out[v] = {
                "mean_mse_norm": [self.mean_mse(v, t) for t in self.target_names],
                "mean_mse_raw": [self.mean_mse(v, t, units="raw")
                                 for t in self.target_names],
            }
            if "RO" in self.variants and v != "RO":
                out[v]["reduction_vs_ro"] = [
                    self.reduction(v, t) for t in self.target_names]
        return out

    @classmethod
    def from_files(cls, csv_path, json_path):
        with open(json_path) as fh:
            payload = json.load(fh)
        report = cls(config=payload["config"],
                     target_names=payload["target_names"],
                     variants=payload["variants"],
                     metadata=payload["metadata"])
        per_run = {}
        with open(csv_path) as fh:
            header = fh.readline().strip().split(",")
            assert header == ["run", "seed", "variant", "target", "mse_norm",
                              "mse_raw"]
            for line in fh:
                run_s, seed_s, variant, target, m_n, m_r = line.strip().split(",")
                rec = per_run.setdefault(int(run_s), {
                    "seed": int(seed_s),
                    "mse_norm": {v: [None] * len(report.target_names)
                                 for v in report.variants},
                    "mse_raw": {v: [None] * len(report.target_names)
                                for v in report.variants},
                })
                t = report.target_names.index(target)
                rec["mse_norm"][variant][t] = float(m_n)
                rec["mse_raw"][variant][t] = float(m_r)
        stats = payload.get("residual_stats", [])
        for i, run_index in enumerate(sorted(per_run)):
            rec = per_run[run_index]
            report.add_run(run_index, rec["seed"], rec["mse_norm"],
                           rec["mse_raw"], stats[i] if i < len(stats) else {})
        return report
