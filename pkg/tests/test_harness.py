import json
from dataclasses import replace

import numpy as np
import pytest

import rolab.harness as h
from rolab.harness.config import ks_input_names, load_config, preset_config
from rolab.harness.experiment import (mse, prepare_data, required_samples,
                                      residual_stats, run_experiment)
from rolab.harness.report import ExperimentReport
from rolab.harness.sweeps import noise_study, sweep_hyperparameter
from rolab.reservoir import ReservoirSpec

FAST = dict(n_runs=2, inference_len=300, variants=["RO", "ROR"])


class TestConfig:
    def test_presets_carry_table_values(self):
        cfg = preset_config("rossler")
        assert (cfg.train_len, cfg.dt, cfg.lam) == (400, 0.1, 0.9)
        r = cfg.reservoir
        assert (r.d, r.density, r.alpha, r.xi, r.rho, r.gamma, r.beta) == \
            (400, 0.05, 1.0, 1.0, 1.0, 1.0, 1e-8)
        lor = preset_config("lorenz")
        assert (lor.train_len, lor.dt) == (800, 0.05)
        chua = preset_config("chua")
        assert (chua.train_len, chua.lam) == (1000, 0.5)
        ks = preset_config("ks")
        assert (ks.train_len, ks.reservoir.d, ks.reservoir.alpha,
                ks.reservoir.rho, ks.reservoir.beta, ks.lam) == \
            (30_000, 1000, 0.5, 0.9, 1e-10, 0.95)
        assert preset_config("ks_desk").reservoir.d == 500

    def test_override_nested_reservoir(self):
        cfg = preset_config("rossler", reservoir={"d": 64, "beta": 1e-6})
        assert cfg.reservoir.d == 64 and cfg.reservoir.beta == 1e-6
        assert cfg.reservoir.rho == 1.0  # untouched fields keep the preset

    def test_ks_input_names_equally_spaced(self):
        names = ks_input_names(64, 8)
        assert names == ["u00", "u08", "u16", "u24", "u32", "u40", "u48", "u56"]

    def test_yaml_round_trip(self, tmp_path):
        path = tmp_path / "cfg.yaml"
        path.write_text(
            "preset: chua\n"
            "n_runs: 3\n"
            "input_vars: [y]\n"
            "reservoir:\n  d: 128\n  state_noise: 0.001\n")
        cfg = load_config(path)
        assert cfg.system == "chua" and cfg.n_runs == 3
        assert cfg.input_vars == ["y"]
        assert cfg.reservoir.d == 128 and cfg.reservoir.state_noise == 1e-3
        assert cfg.lam == 0.5  # preset value survives overrides

    def test_bad_variant_rejected(self):
        with pytest.raises(ValueError):
            preset_config("rossler", variants=["RO", "XXL"])


class TestOps:
    def test_mse_basics(self):
        a = np.zeros((10, 2))
        assert np.all(mse(a, a) == 0.0)
        b = a + 3.0
        np.testing.assert_allclose(mse(b, a), [9.0, 9.0])
        rng = np.random.default_rng(0)
        x, y = rng.random((50, 3)), rng.random((50, 3))
        naive = np.array([np.mean([(x[i, j] - y[i, j]) ** 2
                                   for i in range(50)]) for j in range(3)])
        np.testing.assert_allclose(mse(x, y), naive, rtol=1e-12)
        with pytest.raises(ValueError):
            mse(np.zeros((3, 1)), np.zeros((4, 1)))

    def test_residual_stats_closed_forms(self):
        zero = np.zeros((20, 2))
        st = residual_stats(zero, {"all": (0, 20)})
        assert st["all"]["mav"] == [0.0, 0.0]
        assert st["all"]["var"] == [0.0, 0.0]
        alt = np.tile([[1.0], [-1.0]], (10, 1))
        st = residual_stats(alt, {"all": (0, 20)})
        assert st["all"]["mav"] == [1.0]
        assert st["all"]["var"] == [1.0]
        with pytest.raises(ValueError):
            residual_stats(alt, {"bad": (10, 30)})


@pytest.fixture(scope="module")
def small_report():
    cfg = preset_config("rossler", **FAST)
    return run_experiment(cfg), cfg


class TestRunExperiment:
    def test_deterministic_reports(self, small_report):
        report, cfg = small_report
        again = run_experiment(cfg)
        for a, b in zip(report.runs, again.runs):
            assert a["mse_norm"] == b["mse_norm"]
            assert a["mse_raw"] == b["mse_raw"]

    def test_reduction_recomputable_from_runs(self, small_report):
        report, _ = small_report
        red = report.reduction("ROR", "y")
        per_run = np.array([r["mse_norm"]["ROR"][1] for r in report.runs])
        base = np.array([r["mse_norm"]["RO"][1] for r in report.runs])
        expected = (1.0 - per_run.mean() / base.mean()) * 100.0
        assert red == pytest.approx(expected, abs=1e-10)

    def test_round_trip_files(self, small_report, tmp_path):
        report, _ = small_report
        csv, js = tmp_path / "runs.csv", tmp_path / "summary.json"
        report.to_files(csv, js)
        back = ExperimentReport.from_files(csv, js)
        assert back.target_names == report.target_names
        for v in report.variants:
            for t in report.target_names:
                assert back.mean_mse(v, t) == report.mean_mse(v, t)
                np.testing.assert_array_equal(back.per_run(v, t),
                                              report.per_run(v, t))
        assert json.loads(js.read_text())["aggregates"] == back.aggregates()

    def test_paired_trajectory_bytes_across_variants(self):
        # all variants inside one run must consume identical data
        cfg = preset_config("rossler", n_runs=1, inference_len=200,
                            variants=["RO", "RORA"])
        data, clean = prepare_data(cfg, 0)
        assert clean is None
        digest = hash(data.values.tobytes())
        data2, _ = prepare_data(cfg, 0)
        assert hash(data2.values.tobytes()) == digest

    def test_required_samples(self):
        cfg = preset_config("rossler", inference_len=500)
        assert required_samples(cfg) == 1 + 100 + 400 + 500

    def test_workers_do_not_change_results(self):
        cfg = preset_config("rossler", n_runs=2, inference_len=200,
                            variants=["RO"], workers=1)
        serial = run_experiment(cfg)
        parallel = run_experiment(replace(cfg, workers=2))
        for a, b in zip(serial.runs, parallel.runs):
            assert a["mse_norm"] == b["mse_norm"]

    def test_square_targets_for_lorenz_z(self):
        cfg = preset_config("lorenz", input_vars=["z"],
                            square_targets=("x", "y"), n_runs=1,
                            inference_len=200, variants=["RO"])
        report = run_experiment(cfg)
        assert report.target_names == ["x^2", "y^2", "z"]


class TestSweeps:
    def test_degenerate_sweep_equals_single_experiment(self):
        cfg = preset_config("rossler", n_runs=1, inference_len=200)
        curve = sweep_hyperparameter(cfg, "alpha", [1.0], variants=("RO",))
        report = run_experiment(replace(cfg, variants=["RO"]))
        names = [t for t in report.target_names if t != "x"]
        expected = np.mean([report.mean_mse("RO", t) for t in names])
        assert curve["mean_mse"]["RO"][0] == pytest.approx(expected, rel=1e-12)

    def test_sweep_validates_param(self):
        cfg = preset_config("rossler", n_runs=1)
        with pytest.raises(ValueError):
            sweep_hyperparameter(cfg, "nonsense", [1.0])

    def test_noise_zero_matches_noiseless(self):
        cfg = preset_config("rossler", n_runs=2, inference_len=200)
        rows = noise_study(cfg, [0.0], target="y")
        base = run_experiment(replace(cfg, variants=["RO", "ROR"]))
        assert rows[0]["ro_mse"] == pytest.approx(base.mean_mse("RO", "y"),
                                                  rel=1e-12)

    def test_noise_monotone_ro_mse(self):
        cfg = preset_config("rossler", n_runs=2, inference_len=200)
        rows = noise_study(cfg, [0.0, 0.1, 1.0], target="y")
        mses = [r["ro_mse"] for r in rows]
        assert mses[0] < mses[1] < mses[2]


class TestSpectralRadiusSpecInvariant:
    def test_b_matrix_radius_matches_spec(self):
        from rolab.enhance import ResidualSpec, build_residual
        from rolab.numerics import spectral_radius
        from rolab.reservoir import build_reservoir

        spec = ReservoirSpec(d=100, rho=0.8, seed=9)
        basic = build_reservoir(spec, 1)
        res = build_residual(spec, ResidualSpec(lam=0.5), basic)
        assert spectral_radius(res.b) == pytest.approx(0.8, rel=1e-6)
        assert (res.b != basic.a).nnz > 0  # independent draw
