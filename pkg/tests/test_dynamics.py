import numpy as np
import pytest

from rolab.dynamics import (KsSpec, NoiseSpec, OdeSystemSpec, Trajectory,
                            add_uniform_noise, normalize_series,
                            rossler_fixed_point, simulate_ks, simulate_ode)


class TestSimulateOde:
    def test_lorenz_sign_symmetry(self):
        spec = OdeSystemSpec("lorenz")
        init = np.array([3.0, -1.5, 22.0])
        flipped = init * np.array([-1.0, -1.0, 1.0])
        a = simulate_ode(spec, 500, 0.05, init=init, washout_steps=0)
        b = simulate_ode(spec, 500, 0.05, init=flipped, washout_steps=0)
        np.testing.assert_allclose(
            b.values, a.values * np.array([-1.0, -1.0, 1.0]), atol=1e-9)

    def test_rossler_fixed_point_is_stationary(self):
        spec = OdeSystemSpec("rossler")
        fp = rossler_fixed_point(spec)
        # analytic check that it solves xdot = ydot = zdot = 0
        a, b, c = (spec.params[k] for k in "abc")
        x, y, z = fp
        assert abs(-y - z) < 1e-12
        assert abs(x + a * y) < 1e-12
        assert abs(b + z * (x - c)) < 1e-12
        traj = simulate_ode(spec, 100, 0.1, init=fp, washout_steps=0)
        assert np.abs(traj.values - fp).max() < 1e-6

    def test_rk4_order_via_richardson(self):
        spec = OdeSystemSpec("lorenz")
        start = simulate_ode(spec, 2, 0.05, seed=1).values[-1]

        def one_interval(substeps):
            return simulate_ode(spec, 2, 0.1, init=start, washout_steps=0,
                                substeps=substeps).values[-1]

        ref = one_interval(64)
        err_coarse = np.linalg.norm(one_interval(4) - ref)
        err_fine = np.linalg.norm(one_interval(8) - ref)
        ratio = err_coarse / err_fine
        assert 8.0 < ratio < 32.0  # 4th order: halving the step gives ~16x

    @pytest.mark.parametrize("kind,box", [
        ("lorenz", {"x": 30.0, "y": 40.0, "z": (0.0, 60.0)}),
        ("rossler", {"x": 30.0, "y": 30.0, "z": (-1.0, 60.0)}),
        ("chua", {"x": 10.0, "y": 10.0, "z": (-40.0, 40.0)}),
    ])
    def test_attractor_stays_in_box(self, kind, box):
        traj = simulate_ode(OdeSystemSpec(kind), 100_000,
                            0.05 if kind == "lorenz" else 0.1, seed=3)
        x, y, z = traj.values.T
        assert np.abs(x).max() <= box["x"]
        assert np.abs(y).max() <= box["y"]
        lo, hi = box["z"]
        assert z.min() >= lo and z.max() <= hi

    def test_deterministic_under_seed(self):
        spec = OdeSystemSpec("rossler")
        a = simulate_ode(spec, 50, 0.1, seed=9)
        b = simulate_ode(spec, 50, 0.1, seed=9)
        np.testing.assert_array_equal(a.values, b.values)

    def test_bad_args_rejected(self):
        spec = OdeSystemSpec("rossler")
        with pytest.raises(ValueError):
            simulate_ode(spec, 10, -0.1)
        with pytest.raises(ValueError):
            simulate_ode(spec, 0, 0.1)
        with pytest.raises(ValueError):
            simulate_ode(spec, 10, 0.1, init=np.zeros(2))
        with pytest.raises(ValueError):
            OdeSystemSpec("vanderpol")


class TestSimulateKs:
    def test_zero_field_stays_zero(self):
        traj = simulate_ks(KsSpec(), 50, init=np.zeros(64), washout_steps=0)
        assert np.abs(traj.values).max() == 0.0

    def test_spatial_mean_conserved(self):
        traj = simulate_ks(KsSpec(), 1000, seed=5, washout_steps=100)
        means = traj.values.mean(axis=1)
        assert np.abs(means - means[0]).max() < 1e-8

    def test_linear_growth_rate_of_single_mode(self):
        spec = KsSpec()
        q = 2
        k = 2.0 * np.pi * q / spec.domain_length
        x = np.arange(spec.grid_points) * spec.domain_length / spec.grid_points
        init = 1e-6 * np.cos(k * x)
        traj = simulate_ks(spec, 41, init=init, washout_steps=0)
        amps = np.abs(np.fft.rfft(traj.values, axis=1)[:, q])
        times = np.arange(41) * spec.dt
        slope = np.polyfit(times, np.log(amps), 1)[0]
        expected = k ** 2 - k ** 4
        assert slope == pytest.approx(expected, rel=0.05)

    def test_deterministic_and_finite(self):
        a = simulate_ks(KsSpec(), 200, seed=2)
        b = simulate_ks(KsSpec(), 200, seed=2)
        np.testing.assert_array_equal(a.values, b.values)
        assert np.all(np.isfinite(a.values))

    def test_random_init_recipe(self):
        from rolab.rng import substream

        traj = simulate_ks(KsSpec(), 5, seed=11, washout_steps=0)
        first = traj.values[0]
        assert abs(first.mean()) < 1e-12
        raw = substream(11, "data_init").uniform(-0.5, 0.5, 64)
        np.testing.assert_allclose(first, raw - raw.mean(), atol=1e-12)


class TestNormalize:
    def test_hand_computed_three_points(self):
        traj = Trajectory(dt=1.0, values=np.array([[1.0], [2.0], [3.0]]),
                          var_names=["x"])
        normed, stats = normalize_series(traj)
        root = np.sqrt(3.0 / 2.0)
        np.testing.assert_allclose(normed.values[:, 0], [-root, 0.0, root],
                                   atol=1e-12)
        assert stats.mean[0] == pytest.approx(2.0)

    def test_idempotent_on_standardized_series(self):
        rng = np.random.default_rng(0)
        v = rng.standard_normal(500)
        v = (v - v.mean()) / v.std()
        traj = Trajectory(dt=0.1, values=v[:, None], var_names=["x"])
        normed, _ = normalize_series(traj)
        np.testing.assert_allclose(normed.values, traj.values, atol=1e-12)

    def test_constant_channel_rejected(self):
        traj = Trajectory(dt=1.0, values=np.ones((10, 1)), var_names=["x"])
        with pytest.raises(ValueError):
            normalize_series(traj)

    def test_round_trip_inverse(self):
        rng = np.random.default_rng(1)
        traj = Trajectory(dt=0.5, values=rng.uniform(-5, 5, (200, 3)),
                          var_names=["x", "y", "z"])
        normed, stats = normalize_series(traj, reference_window=(0, 120))
        np.testing.assert_allclose(stats.invert(normed.values), traj.values,
                                   atol=1e-10)


class TestUniformNoise:
    def test_zero_eta_is_identity(self):
        rng = np.random.default_rng(2)
        traj = Trajectory(dt=0.1, values=rng.standard_normal((50, 2)),
                          var_names=["a", "b"])
        noisy = add_uniform_noise(traj, NoiseSpec(eta=0.0), seed=1)
        np.testing.assert_array_equal(noisy.values, traj.values)

    def test_perturbation_statistics(self):
        traj = Trajectory(dt=0.1, values=np.zeros((20_000, 3)),
                          var_names=["a", "b", "c"])
        noisy = add_uniform_noise(traj, NoiseSpec(eta=0.1), seed=4)
        delta = noisy.values - traj.values
        assert abs(delta.mean()) < 0.003
        assert np.abs(delta).max() <= 0.1

    def test_deterministic_under_seed(self):
        rng = np.random.default_rng(3)
        traj = Trajectory(dt=0.1, values=rng.standard_normal((40, 2)),
                          var_names=["a", "b"])
        n1 = add_uniform_noise(traj, NoiseSpec(eta=0.5), seed=7)
        n2 = add_uniform_noise(traj, NoiseSpec(eta=0.5), seed=7)
        np.testing.assert_array_equal(n1.values, n2.values)


class TestTrajectoryCsv:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(5)
        traj = Trajectory(dt=0.25, values=rng.uniform(-3, 3, (30, 4)),
                          var_names=["u00", "u01", "u02", "u03"])
        path = tmp_path / "traj.csv"
        traj.to_csv(path)
        back = Trajectory.from_csv(path)
        assert back.var_names == traj.var_names
        assert back.dt == pytest.approx(traj.dt, rel=1e-12)
        np.testing.assert_array_equal(back.values, traj.values)

    def test_rejects_nonuniform_times(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,x\n0,1\n0.1,2\n0.3,3\n")
        with pytest.raises(ValueError):
            Trajectory.from_csv(path)
