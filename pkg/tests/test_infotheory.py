import numpy as np
import pytest

from rolab.dynamics import Trajectory
from rolab.infotheory import (TeSpec, discretize, te_profile, te_profile_csv,
                              transfer_entropy)


class TestDiscretize:
    def test_endpoints(self):
        np.testing.assert_array_equal(discretize(np.array([0.0, 1.0]), 2),
                                      [0, 1])

    def test_uniform_fill_on_ramp(self):
        ramp = np.arange(100.0)
        symbols = discretize(ramp, 10)
        counts = np.bincount(symbols, minlength=10)
        np.testing.assert_array_equal(counts, np.full(10, 10))

    def test_boundaries_match_direct_formula(self):
        rng = np.random.default_rng(0)
        series = rng.uniform(-3, 7, 500)
        n_bins = 8
        symbols = discretize(series, n_bins)
        lo, hi = series.min(), series.max()
        expected = np.minimum(
            np.floor((series - lo) / (hi - lo) * n_bins).astype(int),
            n_bins - 1)
        np.testing.assert_array_equal(symbols, expected)
        assert symbols.min() >= 0 and symbols.max() == n_bins - 1

    def test_constant_rejected(self):
        with pytest.raises(ValueError):
            discretize(np.full(10, 2.5), 4)


class TestTransferEntropy:
    def test_exact_copy_with_shift_gives_log_bins(self):
        rng = np.random.default_rng(1)
        j = rng.integers(0, 8, 50_000).astype(float)
        i = np.roll(j, 1)  # i_t = j_{t-1}
        te = transfer_entropy(i, j, TeSpec(k=1, l=1, n_bins=8))
        assert te == pytest.approx(np.log(8.0), rel=0.02)

    def test_self_source_is_exactly_zero(self):
        rng = np.random.default_rng(2)
        series = rng.standard_normal(5_000)
        assert transfer_entropy(series, series, TeSpec(k=1, l=1)) == 0.0
        assert transfer_entropy(series, series, TeSpec(k=2, l=1)) == 0.0

    def test_independent_sources_sit_in_shuffle_band(self):
        rng = np.random.default_rng(3)
        i = rng.standard_normal(50_000)
        j = rng.standard_normal(50_000)
        te = transfer_entropy(i, j, TeSpec(k=1, l=1, n_bins=8))
        assert te <= 0.02
        shuffles = []
        for s in range(20):
            perm = np.random.default_rng(100 + s).permutation(j)
            shuffles.append(transfer_entropy(i, perm, TeSpec(k=1, l=1, n_bins=8)))
        lo, hi = np.percentile(shuffles, [2.5, 97.5])
        assert lo <= te <= hi * 1.5  # inside/near the surrogate band

    def test_nonnegative_after_clamp(self):
        rng = np.random.default_rng(4)
        for trial in range(10):
            i = rng.standard_normal(300)
            j = rng.standard_normal(300)
            assert transfer_entropy(i, j, TeSpec(k=1, l=2, n_bins=4)) >= 0.0

    def test_monotone_in_l_on_common_samples(self):
        rng = np.random.default_rng(5)
        j = rng.standard_normal(20_000)
        i = np.roll(j, 1) + 0.3 * rng.standard_normal(20_000)
        values = [transfer_entropy(i, j, TeSpec(k=1, l=l, n_bins=4), t_start=5)
                  for l in range(1, 6)]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))

    def test_noisy_channel_converges_to_analytic_value(self):
        # binary channel: i_t = j_{t-1} xor flip(p); TE = ln2 - H_b(p)
        p = 0.2
        expected = np.log(2.0) + p * np.log(p) + (1 - p) * np.log(1 - p)
        rng = np.random.default_rng(6)

        def sample(n):
            j = rng.integers(0, 2, n)
            flips = rng.random(n) < p
            i = np.roll(j, 1) ^ flips
            return i.astype(float), j.astype(float)

        i3, j3 = sample(1_000)
        i5, j5 = sample(100_000)
        spec = TeSpec(k=1, l=1, n_bins=2)
        err3 = abs(transfer_entropy(i3, j3, spec) - expected) / expected
        err5 = abs(transfer_entropy(i5, j5, spec) - expected) / expected
        assert err5 < 0.05
        assert err5 < err3

    def test_insufficient_history_rejected(self):
        with pytest.raises(ValueError):
            transfer_entropy(np.arange(10.0), np.arange(10.0),
                             TeSpec(k=1, l=1), t_start=0)


class TestTeProfile:
    def test_independent_pair_profile_near_zero(self):
        rng = np.random.default_rng(7)
        traj = Trajectory(dt=1.0, values=rng.standard_normal((50_000, 2)),
                          var_names=["a", "b"])
        rows = te_profile(traj, l_values=(1, 2), n_bins=8)
        assert len(rows) == 4
        assert all(r["te_nats"] <= 0.03 for r in rows)

    def test_profile_covers_all_ordered_pairs(self):
        rng = np.random.default_rng(8)
        traj = Trajectory(dt=1.0, values=rng.standard_normal((3_000, 3)),
                          var_names=["x", "y", "z"])
        rows = te_profile(traj)
        pairs = {(r["source"], r["target"]) for r in rows}
        assert len(pairs) == 6
        assert all(len([r for r in rows if (r["source"], r["target"]) == p]) == 5
                   for p in pairs)

    def test_csv_emission(self, tmp_path):
        rng = np.random.default_rng(9)
        traj = Trajectory(dt=1.0, values=rng.standard_normal((2_000, 2)),
                          var_names=["a", "b"])
        rows = te_profile(traj, l_values=(1,))
        path = tmp_path / "te.csv"
        te_profile_csv(rows, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "source,target,l,te_nats,n_samples,n_bins"
        assert len(lines) == 1 + len(rows)
