"""Compiled and pure-Python kernels must agree; the dispatcher wrappers must
match a straightforward scipy reference regardless of chunking."""
import numpy as np
import pytest
import scipy.sparse as sp

import rolab.kernels as kernels
from rolab import _kernels_py
from rolab.errors import DivergenceError

HAVE_EXT = kernels.COMPILED
if HAVE_EXT:
    from rolab import _kernels


def _case(seed, d=20, n_in=2, n_steps=40):
    rng = np.random.default_rng(seed)
    a = sp.random(d, d, density=0.2, random_state=np.random.RandomState(seed),
                  data_rvs=lambda s: rng.uniform(-0.4, 0.4, s)).tocsr()
    w_in = rng.uniform(-1, 1, (d, n_in))
    inputs = rng.standard_normal((n_steps, n_in))
    return a, w_in, inputs


def _run_impl(impl, a, w_in, inputs, alpha, xi, noise, noise_steps):
    d = w_in.shape[0]
    r = np.zeros(d)
    out = np.empty((inputs.shape[0], d))
    flag = impl.leaky_tanh_drive(
        np.ascontiguousarray(a.data), np.ascontiguousarray(a.indices, np.int32),
        np.ascontiguousarray(a.indptr, np.int32), w_in,
        np.ascontiguousarray(inputs), alpha, xi, r, noise, noise_steps, out)
    return out, flag


@pytest.mark.skipif(not HAVE_EXT, reason="extension not built")
class TestImplementationsAgree:
    def test_drive(self):
        a, w_in, inputs = _case(0)
        noise = np.random.default_rng(1).normal(0, 0.01, (20, 20))
        got_c, f_c = _run_impl(_kernels, a, w_in, inputs, 0.7, 0.3, noise, 20)
        got_p, f_p = _run_impl(_kernels_py, a, w_in, inputs, 0.7, 0.3, noise, 20)
        assert f_c == f_p == -1
        np.testing.assert_allclose(got_c, got_p, atol=1e-13)

    def test_coupled_drive(self):
        a, w_in, inputs = _case(2)
        b, _, _ = _case(3)
        basic = np.random.default_rng(4).uniform(-1, 1, (40, 20))
        empty = np.empty((0, 20))
        args = (np.ascontiguousarray(b.data),
                np.ascontiguousarray(b.indices, np.int32),
                np.ascontiguousarray(b.indptr, np.int32),
                np.ascontiguousarray(a.data),
                np.ascontiguousarray(a.indices, np.int32),
                np.ascontiguousarray(a.indptr, np.int32),
                basic, w_in, np.ascontiguousarray(inputs), 1.0, 0.5)
        out_c = np.empty((40, 20))
        out_p = np.empty((40, 20))
        f_c = _kernels.coupled_leaky_tanh_drive(
            *args, np.zeros(20), empty, 0, out_c)
        f_p = _kernels_py.coupled_leaky_tanh_drive(
            *args, np.zeros(20), empty, 0, out_p)
        assert f_c == f_p == -1
        np.testing.assert_allclose(out_c, out_p, atol=1e-13)

    @pytest.mark.parametrize("kind,params", [
        (0, [0.5, 2.0, 4.0]),
        (1, [10.0, 28.0, -8.0 / 3.0]),
        (2, [12.8, -19.1, 0.6, -1.1, 0.45]),
    ])
    def test_rk4(self, kind, params):
        y_c = np.array([0.3, -0.2, 0.5])
        y_p = y_c.copy()
        out_c = np.empty((30, 3))
        out_p = np.empty((30, 3))
        p = np.array(params)
        assert _kernels.rk4_ode(kind, p, y_c, 30, 0.05, 10, out_c) == -1
        assert _kernels_py.rk4_ode(kind, p, y_p, 30, 0.05, 10, out_p) == -1
        np.testing.assert_allclose(out_c, out_p, rtol=1e-12, atol=1e-12)


class TestDispatcherWrappers:
    def test_drive_matches_scipy_reference(self):
        a, w_in, inputs = _case(5, n_steps=kernels._CHUNK + 37)
        states, r_final = kernels.drive_states(a, w_in, inputs, 0.9, 0.2)
        r = np.zeros(20)
        for t in range(inputs.shape[0]):
            r = 0.1 * r + 0.9 * np.tanh(a @ r + w_in @ inputs[t] + 0.2)
        np.testing.assert_allclose(states[-1], r, atol=1e-12)
        np.testing.assert_allclose(r_final, r, atol=1e-12)

    def test_noise_only_in_leading_steps(self):
        a, w_in, inputs = _case(6, n_steps=30)
        clean, _ = kernels.drive_states(a, w_in, inputs, 1.0, 0.0)
        noisy, _ = kernels.drive_states(
            a, w_in, inputs, 1.0, 0.0, noise_scale=0.5, noise_steps=10,
            noise_rng=np.random.default_rng(0))
        assert not np.allclose(clean[:10], noisy[:10])
        # same update rule after the cutoff; states converge by contraction
        assert np.abs(clean[-1] - noisy[-1]).max() < np.abs(
            clean[10] - noisy[10]).max()

    def test_chunked_noise_stream_is_stable(self):
        # the noise draw must not depend on the chunk size
        a, w_in, inputs = _case(7, n_steps=50)
        old = kernels._CHUNK
        try:
            kernels._CHUNK = 7
            s1, _ = kernels.drive_states(a, w_in, inputs, 1.0, 0.1,
                                         noise_scale=0.1, noise_steps=50,
                                         noise_rng=np.random.default_rng(3))
            kernels._CHUNK = 1024
            s2, _ = kernels.drive_states(a, w_in, inputs, 1.0, 0.1,
                                         noise_scale=0.1, noise_steps=50,
                                         noise_rng=np.random.default_rng(3))
        finally:
            kernels._CHUNK = old
        np.testing.assert_allclose(s1, s2, atol=1e-13)

    def test_divergence_reports_step(self):
        a, w_in, inputs = _case(8, n_steps=25)
        inputs[13, 0] = np.nan
        with pytest.raises(DivergenceError) as err:
            kernels.drive_states(a, w_in, inputs, 1.0, 0.0)
        assert err.value.step == 13
