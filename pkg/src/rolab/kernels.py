"""Kernel dispatch: compiled extension when built, pure Python otherwise.

``COMPILED`` tells callers (and the benchmark) which implementation is live.
The wrappers below own chunking and train-time noise generation so both
implementations see identical inputs.
"""
import numpy as np

from .errors import DivergenceError

try:
    from . import _kernels as _impl

    COMPILED = True
except ImportError:  # extension not built; fall back to numpy loops
    from . import _kernels_py as _impl

    COMPILED = False

_CHUNK = 1024


def _csr_parts(m):
    m = m.tocsr()
    return (
        np.ascontiguousarray(m.data, dtype=np.float64),
        np.ascontiguousarray(m.indices, dtype=np.int32),
        np.ascontiguousarray(m.indptr, dtype=np.int32),
    )


def drive_states(a, w_in, inputs, alpha, xi, r0=None, noise_scale=0.0,
                 noise_steps=0, noise_rng=None):
    """Run the leaky-tanh recurrence over ``inputs`` (n_steps x n_in).

    Returns (states, r_final); states[t] is the state after consuming
    inputs[t].  Gaussian noise of standard deviation ``noise_scale`` is added
    to the pre-activation for the first ``noise_steps`` steps (training-time
    regularisation; never active beyond that index).
    """
    inputs = np.ascontiguousarray(inputs, dtype=np.float64)
    if inputs.ndim == 1:
        inputs = inputs[:, None]
    d = w_in.shape[0]
    w_in = np.ascontiguousarray(w_in, dtype=np.float64)
    a_parts = _csr_parts(a)
    r = np.zeros(d) if r0 is None else np.array(r0, dtype=np.float64)
    n = inputs.shape[0]
    out = np.empty((n, d))
    empty = np.empty((0, d))
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        k = max(0, min(noise_steps - lo, hi - lo))
        noise = noise_rng.normal(0.0, noise_scale, (k, d)) if k > 0 else empty
        bad = _impl.leaky_tanh_drive(*a_parts, w_in, inputs[lo:hi], alpha, xi,
                                     r, noise, k, out[lo:hi])
        if bad >= 0:
            raise DivergenceError("reservoir state became non-finite", lo + bad)
    return out, r


def coupled_drive_states(b_scaled, a_scaled, basic_states, w_in, inputs, alpha,
                         xi, r0=None, noise_scale=0.0, noise_steps=0,
                         noise_rng=None):
    """Residual recurrence: b_scaled acts on the evolving state, a_scaled on
    the time-aligned ``basic_states`` rows.  Same conventions as
    drive_states."""
    inputs = np.ascontiguousarray(inputs, dtype=np.float64)
    if inputs.ndim == 1:
        inputs = inputs[:, None]
    basic_states = np.ascontiguousarray(basic_states, dtype=np.float64)
    if basic_states.shape[0] != inputs.shape[0]:
        raise ValueError("basic_states and inputs must be time-aligned")
    d = w_in.shape[0]
    w_in = np.ascontiguousarray(w_in, dtype=np.float64)
    b_parts = _csr_parts(b_scaled)
    a_parts = _csr_parts(a_scaled)
    r = np.zeros(d) if r0 is None else np.array(r0, dtype=np.float64)
    n = inputs.shape[0]
    out = np.empty((n, d))
    empty = np.empty((0, d))
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        k = max(0, min(noise_steps - lo, hi - lo))
        noise = noise_rng.normal(0.0, noise_scale, (k, d)) if k > 0 else empty
        bad = _impl.coupled_leaky_tanh_drive(
            *b_parts, *a_parts, basic_states[lo:hi], w_in, inputs[lo:hi],
            alpha, xi, r, noise, k, out[lo:hi])
        if bad >= 0:
            raise DivergenceError("residual reservoir state became non-finite",
                                  lo + bad)
    return out, r


_ODE_KIND = {"rossler": 0, "lorenz": 1, "chua": 2}


def rk4_trajectory(kind, params, y0, n_samples, dt, substeps, washout):
    """Integrate one of the named 3-variable systems.

    Discards ``washout`` sampling intervals, then returns ``n_samples`` rows
    whose first row is the post-washout state.
    """
    code = _ODE_KIND[kind]
    params = np.ascontiguousarray(params, dtype=np.float64)
    y = np.array(y0, dtype=np.float64)
    if washout > 0:
        scratch = np.empty((washout, 3))
        bad = _impl.rk4_ode(code, params, y, washout, dt, substeps, scratch)
        if bad >= 0:
            raise DivergenceError(f"{kind} trajectory diverged during washout", bad)
    out = np.empty((n_samples, 3))
    out[0] = y
    if n_samples > 1:
        bad = _impl.rk4_ode(code, params, y, n_samples - 1, dt, substeps, out[1:])
        if bad >= 0:
            raise DivergenceError(f"{kind} trajectory diverged", washout + 1 + bad)
    return out
