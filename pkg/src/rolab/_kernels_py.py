"""Pure-Python twins of the compiled kernels (same signatures and semantics).

Selected by ``rolab.kernels`` when the extension module is not available.
Roughly 20-50x slower on the reservoir recurrence; results agree to float
round-off (summation order differs).
"""
import numpy as np
import scipy.sparse as sp


def _csr(data, indices, indptr, d):
    return sp.csr_matrix((data, indices, indptr), shape=(d, d))


def leaky_tanh_drive(a_data, a_indices, a_indptr, w_in, inputs, alpha, xi,
                     r, noise, noise_steps, out):
    d = w_in.shape[0]
    a = _csr(a_data, a_indices, a_indptr, d)
    keep = 1.0 - alpha
    for t in range(inputs.shape[0]):
        pre = a @ r + w_in @ inputs[t] + xi
        if t < noise_steps:
            pre += noise[t]
        r[:] = keep * r + alpha * np.tanh(pre)
        out[t] = r
        if not np.all(np.isfinite(r)):
            return t
    return -1


def coupled_leaky_tanh_drive(b_data, b_indices, b_indptr, a_data, a_indices,
                             a_indptr, basic_states, w_in, inputs, alpha, xi,
                             r, noise, noise_steps, out):
    d = w_in.shape[0]
    b = _csr(b_data, b_indices, b_indptr, d)
    a = _csr(a_data, a_indices, a_indptr, d)
    keep = 1.0 - alpha
    for t in range(inputs.shape[0]):
        pre = b @ r + a @ basic_states[t] + w_in @ inputs[t] + xi
        if t < noise_steps:
            pre += noise[t]
        r[:] = keep * r + alpha * np.tanh(pre)
        out[t] = r
        if not np.all(np.isfinite(r)):
            return t
    return -1


def _rhs(kind, p, s):
    x, y, z = s
    if kind == 0:
        return np.array([-y - z, x + p[0] * y, p[1] + z * (x - p[2])])
    if kind == 1:
        return np.array([p[0] * (y - x), x * (p[1] - z) - y, p[2] * z + x * y])
    g = p[2] * x + p[3] * x * abs(x) + p[4] * x ** 3
    return np.array([p[0] * (y - g), x - y + z, p[1] * y])


def rk4_ode(kind, params, y, n_intervals, dt, substeps, out):
    h = dt / substeps
    for n in range(n_intervals):
        for _ in range(substeps):
            k1 = _rhs(kind, params, y)
            k2 = _rhs(kind, params, y + 0.5 * h * k1)
            k3 = _rhs(kind, params, y + 0.5 * h * k2)
            k4 = _rhs(kind, params, y + h * k3)
            y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[n] = y
        if not np.all(np.isfinite(y)):
            return n
    return -1
