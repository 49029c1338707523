# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: leaky-tanh reservoir recurrences and RK4 stepping.

These are the only per-step sequential loops in the package; everything
else is vectorised numpy.  A pure-Python twin lives in ``_kernels_py`` and
``rolab.kernels`` picks one at import time.
"""
import numpy as np

from libc.math cimport fabs, isfinite, tanh


def leaky_tanh_drive(double[::1] a_data, int[::1] a_indices, int[::1] a_indptr,
                     double[:, ::1] w_in, double[:, ::1] inputs,
                     double alpha, double xi,
                     double[::1] r, double[:, ::1] noise, Py_ssize_t noise_steps,
                     double[:, ::1] out):
    """r <- (1-alpha) r + alpha tanh(A r + W_in u_t + xi + noise_t), row t of
    ``out`` receiving the post-update state.  ``r`` is updated in place so a
    chunked caller can continue the sequence.  Returns the step index of the
    first non-finite state, or -1.
    """
    cdef Py_ssize_t n_steps = inputs.shape[0]
    cdef Py_ssize_t d = w_in.shape[0]
    cdef Py_ssize_t n_in = w_in.shape[1]
    cdef Py_ssize_t t, i, k
    cdef double acc
    cdef double keep = 1.0 - alpha
    cdef double[::1] pre = np.empty(d)
    cdef bint bad
    for t in range(n_steps):
        for i in range(d):
            acc = xi
            for k in range(a_indptr[i], a_indptr[i + 1]):
                acc += a_data[k] * r[a_indices[k]]
            for k in range(n_in):
                acc += w_in[i, k] * inputs[t, k]
            if t < noise_steps:
                acc += noise[t, i]
            pre[i] = acc
        bad = False
        for i in range(d):
            r[i] = keep * r[i] + alpha * tanh(pre[i])
            out[t, i] = r[i]
            if not isfinite(r[i]):
                bad = True
        if bad:
            return t
    return -1


def coupled_leaky_tanh_drive(double[::1] b_data, int[::1] b_indices, int[::1] b_indptr,
                             double[::1] a_data, int[::1] a_indices, int[::1] a_indptr,
                             double[:, ::1] basic_states,
                             double[:, ::1] w_in, double[:, ::1] inputs,
                             double alpha, double xi,
                             double[::1] r, double[:, ::1] noise, Py_ssize_t noise_steps,
                             double[:, ::1] out):
    """Residual-module recurrence: the first sparse matrix acts on the evolving
    state, the second on an externally supplied state sequence (both already
    scaled by their coupling factors).  Conventions as in leaky_tanh_drive."""
    cdef Py_ssize_t n_steps = inputs.shape[0]
    cdef Py_ssize_t d = w_in.shape[0]
    cdef Py_ssize_t n_in = w_in.shape[1]
    cdef Py_ssize_t t, i, k
    cdef double acc
    cdef double keep = 1.0 - alpha
    cdef double[::1] pre = np.empty(d)
    cdef bint bad
    for t in range(n_steps):
        for i in range(d):
            acc = xi
            for k in range(b_indptr[i], b_indptr[i + 1]):
                acc += b_data[k] * r[b_indices[k]]
            for k in range(a_indptr[i], a_indptr[i + 1]):
                acc += a_data[k] * basic_states[t, a_indices[k]]
            for k in range(n_in):
                acc += w_in[i, k] * inputs[t, k]
            if t < noise_steps:
                acc += noise[t, i]
            pre[i] = acc
        bad = False
        for i in range(d):
            r[i] = keep * r[i] + alpha * tanh(pre[i])
            out[t, i] = r[i]
            if not isfinite(r[i]):
                bad = True
        if bad:
            return t
    return -1


cdef inline void _rhs(int kind, double* p, double x, double y, double z,
                      double* out) noexcept nogil:
    cdef double g
    if kind == 0:       # rossler: a, b, c
        out[0] = -y - z
        out[1] = x + p[0] * y
        out[2] = p[1] + z * (x - p[2])
    elif kind == 1:     # lorenz: a, b, c
        out[0] = p[0] * (y - x)
        out[1] = x * (p[1] - z) - y
        out[2] = p[2] * z + x * y
    else:               # chua: a, b, c1, c2, c3
        g = p[2] * x + p[3] * x * fabs(x) + p[4] * x * x * x
        out[0] = p[0] * (y - g)
        out[1] = x - y + z
        out[2] = p[1] * y


def rk4_ode(int kind, double[::1] params, double[::1] y,
            Py_ssize_t n_intervals, double dt, int substeps,
            double[:, ::1] out):
    """Advance the 3-variable system n_intervals sampling intervals with
    classical RK4 at step dt/substeps, writing each post-interval state to
    ``out`` and updating ``y`` in place.  Returns the interval index of the
    first non-finite state, or -1."""
    cdef double h = dt / substeps
    cdef double x0, y0, z0
    cdef double k1[3]
    cdef double k2[3]
    cdef double k3[3]
    cdef double k4[3]
    cdef double* p = &params[0]
    cdef Py_ssize_t n, s
    for n in range(n_intervals):
        for s in range(substeps):
            x0 = y[0]; y0 = y[1]; z0 = y[2]
            _rhs(kind, p, x0, y0, z0, k1)
            _rhs(kind, p, x0 + 0.5 * h * k1[0], y0 + 0.5 * h * k1[1],
                 z0 + 0.5 * h * k1[2], k2)
            _rhs(kind, p, x0 + 0.5 * h * k2[0], y0 + 0.5 * h * k2[1],
                 z0 + 0.5 * h * k2[2], k3)
            _rhs(kind, p, x0 + h * k3[0], y0 + h * k3[1], z0 + h * k3[2], k4)
            y[0] = x0 + (h / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
            y[1] = y0 + (h / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
            y[2] = z0 + (h / 6.0) * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        out[n, 0] = y[0]; out[n, 1] = y[1]; out[n, 2] = y[2]
        if not (isfinite(y[0]) and isfinite(y[1]) and isfinite(y[2])):
            return n
    return -1
