"""Matrix primitives shared by every observer variant.

Pure functions on numpy arrays / scipy sparse matrices; no shared state.
"""
import warnings

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import ConvergenceWarning, DegenerateMatrixError, IllConditionedError

_RADIUS_RNG_SEED = 0x5EED


def spectral_radius(m, tol=1e-10, max_iter=10000):
    """Largest eigenvalue modulus of a square sparse (or dense) matrix.

    Power iteration with a two-dimensional Krylov modulus estimate, so a
    dominant complex-conjugate pair converges as fast as a dominant real
    eigenvalue.  Deterministic (fixed internal start vector).  Warns with
    ConvergenceWarning and returns the best estimate if the iteration cap
    is hit.
    """
    radius, converged = _power_radius(m, tol, max_iter)
    if not converged:
        warnings.warn(
            f"spectral radius estimate did not reach tol={tol:g} within "
            f"{max_iter} iterations", ConvergenceWarning, stacklevel=2)
    return radius


def _power_radius(m, tol, max_iter):
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    n = m.shape[0]
    rng = np.random.default_rng(_RADIUS_RNG_SEED)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    prev = np.inf
    hits = 0
    restarts = 0
    tiny = np.finfo(float).tiny
    est = 0.0
    for _ in range(max_iter):
        y = m @ x
        ny = np.linalg.norm(y)
        if ny < 1e-150:
            # x (numerically) in the kernel; a couple of fresh starts decide
            # between a nilpotent matrix and an unlucky start vector
            if restarts >= 3:
                return 0.0, True
            restarts += 1
            x = rng.standard_normal(n)
            x /= np.linalg.norm(x)
            prev = np.inf
            continue
        z = m @ y
        # least squares for z ~ p y + q x over the 2-D Krylov span;
        # |roots| of mu^2 - p mu - q bound the dominant modulus
        m11 = ny * ny
        m12 = float(x @ y)
        b1 = float(y @ z)
        b2 = float(x @ z)
        det = m11 - m12 * m12
        if det <= 1e-13 * m11:
            est = ny  # y ~ lambda x: already an eigenvector
        else:
            p = (b1 - b2 * m12) / det
            q = (m11 * b2 - m12 * b1) / det
            disc = p * p + 4.0 * q
            if disc >= 0.0:
                root = np.sqrt(disc)
                est = max(abs(p + root), abs(p - root)) / 2.0
            else:
                est = np.sqrt(-q)
        if abs(est - prev) <= tol * max(est, tiny):
            hits += 1
            if hits >= 2:
                return est, True
        else:
            hits = 0
        prev = est
        nz = np.linalg.norm(z)
        if nz < 1e-150:
            if restarts >= 3:
                return 0.0, True
            restarts += 1
            x = rng.standard_normal(n)
            x /= np.linalg.norm(x)
            prev = np.inf
            continue
        x = z / nz
    return est, False


def scale_to_radius(m, rho, tol=1e-10):
    """Rescale a sparse matrix so its spectral radius equals ``rho``.

    Uses the same deterministic radius estimate as spectral_radius, so
    scaling a matrix to its own measured radius is an exact no-op.
    """
    if rho <= 0:
        raise ValueError("target spectral radius must be positive")
    current, _ = _power_radius(m, tol, 10000)
    if current <= 1e-12:
        raise DegenerateMatrixError(
            "matrix has zero spectral radius; cannot scale")
    scaled = m * (rho / current)
    return scaled.tocsr() if sp.issparse(scaled) else scaled


def centered_ridge_fit(states, targets, beta):
    """Ridge regression with column centering.

    states: (T, k) feature rows, targets: (T, m).  Returns (weights, bias)
    with weights (m, k) and bias (m,) such that predictions are
    ``states @ weights.T + bias``.  Solves the centered normal equations
    through a Cholesky factorization (never an explicit inverse).
    """
    states = np.asarray(states, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if states.ndim == 1:
        states = states[:, None]
    if targets.ndim == 1:
        targets = targets[:, None]
    if states.shape[0] != targets.shape[0]:
        raise ValueError(
            f"states and targets disagree on sample count: "
            f"{states.shape[0]} vs {targets.shape[0]}")
    if states.shape[0] < 2:
        raise ValueError("need at least 2 samples")
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    r_mean = states.mean(axis=0)
    s_mean = targets.mean(axis=0)
    rc = states - r_mean
    sc = targets - s_mean
    gram = rc.T @ rc
    gram[np.diag_indices_from(gram)] += beta
    try:
        cho = scipy.linalg.cho_factor(gram, lower=True, check_finite=False)
        solution = scipy.linalg.cho_solve(cho, rc.T @ sc, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise IllConditionedError(
            f"centered ridge system singular at beta={beta:g}") from exc
    weights = solution.T
    bias = s_mean - weights @ r_mean
    return weights, bias


def ridge_objective(states, targets, weights, bias, beta):
    """Value of the regularized sum-of-squares objective at (weights, bias)."""
    resid = states @ weights.T + bias - targets
    return float(np.sum(resid * resid) + beta * np.sum(weights * weights))


def truncated_svd(m, h):
    """Left singular vectors for the ``h`` largest singular values.

    Returns (u_h, singulars) where u_h is (rows, h) with orthonormal columns
    and ``singulars`` is the full descending singular spectrum (the caller
    may feed it to svht_rank before slicing further).
    """
    m = np.asarray(m, dtype=np.float64)
    max_h = min(m.shape)
    if not 1 <= h <= max_h:
        raise ValueError(f"h must be in [1, {max_h}], got {h}")
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    return u[:, :h], s


def svht_rank(singulars, rows, cols):
    """Number of singular values above the optimal hard threshold.

    Unknown-noise form: tau = omega(aspect) * median(singulars) with the
    cubic approximation of the omega coefficient; clamped to
    [1, len(singulars)] so downstream consumers always get a usable rank.
    """
    singulars = np.asarray(singulars, dtype=np.float64)
    if singulars.size == 0:
        raise ValueError("empty singular value list")
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    aspect = min(rows, cols) / max(rows, cols)
    omega = 0.56 * aspect ** 3 - 0.95 * aspect ** 2 + 1.82 * aspect + 1.43
    tau = omega * float(np.median(singulars))
    rank = int(np.sum(singulars > tau))
    return int(np.clip(rank, 1, singulars.size))
