"""Ground-truth data: three chaotic ODE systems, the Kuramoto-Sivashinsky
PDE, input normalization, and uniform measurement noise.
"""
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DivergenceError
from .rng import substream

ODE_DEFAULT_PARAMS = {
    "rossler": {"a": 0.5, "b": 2.0, "c": 4.0},
    "lorenz": {"a": 10.0, "b": 28.0, "c": -8.0 / 3.0},
    "chua": {"a": 12.8, "b": -19.1, "c1": 0.6, "c2": -1.1, "c3": 0.45},
}

_PARAM_ORDER = {
    "rossler": ("a", "b", "c"),
    "lorenz": ("a", "b", "c"),
    "chua": ("a", "b", "c1", "c2", "c3"),
}


@dataclass
class Trajectory:
    """Uniformly sampled multivariate series; values has shape (n_steps, n_vars)."""

    dt: float
    values: np.ndarray
    var_names: list

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValueError("values must be 2-D (n_steps, n_vars)")
        if self.values.shape[0] < 2:
            raise ValueError("need at least 2 samples")
        if len(self.var_names) != self.values.shape[1]:
            raise ValueError("var_names length must match the column count")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("trajectory contains non-finite values")

    @property
    def n_steps(self):
        return self.values.shape[0]

    @property
    def n_vars(self):
        return self.values.shape[1]

    def columns(self, names):
        idx = [self.var_names.index(n) for n in names]
        return self.values[:, idx]

    def to_csv(self, path):
        """Header row of variable names, column 0 the sample time, 17
        significant digits."""
        with open(path, "w") as fh:
            fh.write("t," + ",".join(self.var_names) + "\n")
            for i, row in enumerate(self.values):
                cells = [f"{i * self.dt:.17g}"]
                cells += [f"{v:.17g}" for v in row]
                fh.write(",".join(cells) + "\n")

    @classmethod
    def from_csv(cls, path):
        with open(path) as fh:
            header = fh.readline().strip().split(",")
            if header[0] != "t":
                raise ValueError("first CSV column must be 't'")
            rows = [list(map(float, line.split(","))) for line in fh if line.strip()]
        data = np.array(rows)
        times = data[:, 0]
        steps = np.diff(times)
        dt = float(steps[0])
        if not np.allclose(steps, dt, rtol=1e-9, atol=1e-12):
            raise ValueError("CSV sample times are not uniformly spaced")
        return cls(dt=dt, values=data[:, 1:], var_names=header[1:])


@dataclass
class OdeSystemSpec:
    kind: str
    params: dict = None

    def __post_init__(self):
        if self.kind not in ODE_DEFAULT_PARAMS:
            raise ValueError(f"unknown system kind {self.kind!r}")
        merged = dict(ODE_DEFAULT_PARAMS[self.kind])
        if self.params:
            unknown = set(self.params) - set(merged)
            if unknown:
                raise ValueError(f"unknown parameters for {self.kind}: {unknown}")
            merged.update(self.params)
        self.params = merged

    def param_vector(self):
        return np.array([self.params[k] for k in _PARAM_ORDER[self.kind]])


@dataclass
class KsSpec:
    domain_length: float = 22.0
    grid_points: int = 64
    dt: float = 0.25

    def __post_init__(self):
        if self.grid_points % 2 != 0:
            raise ValueError("grid_points must be even")
        if self.domain_length <= 0:
            raise ValueError("domain_length must be positive")


@dataclass
class NoiseSpec:
    eta: float = 0.0

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError("eta must be nonnegative")


def simulate_ode(spec, n_steps, dt, init=None, washout_steps=1000, seed=0,
                 substeps=10):
    """Integrate one of the three chaotic systems with classical RK4.

    Ten internal substeps per sampling interval by default; the first
    ``washout_steps`` samples are discarded so the returned trajectory lies
    on the attractor.  ``init`` defaults to a seed-determined draw uniform in
    [-1, 1]^3.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if init is None:
        init = substream(seed, "data_init").uniform(-1.0, 1.0, 3)
    init = np.asarray(init, dtype=np.float64)
    if init.shape != (3,):
        raise ValueError("init must have dimension 3")
    values = kernels.rk4_trajectory(spec.kind, spec.param_vector(), init,
                                    n_steps, dt, substeps, washout_steps)
    return Trajectory(dt=dt, values=values, var_names=["x", "y", "z"])


def rossler_fixed_point(spec):
    """The (stable-branch) equilibrium used as an integration oracle."""
    a, b, c = (spec.params[k] for k in ("a", "b", "c"))
    y = (-c + np.sqrt(c * c - 4.0 * a * b)) / (2.0 * a)
    return np.array([-a * y, y, -y])


def simulate_ks(spec, n_steps, init=None, seed=0, washout_steps=1000,
                n_quad_points=32):
    """Pseudospectral ETDRK4 integration of y_t = -y y_x - y_xx - y_xxxx on a
    periodic domain.

    phi-coefficients are evaluated by the standard contour-integral mean over
    ``n_quad_points`` roots of unity.  Random initial fields are uniform in
    [-0.5, 0.5] with the spatial mean removed; a 1000-sample washout is
    discarded by default.
    """
    q = spec.grid_points
    if init is None:
        init = substream(seed, "data_init").uniform(-0.5, 0.5, q)
        init = init - init.mean()
    init = np.asarray(init, dtype=np.float64)
    if init.shape != (q,):
        raise ValueError(f"init must have length {q}")

    h = spec.dt
    # half-spectrum (rfft) form keeps the field exactly real, so round-off
    # cannot seed growth in the non-physical anti-Hermitian subspace
    k = (2.0 * np.pi / spec.domain_length) * np.fft.rfftfreq(q, d=1.0 / q)
    lin = k ** 2 - k ** 4
    # odd-derivative operator: zero the Nyquist mode (sign-ambiguous on an
    # even grid); the linear term keeps full Nyquist damping
    k_deriv = k.copy()
    k_deriv[-1] = 0.0
    e_full = np.exp(h * lin)
    e_half = np.exp(0.5 * h * lin)
    roots = np.exp(1j * np.pi * (np.arange(1, n_quad_points + 1) - 0.5)
                   / n_quad_points)
    lr = h * lin[:, None] + roots[None, :]
    q_coef = h * np.real(np.mean((np.exp(lr / 2.0) - 1.0) / lr, axis=1))
    f1 = h * np.real(np.mean(
        (-4.0 - lr + np.exp(lr) * (4.0 - 3.0 * lr + lr ** 2)) / lr ** 3, axis=1))
    f2 = h * np.real(np.mean(
        (2.0 + lr + np.exp(lr) * (lr - 2.0)) / lr ** 3, axis=1))
    f3 = h * np.real(np.mean(
        (-4.0 - 3.0 * lr - lr ** 2 + np.exp(lr) * (4.0 - lr)) / lr ** 3, axis=1))
    g = -0.5j * k_deriv

    def nonlin(v):
        u = np.fft.irfft(v, n=q)
        return g * np.fft.rfft(u * u)

    v = np.fft.rfft(init)
    out = np.empty((n_steps, q))
    for step in range(-washout_steps, n_steps):
        if step >= 0:
            out[step] = np.fft.irfft(v, n=q)
            if not np.all(np.isfinite(out[step])):
                raise DivergenceError("KS field became non-finite",
                                      washout_steps + step)
        nv = nonlin(v)
        a = e_half * v + q_coef * nv
        na = nonlin(a)
        b = e_half * v + q_coef * na
        nb = nonlin(b)
        c = e_half * a + q_coef * (2.0 * nb - nv)
        nc = nonlin(c)
        v = e_full * v + nv * f1 + (na + nb) * 2.0 * f2 + nc * f3
    names = [f"u{i:02d}" for i in range(q)]
    return Trajectory(dt=spec.dt, values=out, var_names=names)


@dataclass
class NormStats:
    """Per-variable centering/scale from the reference (training) window."""

    mean: np.ndarray
    scale: np.ndarray
    var_names: list = field(default_factory=list)

    def apply(self, values):
        return (values - self.mean) / self.scale

    def invert(self, values):
        return values * self.scale + self.mean


def normalize_series(traj, reference_window=None):
    """Standardize each variable by its time average and population standard
    deviation over ``reference_window`` (a (start, stop) sample index pair,
    default: the whole trajectory); the statistics are applied to every
    sample and returned for inverse mapping."""
    if reference_window is None:
        reference_window = (0, traj.n_steps)
    lo, hi = reference_window
    ref = traj.values[lo:hi]
    if ref.shape[0] < 2:
        raise ValueError("reference window too short")
    mean = ref.mean(axis=0)
    scale = ref.std(axis=0)
    bad = np.where(scale == 0.0)[0]
    if bad.size:
        names = [traj.var_names[i] for i in bad]
        raise ValueError(f"constant channel(s) in reference window: {names}")
    stats = NormStats(mean=mean, scale=scale, var_names=list(traj.var_names))
    normalized = Trajectory(dt=traj.dt, values=stats.apply(traj.values),
                            var_names=list(traj.var_names))
    return normalized, stats


def add_uniform_noise(traj, noise, seed=0):
    """Perturb every entry by an independent uniform draw in [-eta, +eta]."""
    if noise.eta == 0.0:
        return Trajectory(dt=traj.dt, values=traj.values.copy(),
                          var_names=list(traj.var_names))
    rng = substream(seed, "noise")
    perturbed = traj.values + rng.uniform(-noise.eta, noise.eta,
                                          traj.values.shape)
    return Trajectory(dt=traj.dt, values=perturbed,
                      var_names=list(traj.var_names))
