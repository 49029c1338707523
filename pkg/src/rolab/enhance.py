"""Observer enhancements and their composition.

Residual calibration trains a second reservoir on the first observer's
input-reconstruction errors over the second half of the training window and
adds its output correction.  GRBF attention augments reservoir states with a
Gaussian-weighted combination of randomly selected historical reduced states.
``train_observer`` builds any of the supported variants on one trajectory
with a shared index layout, so paired comparisons differ only in the pieces
a variant adds.
"""
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .dynamics import NormStats, Trajectory, normalize_series
from .numerics import svht_rank, truncated_svd
from .reservoir import (DEFAULT_WASHOUT, Readout, ReservoirWeights,
                        StateSequence, apply_readout, build_reservoir, drive,
                        fit_readout, ro_2d_spec)
from .rng import substream

VARIANTS = ("RO", "ROR", "ROR-al", "ROA", "RORA", "RO2d", "PRC")

RESIDUAL_VARIANTS = ("ROR", "ROR-al", "RORA")
ATTENTION_VARIANTS = ("ROA", "RORA")


@dataclass
class ResidualSpec:
    """Residual-module configuration: coupling strength and input-layer
    sharing policy ("fresh" draws a new matrix from its own substream)."""

    lam: float = 0.9
    w_in_mode: str = "fresh"

    def __post_init__(self):
        if not 0 < self.lam <= 1:
            raise ValueError("lam must be in (0, 1]")
        if self.w_in_mode not in ("fresh", "shared"):
            raise ValueError("w_in_mode must be 'fresh' or 'shared'")


@dataclass
class ResidualWeights:
    b: object  # csr matrix, same generation recipe as the basic module's A
    w_in: np.ndarray


@dataclass
class AttentionBank:
    """SVD projection, its centering offset, and the selected centers."""

    u_h: np.ndarray
    state_mean: np.ndarray
    centers: np.ndarray
    sigma: float
    center_indices: np.ndarray = None

    @property
    def h(self):
        return self.u_h.shape[1]

    @property
    def n_c(self):
        return self.centers.shape[0]


def attention_weight(l, c, sigma):
    """Gaussian radial-basis weight exp(-|l - c|^2 / (2 sigma^2))."""
    diff = np.asarray(l, dtype=np.float64) - np.asarray(c, dtype=np.float64)
    return float(np.exp(-np.dot(diff, diff) / (2.0 * sigma * sigma)))


def attention_vector(l, bank):
    """Unnormalized attention combination g = (1/N_c) sum phi_i c_i."""
    weights = np.array([attention_weight(l, c, bank.sigma) for c in bank.centers])
    return weights @ bank.centers / bank.n_c


def reduce_states(states, bank):
    return (states - bank.state_mean) @ bank.u_h


def attention_features(states, bank):
    """Attention-augmented features [l(t); g(t)] for every state row."""
    l = reduce_states(states, bank)
    c = bank.centers
    d2 = np.maximum(
        (l * l).sum(axis=1)[:, None] + (c * c).sum(axis=1)[None, :]
        - 2.0 * (l @ c.T), 0.0)
    phi = np.exp(-d2 / (2.0 * bank.sigma * bank.sigma))
    g = phi @ c / c.shape[0]
    return np.hstack([l, g])


def build_attention(states, n_c, sigma, h_mode="auto", rng=None):
    """Project the centered training states onto their leading left singular
    vectors (count from the optimal hard threshold in "auto" mode, or fixed)
    and select ``n_c`` distinct historical reduced states as centers."""
    raw = states.states if isinstance(states, StateSequence) else states
    n_t, d = raw.shape
    if n_c > n_t:
        raise ValueError(f"n_c={n_c} exceeds the {n_t} available states")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    mean = raw.mean(axis=0)
    centered = raw - mean
    u_full, singulars = truncated_svd(centered.T, min(d, n_t))
    if h_mode == "auto":
        h = svht_rank(singulars, d, n_t)
    else:
        h = int(h_mode)
        if not 1 <= h <= min(d, n_t):
            raise ValueError(f"fixed h={h} out of range")
    u_h = u_full[:, :h]
    reduced = centered @ u_h
    if rng is None:
        rng = np.random.default_rng(0)
    idx = np.sort(rng.choice(n_t, size=n_c, replace=False))
    return AttentionBank(u_h=u_h, state_mean=mean, centers=reduced[idx],
                         sigma=sigma, center_indices=idx)


def build_residual(spec, residual_spec, basic_weights):
    """Residual-module layers: B by the same recipe as A (own substream,
    scaled to the same spectral radius) and a fresh or shared input layer."""
    from .errors import DegenerateMatrixError
    from .numerics import scale_to_radius
    from .reservoir import sample_sparse_random

    b_rng = substream(spec.seed, "matrix_b")
    b = None
    for _ in range(10):
        candidate = sample_sparse_random(spec.d, spec.density, b_rng)
        if candidate.nnz == 0:
            continue
        try:
            b = scale_to_radius(candidate, spec.rho)
            break
        except DegenerateMatrixError:
            continue
    if b is None:
        raise DegenerateMatrixError("could not draw a residual matrix")
    if residual_spec.w_in_mode == "shared":
        w_in = basic_weights.w_in
    else:
        n_inputs = basic_weights.w_in.shape[1]
        w_in = substream(spec.seed, "w_in_res").uniform(
            -spec.gamma, spec.gamma, (spec.d, n_inputs))
    return ResidualWeights(b=b, w_in=w_in)


def drive_residual(res_weights, spec, lam, basic_a, basic_states, delta_u,
                   r0=None, start_index=0, washout=0, noise_steps=0,
                   noise_rng=None):
    """Residual recurrence r <- (1-a) r + a tanh(lam B r + (1-lam) A r_basic
    + W_in du + xi), time-aligned with the basic module (state produced from
    row t belongs to t+1)."""
    basic_states = np.asarray(basic_states, dtype=np.float64)
    delta_u = np.atleast_2d(np.asarray(delta_u, dtype=np.float64))
    if delta_u.shape[0] == 1 and delta_u.shape[1] != res_weights.w_in.shape[1]:
        delta_u = delta_u.T
    if basic_states.shape[0] != delta_u.shape[0]:
        raise ValueError("basic_states and delta_u are misaligned")
    b_scaled = (res_weights.b * lam).tocsr()
    a_scaled = (basic_a * (1.0 - lam)).tocsr()
    if noise_steps > 0 and spec.state_noise > 0 and noise_rng is None:
        noise_rng = substream(spec.seed, "state_noise_res")
    states, _ = kernels.coupled_drive_states(
        b_scaled, a_scaled, basic_states, res_weights.w_in, delta_u,
        spec.alpha, spec.xi, r0=r0, noise_scale=spec.state_noise,
        noise_steps=noise_steps, noise_rng=noise_rng)
    return StateSequence(states=states[washout:],
                         start_step=start_index + washout + 1)


@dataclass
class TrainedObserver:
    variant: str
    spec: object
    input_vars: list
    target_names: list
    square_targets: tuple
    washout: int
    norm_stats: NormStats
    basic_weights: ReservoirWeights
    basic_readout: Readout
    basic_bank: AttentionBank = None
    lam: float = None
    residual_weights: ResidualWeights = None
    residual_readout: Readout = None
    residual_bank: AttentionBank = None
    meta: dict = field(default_factory=dict)

    @property
    def has_residual(self):
        return self.residual_readout is not None

    @property
    def input_positions(self):
        base = {n: i for i, n in enumerate(self.target_names)}
        return [base[v] for v in self.input_vars]


@dataclass
class EvalResult:
    target_names: list
    mse_norm: np.ndarray
    mse_raw: np.ndarray
    residual_stats: dict = field(default_factory=dict)
    estimates_norm: np.ndarray = None


def _target_matrix(traj, square_targets):
    values = traj.values.copy()
    names = list(traj.var_names)
    for v in square_targets:
        i = names.index(v)
        values[:, i] = values[:, i] ** 2
        names[i] = f"{v}^2"
    return values, names


def _mav_var(ds, lo, hi, base):
    seg = ds[lo - base:hi - base]
    return {"mav": np.abs(seg).mean(axis=0), "var": seg.var(axis=0)}


def train_observer(variant, traj, input_vars, spec, train_len, *,
                   residual=None, sigma=1.0, n_c=50, h_mode="auto",
                   washout=DEFAULT_WASHOUT, square_targets=(),
                   eval_len=0, eval_targets_raw=None, keep_estimates=False):
    """Train one observer variant on the leading 1 + washout + train_len
    samples of ``traj`` and, when ``eval_len`` > 0, evaluate it on the
    immediately following samples with reservoir state carried continuously
    (no re-washout at segment boundaries).

    Targets are the full state (inputs included, so input residuals exist),
    with ``square_targets`` squared before normalization.  Normalization
    statistics come from the pre-inference span only.  When evaluating
    against a noise-free reference, pass its raw target matrix as
    ``eval_targets_raw``.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    w, t_len, f_len = washout, train_len, eval_len
    need = 1 + w + t_len + f_len
    m_steps = traj.n_steps
    if m_steps < need:
        raise ValueError(f"trajectory has {m_steps} samples, need {need}")
    m_steps = need  # ignore extra samples so runs are comparable

    targets_raw, target_names = _target_matrix(traj, square_targets)
    targets_raw = targets_raw[:m_steps]
    ref = Trajectory(dt=traj.dt, values=targets_raw[: 1 + w + t_len],
                     var_names=target_names)
    _, stats = normalize_series(ref)
    s = stats.apply(targets_raw)
    if set(input_vars) & set(square_targets):
        raise ValueError("measured input variables cannot be squared targets")
    input_pos = [target_names.index(v) for v in input_vars]
    u = s[:, input_pos]

    spec_used = ro_2d_spec(spec) if variant == "RO2d" else spec
    weights = build_reservoir(spec_used, len(input_vars))
    half = w + t_len // 2 + 1
    # train-time noise covers exactly the states this module's readout is
    # fitted on; beyond that the drive runs under inference conditions, so
    # split-trained variants harvest residuals free of noise response
    basic_fit_end = half if variant in ("ROR", "RORA") else w + t_len + 1
    noise_rng = substream(spec_used.seed, "state_noise")
    full_seq = drive(weights, spec_used, u[:-1], washout=w,
                     noise_steps=basic_fit_end - 1, noise_rng=noise_rng)
    # states_at(j) covers trajectory indices [w+1, m_steps)
    all_states = full_seq.states

    def st(lo, hi):
        return all_states[lo - (w + 1):hi - (w + 1)]

    tr_lo, tr_hi = w + 1, w + t_len + 1
    inf_lo, inf_hi = w + t_len + 1, m_steps

    lam = None
    basic_bank = residual_weights = residual_readout = residual_bank = None
    res_stats = {}
    basic_fit_interval = (tr_lo, tr_hi)

    if variant in ("RO", "ROA", "PRC", "RO2d"):
        kind = {"RO": "state", "RO2d": "state", "PRC": "polynomial",
                "ROA": "attention_augmented"}[variant]
        if variant == "ROA":
            basic_bank = build_attention(
                st(tr_lo, tr_hi), n_c, sigma, h_mode,
                rng=substream(spec_used.seed, "centers"))
        basic_readout = fit_readout(st(tr_lo, tr_hi), s[tr_lo:tr_hi],
                                    spec_used.beta, feature_kind=kind,
                                    bank=basic_bank)
        est_inf = (apply_readout(basic_readout, st(inf_lo, inf_hi),
                                 bank=basic_bank)
                   if f_len > 0 else None)
    else:
        residual = residual or ResidualSpec()
        lam = residual.lam
        fit_hi = half if variant in ("ROR", "RORA") else tr_hi
        basic_fit_interval = (tr_lo, fit_hi)
        kind = "attention_augmented" if variant == "RORA" else "state"
        if variant == "RORA":
            basic_bank = build_attention(
                st(tr_lo, fit_hi), n_c, sigma, h_mode,
                rng=substream(spec_used.seed, "centers"))
        basic_readout = fit_readout(st(tr_lo, fit_hi), s[tr_lo:fit_hi],
                                    spec_used.beta, feature_kind=kind,
                                    bank=basic_bank)
        est_all = apply_readout(basic_readout, st(tr_lo, m_steps),
                                bank=basic_bank)  # indices [tr_lo, m_steps)
        du = u[tr_lo:m_steps] - est_all[:, input_pos]
        ds = s[tr_lo:m_steps] - est_all

        residual_weights = build_residual(spec_used, residual, weights)
        res_seq = drive_residual(
            residual_weights, spec_used, lam, weights.a,
            st(tr_lo, m_steps - 1), du[:-1], start_index=tr_lo,
            noise_steps=t_len - 1,
            noise_rng=substream(spec_used.seed, "state_noise_res"))
        res_states = res_seq.states  # trajectory indices [tr_lo+1, m_steps)

        def rst(lo, hi):
            return res_states[lo - (tr_lo + 1):hi - (tr_lo + 1)]

        if variant in ("ROR", "RORA"):
            rfit_lo, rfit_hi = half, tr_hi
        else:  # ROR-al: own washout inside the full training interval
            rfit_lo, rfit_hi = tr_lo + 1 + w, tr_hi
        if rfit_hi - rfit_lo < 2:
            raise ValueError("insufficient data after splits and washouts")
        if variant == "RORA":
            residual_bank = build_attention(
                rst(rfit_lo, rfit_hi), n_c, sigma, h_mode,
                rng=substream(spec_used.seed, "centers_res"))
        residual_readout = fit_readout(
            rst(rfit_lo, rfit_hi), ds[rfit_lo - tr_lo:rfit_hi - tr_lo],
            spec_used.beta, feature_kind=kind, bank=residual_bank)
        res_stats["fit_interval"] = (rfit_lo, rfit_hi)
        res_stats["fit"] = _mav_var(ds, rfit_lo, rfit_hi, tr_lo)
        if f_len > 0:
            res_stats["inference"] = _mav_var(ds, inf_lo, inf_hi, tr_lo)
            corr = apply_readout(residual_readout, rst(inf_lo, inf_hi),
                                 bank=residual_bank)
            est_inf = est_all[inf_lo - tr_lo:inf_hi - tr_lo] + corr
        else:
            est_inf = None

    observer = TrainedObserver(
        variant=variant, spec=spec_used, input_vars=list(input_vars),
        target_names=target_names, square_targets=tuple(square_targets),
        washout=w, norm_stats=stats, basic_weights=weights,
        basic_readout=basic_readout, basic_bank=basic_bank, lam=lam,
        residual_weights=residual_weights, residual_readout=residual_readout,
        residual_bank=residual_bank,
        meta={"train_len": t_len, "h_mode": h_mode, "sigma": sigma,
              "n_c": n_c, "basic_fit_interval": basic_fit_interval})

    if f_len == 0:
        return observer, None

    if eval_targets_raw is not None:
        truth_raw = _squared_reference(eval_targets_raw, traj.var_names,
                                       square_targets)[:m_steps]
        truth = stats.apply(truth_raw)
    else:
        truth_raw, truth = targets_raw, s
    err = est_inf - truth[inf_lo:inf_hi]
    mse_norm = (err * err).mean(axis=0)
    est_raw = stats.invert(est_inf)
    err_raw = est_raw - truth_raw[inf_lo:inf_hi]
    mse_raw = (err_raw * err_raw).mean(axis=0)
    result = EvalResult(target_names=target_names, mse_norm=mse_norm,
                        mse_raw=mse_raw, residual_stats=res_stats,
                        estimates_norm=est_inf if keep_estimates else None)
    return observer, result


def _squared_reference(values, var_names, square_targets):
    values = values.copy()
    for v in square_targets:
        i = list(var_names).index(v)
        values[:, i] = values[:, i] ** 2
    return values


def train_ror(traj, input_vars, spec, train_len, **kw):
    """Split-interval residual calibration (basic on the first half,
    residual on the second-half inference errors)."""
    return train_observer("ROR", traj, input_vars, spec, train_len, **kw)


def train_ror_al(traj, input_vars, spec, train_len, **kw):
    """Ablation arm: both modules trained over the full interval, so the
    residual module sees reproduction (in-sample) residuals."""
    return train_observer("ROR-al", traj, input_vars, spec, train_len, **kw)


def train_roa(traj, input_vars, spec, train_len, **kw):
    return train_observer("ROA", traj, input_vars, spec, train_len, **kw)


def train_rora(traj, input_vars, spec, train_len, **kw):
    return train_observer("RORA", traj, input_vars, spec, train_len, **kw)


def apply_observer(observer, traj, washout=None):
    """Run a trained observer on fresh measured data (open loop).

    Returns (estimates_raw, start_step): raw-unit estimates of every target
    for trajectory indices [start_step, n_steps).  Residual variants spin up
    their second reservoir concurrently with the basic washout.
    """
    w = observer.washout if washout is None else washout
    targets_raw, _ = _target_matrix(traj, observer.square_targets)
    s = observer.norm_stats.apply(targets_raw)
    u = s[:, observer.input_positions]
    seq = drive(observer.basic_weights, observer.spec, u[:-1], washout=0)
    states = seq.states  # index j -> trajectory index j+1
    est = apply_readout(observer.basic_readout, states,
                        bank=observer.basic_bank)
    if observer.has_residual:
        du = u[1:] - est[:, observer.input_positions]
        res_seq = drive_residual(
            observer.residual_weights, observer.spec, observer.lam,
            observer.basic_weights.a, states[:-1], du[:-1], start_index=1)
        corr = apply_readout(observer.residual_readout, res_seq.states,
                             bank=observer.residual_bank)
        final = est[1:] + corr  # trajectory indices [2, n)
        start = max(w + 2, 2)
        return observer.norm_stats.invert(final[start - 2:]), start
    start = w + 1
    return observer.norm_stats.invert(est[start - 1:]), start
