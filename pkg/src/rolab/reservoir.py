"""The traditional reservoir observer: random layer construction, state
evolution, readout training and inference, plus the node-doubled sizing
baseline and the polynomial-feature baseline.
"""
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import DegenerateMatrixError
from .numerics import centered_ridge_fit, scale_to_radius
from .rng import derived_seed, substream

DEFAULT_WASHOUT = 100

FEATURE_KINDS = ("state", "attention_augmented", "polynomial")


@dataclass
class ReservoirSpec:
    """Hyperparameters of one reservoir module.

    ``state_noise`` is the standard deviation of seeded Gaussian noise added
    to the pre-activation during training steps only (0 disables it; the
    update rule is then exactly the leaky-tanh recurrence).
    """

    d: int = 400
    density: float = 0.05
    alpha: float = 1.0
    xi: float = 1.0
    rho: float = 1.0
    gamma: float = 1.0
    beta: float = 1e-8
    seed: int = 0
    state_noise: float = 0.0

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must be in (0, 1]")
        if not 0 < self.density <= 1:
            raise ValueError("density must be in (0, 1]")
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.state_noise < 0:
            raise ValueError("state_noise must be nonnegative")


@dataclass
class ReservoirWeights:
    a: sp.csr_matrix
    w_in: np.ndarray


@dataclass
class Readout:
    w_out: np.ndarray
    bias: np.ndarray
    feature_kind: str = "state"


@dataclass
class StateSequence:
    """Reservoir states aligned with a source trajectory: states[k] is the
    state at trajectory sample ``start_step + k`` (the state produced from
    input u(t) belongs to sample t+1)."""

    states: np.ndarray
    start_step: int

    def __len__(self):
        return self.states.shape[0]


def sample_sparse_random(d, density, rng):
    """Erdos-Renyi mask over all d^2 cells, nonzero weights uniform [-1, 1]."""
    mask = rng.random((d, d)) < density
    weights = rng.uniform(-1.0, 1.0, (d, d))
    return sp.csr_matrix(np.where(mask, weights, 0.0))


def build_reservoir(spec, n_inputs):
    """Random recurrent matrix scaled to spectral radius rho and a dense
    input layer uniform in [-gamma, gamma]; fully determined by spec.seed."""
    if n_inputs < 1:
        raise ValueError("n_inputs must be >= 1")
    a_rng = substream(spec.seed, "matrix_a")
    a = None
    for _ in range(10):
        candidate = sample_sparse_random(spec.d, spec.density, a_rng)
        if candidate.nnz == 0:
            continue
        try:
            a = scale_to_radius(candidate, spec.rho)
            break
        except DegenerateMatrixError:
            continue
    if a is None:
        raise DegenerateMatrixError(
            f"could not draw a scalable matrix at d={spec.d}, "
            f"density={spec.density} in 10 attempts")
    w_in = substream(spec.seed, "w_in").uniform(-spec.gamma, spec.gamma,
                                                (spec.d, n_inputs))
    return ReservoirWeights(a=a, w_in=w_in)


def drive(weights, spec, inputs, washout=DEFAULT_WASHOUT, r0=None,
          start_index=0, noise_steps=0, noise_rng=None):
    """Evolve r <- (1-alpha) r + alpha tanh(A r + W_in u + xi) from r(0)=0
    (or ``r0``) over the input rows, dropping the first ``washout`` states.

    ``start_index`` is the trajectory index of inputs[0]; the retained states
    then start at trajectory index start_index + washout + 1.
    """
    inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    if inputs.shape[0] == 1 and inputs.shape[1] != weights.w_in.shape[1]:
        inputs = inputs.T
    if washout >= inputs.shape[0]:
        raise ValueError("washout must be smaller than the input length")
    if noise_steps > 0 and spec.state_noise > 0 and noise_rng is None:
        noise_rng = substream(spec.seed, "state_noise")
    states, _ = kernels.drive_states(
        weights.a, weights.w_in, inputs, spec.alpha, spec.xi, r0=r0,
        noise_scale=spec.state_noise, noise_steps=noise_steps,
        noise_rng=noise_rng)
    return StateSequence(states=states[washout:],
                         start_step=start_index + washout + 1)


def polynomial_features(states):
    """The composite feature [r; r^2] of the polynomial baseline."""
    return np.hstack([states, states * states])


def make_features(states, feature_kind, bank=None):
    if feature_kind == "state":
        return states
    if feature_kind == "polynomial":
        return polynomial_features(states)
    if feature_kind == "attention_augmented":
        if bank is None:
            raise ValueError("attention_augmented features need a bank")
        from .enhance import attention_features

        return attention_features(states, bank)
    raise ValueError(f"unknown feature kind {feature_kind!r}")


def fit_readout(states, targets, beta, feature_kind="state", bank=None):
    """Centered ridge fit of the selected features onto the targets.

    ``states`` may be a StateSequence or a raw (T, d) array already aligned
    with ``targets``.
    """
    raw = states.states if isinstance(states, StateSequence) else states
    feats = make_features(raw, feature_kind, bank)
    w_out, bias = centered_ridge_fit(feats, targets, beta)
    return Readout(w_out=w_out, bias=bias, feature_kind=feature_kind)


def apply_readout(readout, states, bank=None):
    raw = states.states if isinstance(states, StateSequence) else states
    feats = make_features(raw, readout.feature_kind, bank)
    if feats.shape[1] != readout.w_out.shape[1]:
        raise ValueError(
            f"feature dimension {feats.shape[1]} does not match readout "
            f"width {readout.w_out.shape[1]}")
    return feats @ readout.w_out.T + readout.bias


def infer(weights, spec, readout, inputs, washout=DEFAULT_WASHOUT, bank=None):
    """Open-loop inference: drive the reservoir with the measured inputs and
    apply the readout to every post-washout state."""
    seq = drive(weights, spec, inputs, washout=washout)
    return apply_readout(readout, seq, bank=bank)


def ro_2d_spec(spec):
    """Same hyperparameters with the node count doubled and a fresh seed."""
    return replace(spec, d=2 * spec.d, seed=derived_seed(spec.seed, "run", 2))
