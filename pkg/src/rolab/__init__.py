"""rolab: reservoir observers for chaotic systems.

Implements the traditional reservoir observer and its residual-calibrated
(ROR), attention-augmented (ROA) and combined (RORA) variants, the RO-2d and
polynomial-feature baselines, data generators for four chaotic benchmark
systems, a transfer-entropy analyzer, and a batch experiment harness.
"""
from .dynamics import (KsSpec, NoiseSpec, OdeSystemSpec, Trajectory,
                       add_uniform_noise, normalize_series, simulate_ks,
                       simulate_ode)
from .enhance import (AttentionBank, ResidualSpec, TrainedObserver,
                      apply_observer, attention_vector, attention_weight,
                      build_attention, drive_residual, train_observer,
                      train_roa, train_ror, train_ror_al, train_rora)
from .infotheory import TeSpec, discretize, te_profile, transfer_entropy
from .kernels import COMPILED
from .numerics import (centered_ridge_fit, scale_to_radius, spectral_radius,
                       svht_rank, truncated_svd)
from .reservoir import (Readout, ReservoirSpec, ReservoirWeights,
                        StateSequence, build_reservoir, drive, fit_readout,
                        infer, ro_2d_spec)

__version__ = "0.1.0"
