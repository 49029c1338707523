"""Named substreams of a single master seed.

Every random component (recurrent matrix, input layer, residual matrix,
attention centers, data initialisation, noise, per-run seeds) draws from its
own substream so each is independently reproducible and uncorrelated with
the others.
"""
import numpy as np

# stable tag registry; values are part of the on-disk/reporting contract
_TAGS = {
    "matrix_a": 1,
    "w_in": 2,
    "matrix_b": 3,
    "w_in_res": 4,
    "centers": 5,
    "centers_res": 6,
    "data_init": 7,
    "noise": 8,
    "run": 9,
    "state_noise": 10,
    "state_noise_res": 11,
    "ks_pick": 12,
}


def substream(seed, tag, index=0):
    """Generator for the (tag, index) substream of ``seed``."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=int(seed), spawn_key=(_TAGS[tag], int(index)))
    )


def derived_seed(seed, tag, index=0):
    """A 32-bit integer seed derived from the (tag, index) substream."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(_TAGS[tag], int(index)))
    return int(ss.generate_state(1)[0])
