"""
Counter-based seed derivation

Every random draw in shadowpy comes from a generator keyed by
(seed, *keys) - e.g. (master_seed, sample_index, 'foreign') for a sample,
then (sample_seed, 'ccm') for one stage.  Streams never share state, so
adding samples or switching off a stage leaves every other draw untouched.
"""
import zlib

import numpy as np


def _key_to_int(key):
    if isinstance(key, str):
        return zlib.crc32(key.encode('utf-8'))
    key = int(key)
    if key < 0:
        raise ValueError('seed keys must be non-negative, got {}'.format(key))
    return key


def seed_sequence(seed, *keys):
    return np.random.SeedSequence(
        entropy=int(seed),
        spawn_key=tuple(_key_to_int(k) for k in keys)
    )


def make_rng(seed, *keys):
    """ independent numpy Generator for the stream (seed, *keys) """
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, *keys)))


def derive_seed(seed, *keys):
    """ 64-bit child seed for the stream (seed, *keys) """
    state = seed_sequence(seed, *keys).generate_state(1, dtype=np.uint64)
    return int(state[0])
