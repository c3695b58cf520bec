"""
Counter-based random streams.

Every random draw of a scenario comes from a Philox generator whose key is
derived from the scenario seed and whose counter encodes what the stream is
used for, the UE drop and the Monte Carlo trial. Streams therefore do not
depend on the order in which trials are evaluated nor on the number of
worker threads.

Licensed under The MIT License
Written by Jean Da Rolt
"""
import numpy as np

from xlmimo.utils.exceptions import ConfigError


STREAM_KINDS = {
    'geometry': 0,
    'los': 1,
    'selection': 2,
    'pilots': 3,
    'channel': 4,
    'noise': 5,
    'allocation': 6,
    'book': 7,
}


def stream_key(seed):
    """Philox key of a scenario seed."""
    return np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)


def stream(seed, kind, drop=0, trial=0):
    """Returns the generator of one (kind, drop, trial) stream.

    Args:
        seed: scenario seed, nonnegative integer.
        kind: one of STREAM_KINDS.
        drop: UE drop index.
        trial: Monte Carlo trial index.

    Returns:
        numpy.random.Generator backed by Philox.
    """
    if kind not in STREAM_KINDS:
        raise ConfigError(f"Unknown random stream {kind}")
    if seed is None or seed < 0:
        raise ConfigError(f"Seed must be a nonnegative integer, got {seed}")
    # the first counter word is the block counter advanced by the draws
    counter = np.array([0, trial, drop, STREAM_KINDS[kind]], dtype=np.uint64)
    return np.random.Generator(
        np.random.Philox(key=stream_key(seed), counter=counter))


def complex_normal(rng, shape):
    """Circularly symmetric complex Gaussian samples with unit variance."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) \
        / np.sqrt(2)
