"""Seeded random streams, uniform sphere sampling and binomial intervals.

Every stream is a PCG64 generator keyed by ``SeedSequence(seed, spawn_key=key)``.
Monte Carlo runs are cut into fixed-size chunks and chunk ``i`` always uses
key ``(i,)``, so the draws do not depend on how chunks are scheduled.
"""

from __future__ import annotations

import math
from statistics import NormalDist

import numpy as np

from .errors import InvalidInputError

CHUNK_SIZE = 1 << 16
Z95 = NormalDist().inv_cdf(0.975)


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise InvalidInputError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise InvalidInputError(f"seed must fit in an unsigned 64-bit integer, got {seed}")
    return seed


def generator(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(check_seed(seed), spawn_key=key)))


def unit_vectors(rng: np.random.Generator, shape) -> np.ndarray:
    """Uniform points on S^2 with array shape ``(*shape, 3)`` (normalized Gaussians)."""
    if isinstance(shape, int):
        shape = (shape,)
    v = rng.standard_normal((*shape, 3))
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    # a zero Gaussian triple has probability zero; redraw rather than divide by it
    while np.any(norm == 0.0):
        bad = (norm == 0.0)[..., 0]
        v[bad] = rng.standard_normal((int(bad.sum()), 3))
        norm = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / norm


def chunks(samples: int):
    """Yield ``(index, size)`` for the fixed chunk partition of ``samples`` draws."""
    for index, start in enumerate(range(0, samples, CHUNK_SIZE)):
        yield index, min(CHUNK_SIZE, samples - start)


def sample_configs(seed: int, chunk_index: int, size: int) -> np.ndarray:
    """The ``(size, 4, 3)`` block of configurations belonging to one chunk."""
    return unit_vectors(generator(seed, chunk_index), (size, 4))


def wilson_halfwidth(hits: int, n: int, z: float = Z95) -> float:
    """Half-width of the Wilson score interval for ``hits`` successes in ``n`` trials."""
    if n < 1:
        raise InvalidInputError("need at least one trial")
    p = hits / n
    denom = 1.0 + z * z / n
    return z / denom * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n))
