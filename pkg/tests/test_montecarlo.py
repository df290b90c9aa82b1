import math

import numpy as np
import pytest

from chsh_decoherence.errors import InvalidInputError
from chsh_decoherence.montecarlo import CHUNK_SIZE, check_seed, chunks, generator, unit_vectors, wilson_halfwidth


def wilson_bounds(k, n, z=1.959963984540054):
    # roots of (p - k/n)^2 = z^2 p (1 - p) / n
    a = 1 + z * z / n
    b = -(2 * k / n + z * z / n)
    c = (k / n) ** 2
    disc = math.sqrt(b * b - 4 * a * c)
    return (-b - disc) / (2 * a), (-b + disc) / (2 * a)


@pytest.mark.parametrize("k, n", [(0, 10), (3, 10), (70845, 10**6), (10, 10), (1, 1)])
def test_wilson_matches_quadratic_roots(k, n):
    lo, hi = wilson_bounds(k, n)
    assert wilson_halfwidth(k, n) == pytest.approx((hi - lo) / 2, rel=1e-12)


def test_wilson_rejects_empty():
    with pytest.raises(InvalidInputError):
        wilson_halfwidth(0, 0)


def test_unit_vectors_on_sphere():
    v = unit_vectors(generator(1), (1000, 4))
    assert v.shape == (1000, 4, 3)
    np.testing.assert_allclose(np.linalg.norm(v, axis=-1), 1, atol=1e-15)


def test_unit_vectors_uniform_moments():
    v = unit_vectors(generator(2), 400000)
    # uniform on S^2: mean 0, E[x_i x_j] = delta_ij / 3, z uniform on [-1, 1]
    np.testing.assert_allclose(v.mean(axis=0), 0, atol=5e-3)
    np.testing.assert_allclose(v.T @ v / len(v), np.eye(3) / 3, atol=5e-3)
    hist, _ = np.histogram(v[:, 2], bins=10, range=(-1, 1))
    np.testing.assert_allclose(hist / len(v), 0.1, atol=3e-3)


def test_chunks_partition():
    parts = list(chunks(3 * CHUNK_SIZE + 17))
    assert [i for i, _ in parts] == [0, 1, 2, 3]
    assert sum(n for _, n in parts) == 3 * CHUNK_SIZE + 17
    assert parts[-1][1] == 17


def test_substreams_are_distinct_and_reproducible():
    a = generator(42, 0).standard_normal(5)
    b = generator(42, 1).standard_normal(5)
    assert not np.array_equal(a, b)
    np.testing.assert_array_equal(a, generator(42, 0).standard_normal(5))


@pytest.mark.parametrize("seed", [-1, 2**64, 1.5, "3", True])
def test_check_seed_rejects(seed):
    with pytest.raises(InvalidInputError):
        check_seed(seed)


def test_check_seed_accepts_u64_max():
    assert check_seed(2**64 - 1) == 2**64 - 1
