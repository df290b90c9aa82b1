"""Size of the set of CHSH-violating measurement directions.

For the decohered singlet the CHSH value splits as ``Z + |r| P`` where ``Z``
only involves the z-components of the four directions and ``|P| <= 2 sqrt 2``.
Any violating configuration therefore lies in

    E(r) = {|Z| > 2 - 2 sqrt(2) |r|},

which forces one of (a, a') and one of (b, b') into the polar caps
``|z| > 1 - sqrt(2)|r|``. Counting the four resulting product sets bounds the
violating fraction of (S^2)^4 by ``8 |r|^2``. This module provides the
pieces of that argument plus a seeded Monte Carlo estimator to compare
against it.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Literal, NamedTuple

import numpy as np

from .errors import InvalidInputError
from .montecarlo import check_seed, chunks, generator, sample_configs, unit_vectors, wilson_halfwidth
from .quantum_state import (
    MeasurementConfig,
    as_factor,
    chsh_batch,
    chsh_expectation,
    correlation_matrix,
    make_rho,
)

SetName = Literal["L", "E"]
SQRT2 = math.sqrt(2.0)


class ZPDecomposition(NamedTuple):
    z_part: float
    p_part: float


@dataclass(frozen=True)
class VolumeEstimate:
    violating_fraction: float
    sample_count: int
    seed: int
    ci95_halfwidth: float
    hits: int

    def to_dict(self) -> dict:
        return asdict(self)


def z_part(vecs) -> np.ndarray:
    """-a_z (b_z + b'_z) - a'_z (b_z - b'_z) for configurations shaped ``(..., 4, 3)``."""
    vecs = np.asarray(vecs, dtype=float)
    az, apz, bz, bpz = (vecs[..., k, 2] for k in range(4))
    return -az * (bz + bpz) - apz * (bz - bpz)


def _rotate(c, s, v):
    return np.stack([c * v[..., 0] - s * v[..., 1], s * v[..., 0] + c * v[..., 1]], axis=-1)


def p_part(vecs, r) -> np.ndarray:
    """In-plane term a_par . R(b_par + b'_par) + a'_par . R(b_par - b'_par).

    R rotates the xy-plane by alpha, cos(alpha) = -Re r/|r|, sin(alpha) = -Im r/|r|.
    ``r`` may be a scalar or an array broadcasting against ``vecs.shape[:-2]``.
    Where r = 0 the angle is undefined and P is reported as 0; it enters the
    CHSH value only through |r| P.
    """
    vecs = np.asarray(vecs, dtype=float)
    r = np.asarray(r, dtype=complex)
    modulus = np.abs(r)
    safe = np.where(modulus > 0, modulus, 1.0)
    c = np.where(modulus > 0, -r.real / safe, 1.0)
    s = np.where(modulus > 0, -r.imag / safe, 0.0)
    a, ap, b, bp = (vecs[..., k, :2] for k in range(4))
    p = np.sum(a * _rotate(c, s, b + bp), axis=-1) + np.sum(ap * _rotate(c, s, b - bp), axis=-1)
    return np.where(modulus > 0, p, 0.0)


def zp_decompose(cfg: MeasurementConfig, r) -> ZPDecomposition:
    r = as_factor(r)
    vecs = cfg.as_array()
    return ZPDecomposition(float(z_part(vecs)), float(p_part(vecs, r)))


def e_threshold(r) -> float:
    return 2.0 - 2.0 * SQRT2 * abs(complex(r))


def in_L(cfg: MeasurementConfig, r) -> bool:
    """Strict CHSH violation |<B>| > 2 for the decohered singlet."""
    return abs(chsh_expectation(make_rho(r), cfg)) > 2.0


def in_E(cfg: MeasurementConfig, r) -> bool:
    r = as_factor(r)
    return bool(abs(z_part(cfg.as_array())) > e_threshold(r))


def cap_area(delta: float) -> float:
    """Area of {|z| > 1 - delta} on the unit sphere (both polar caps)."""
    if not 0.0 <= delta <= 1.0:
        raise InvalidInputError(f"cap parameter must lie in [0, 1], got {delta}")
    return 4.0 * math.pi * delta


def analytic_bound_fraction(r) -> float:
    """Upper bound on the violating fraction of (S^2)^4, min(1, 8 |r|^2).

    Four product sets, each with two full spheres and two caps of half-height
    sqrt(2)|r|; each has normalized measure (cap_area / 4 pi)^2 = 2 |r|^2.
    """
    modulus = abs(as_factor(r))
    if SQRT2 * modulus >= 1.0:
        return 1.0
    cap_fraction = cap_area(SQRT2 * modulus) / (4.0 * math.pi)
    return min(1.0, 4.0 * cap_fraction**2)


def membership(vecs, r, which: SetName = "L", tmat=None) -> np.ndarray:
    """Boolean mask of configurations (``(..., 4, 3)``) lying in L(r) or E(r)."""
    r = as_factor(r)
    if which == "L":
        if tmat is None:
            tmat = correlation_matrix(make_rho(r))
        return np.abs(chsh_batch(tmat, vecs)) > 2.0
    if which == "E":
        return np.abs(z_part(vecs)) > e_threshold(r)
    raise InvalidInputError(f"unknown set {which!r}; expected 'L' or 'E'")


def cap_conditions(vecs, r) -> np.ndarray:
    """(|a_z| or |a'_z| above 1 - sqrt2|r|) and (|b_z| or |b'_z| above it)."""
    vecs = np.asarray(vecs, dtype=float)
    k = 1.0 - SQRT2 * abs(complex(r))
    z = np.abs(vecs[..., 2])
    return ((z[..., 0] > k) | (z[..., 1] > k)) & ((z[..., 2] > k) | (z[..., 3] > k))


def _count_chunk(seed: int, index: int, size: int, r: complex, which: SetName, tmat) -> int:
    return int(np.count_nonzero(membership(sample_configs(seed, index, size), r, which, tmat)))


def estimate_volume(r, samples: int, seed: int = 42, which: SetName = "L", workers: int = 1) -> VolumeEstimate:
    """Fraction of uniformly drawn configurations in L(r) or E(r).

    The result depends only on ``(r, samples, seed, which)``; ``workers``
    changes scheduling, not the draws.
    """
    r = as_factor(r)
    seed = check_seed(seed)
    if isinstance(samples, bool) or int(samples) != samples or samples < 1:
        raise InvalidInputError(f"samples must be a positive integer, got {samples!r}")
    samples = int(samples)
    if which not in ("L", "E"):
        raise InvalidInputError(f"unknown set {which!r}; expected 'L' or 'E'")
    tmat = correlation_matrix(make_rho(r)) if which == "L" else None
    parts = list(chunks(samples))
    if workers > 1 and len(parts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda p: _count_chunk(seed, p[0], p[1], r, which, tmat), parts))
    else:
        counts = [_count_chunk(seed, i, n, r, which, tmat) for i, n in parts]
    hits = sum(counts)
    return VolumeEstimate(hits / samples, samples, seed, wilson_halfwidth(hits, samples), hits)


def verify_z_lemma(k: float, trials: int, seed: int = 42) -> bool:
    """Sample configurations with |a_z|, |a'_z| <= k and check |Z| <= 2k on all of them.

    a and a' are drawn uniformly from the band |z| <= k (on the sphere, z is
    uniform on [-1, 1], so the band is sampled exactly by drawing z uniform on
    [-k, k] and an independent azimuth); b and b' are unrestricted.
    """
    if not 0.0 < k < 1.0:
        raise InvalidInputError(f"k must lie in (0, 1), got {k}")
    if trials < 1:
        raise InvalidInputError("need at least one trial")
    rng = generator(seed)
    vecs = np.empty((trials, 4, 3))
    z = rng.uniform(-k, k, size=(trials, 2))
    phi = rng.uniform(0.0, 2.0 * math.pi, size=(trials, 2))
    rho = np.sqrt(1.0 - z * z)
    vecs[:, :2, 0] = rho * np.cos(phi)
    vecs[:, :2, 1] = rho * np.sin(phi)
    vecs[:, :2, 2] = z
    vecs[:, 2:, :] = unit_vectors(rng, (trials, 2))
    return bool(np.all(np.abs(z_part(vecs)) <= 2.0 * k + 1e-12))
