"""Two-qubit states under pointer-basis decoherence and their CHSH values.

Basis order everywhere is (up-up, up-down, down-up, down-down), particle 1
being the left tensor factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, InvariantError
from .linalg_core import is_hermitian, symmetric3_eigenvalues, tensor_product, trace_product
from .tolerances import TOL

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

TSIRELSON = 2.0 * math.sqrt(2.0)


def as_factor(r) -> complex:
    """Validate a decoherence factor and return it as a Python complex."""
    try:
        r = complex(r)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"cannot interpret {r!r} as a complex number") from exc
    if not (math.isfinite(r.real) and math.isfinite(r.imag)):
        raise InvalidInputError(f"decoherence factor {r} is not finite")
    if abs(r) > 1.0 + TOL.factor_modulus:
        raise InvalidInputError(f"|r| = {abs(r):.17g} exceeds 1 for r = {r}")
    return r


def _unit(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} must be a finite 3-vector")
    if abs(np.linalg.norm(v) - 1.0) > TOL.unit_norm:
        raise InvalidInputError(f"{name} is not a unit vector (norm {np.linalg.norm(v):.17g})")
    return v


@dataclass(frozen=True)
class MeasurementConfig:
    """Measurement directions (a, a', b, b'), a point of the product of four spheres."""

    a: np.ndarray
    a_prime: np.ndarray
    b: np.ndarray
    b_prime: np.ndarray

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            object.__setattr__(self, name, _unit(getattr(self, name), name))

    def as_array(self) -> np.ndarray:
        """Rows a, a', b, b' stacked into a (4, 3) array."""
        return np.stack([self.a, self.a_prime, self.b, self.b_prime])

    @classmethod
    def from_array(cls, vecs) -> "MeasurementConfig":
        vecs = np.asarray(vecs, dtype=float)
        if vecs.shape != (4, 3):
            raise InvalidInputError(f"expected a (4, 3) array, got {vecs.shape}")
        return cls(*vecs)


def validate_density_matrix(rho) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return ``rho`` as an array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4) or not np.all(np.isfinite(rho)):
        raise InvalidInputError("density matrix must be a finite 4x4 array")
    if not is_hermitian(rho):
        raise InvalidInputError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > TOL.trace:
        raise InvalidInputError(f"density matrix trace is {np.trace(rho)}, not 1")
    if np.linalg.eigvalsh(rho).min() < TOL.psd_floor:
        raise InvalidInputError("density matrix has a negative eigenvalue")
    return rho


def make_rho(r) -> np.ndarray:
    """Reduced state of the singlet pair when particle 2 has decoherence factor ``r``."""
    r = as_factor(r)
    rho = np.zeros((4, 4), dtype=complex)
    rho[1, 1] = rho[2, 2] = 0.5
    rho[1, 2] = -0.5 * r.conjugate()
    rho[2, 1] = -0.5 * r
    return rho


def make_rho_two_env(r1, r2) -> np.ndarray:
    """State when each particle decoheres in its own environment.

    Identical to ``make_rho`` evaluated at ``conj(r1) * r2``.
    """
    r1 = as_factor(r1)
    r2 = as_factor(r2)
    return make_rho(r1.conjugate() * r2)


def spin_operator(n) -> np.ndarray:
    """n . sigma for a real 3-vector n."""
    n = np.asarray(n, dtype=float)
    return n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z


def make_bchsh(cfg: MeasurementConfig) -> np.ndarray:
    """The CHSH operator a.s (x) (b+b').s + a'.s (x) (b-b').s."""
    bchsh = tensor_product(spin_operator(cfg.a), spin_operator(cfg.b + cfg.b_prime)) + tensor_product(
        spin_operator(cfg.a_prime), spin_operator(cfg.b - cfg.b_prime)
    )
    if not is_hermitian(bchsh):
        raise InvariantError("CHSH operator is not Hermitian")
    if np.abs(np.linalg.eigvalsh(bchsh)).max() > TSIRELSON + TOL.operator_norm:
        raise InvariantError("CHSH operator norm exceeds 2 sqrt 2")
    return bchsh


def chsh_expectation(rho, cfg: MeasurementConfig) -> float:
    """Tr(rho B_CHSH), evaluated through the full 4x4 trace."""
    value = trace_product(rho, make_bchsh(cfg))
    if abs(value.imag) > TOL.imag_discard:
        raise InvariantError(f"CHSH expectation has imaginary part {value.imag}")
    return value.real


def correlation_matrix(rho) -> np.ndarray:
    """t_nm = Tr(rho sigma_n (x) sigma_m), returned as a real 3x3 array."""
    rho = np.asarray(rho, dtype=complex)
    t = np.empty((3, 3), dtype=complex)
    for n, sn in enumerate(PAULIS):
        for m, sm in enumerate(PAULIS):
            t[n, m] = trace_product(rho, tensor_product(sn, sm))
    if np.max(np.abs(t.imag)) > TOL.imag_discard:
        raise InvariantError("correlation matrix has non-negligible imaginary part")
    return t.real.copy()


def chsh_expectation_via_t(tmat, cfg: MeasurementConfig) -> float:
    """(a, T(b+b')) + (a', T(b-b'))."""
    tmat = np.asarray(tmat, dtype=float)
    return float(cfg.a @ tmat @ (cfg.b + cfg.b_prime) + cfg.a_prime @ tmat @ (cfg.b - cfg.b_prime))


def chsh_batch(tmat, vecs) -> np.ndarray:
    """Vectorized CHSH value for configurations stacked as ``(..., 4, 3)``."""
    vecs = np.asarray(vecs, dtype=float)
    a, ap, b, bp = vecs[..., 0, :], vecs[..., 1, :], vecs[..., 2, :], vecs[..., 3, :]
    tmat = np.asarray(tmat, dtype=float)
    return np.einsum("...i,ij,...j->...", a, tmat, b + bp) + np.einsum("...i,ij,...j->...", ap, tmat, b - bp)


def horodecki_max_violation(rho) -> float:
    """Maximum of |<B_CHSH>| over all directions: 2 sqrt(M), M the top two eigenvalues of T^T T."""
    tmat = correlation_matrix(validate_density_matrix(rho))
    eig = symmetric3_eigenvalues(tmat.T @ tmat)
    return 2.0 * math.sqrt(max(eig[0] + eig[1], 0.0))


def reduced_single_particle(a, b, r) -> np.ndarray:
    """Single-particle state [[|a|^2, a b* r], [a* b r*, |b|^2]] in the pointer basis."""
    a = complex(a)
    b = complex(b)
    r = as_factor(r)
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > TOL.normalization:
        raise InvalidInputError("amplitudes are not normalized")
    return np.array(
        [[abs(a) ** 2, a * b.conjugate() * r], [a.conjugate() * b * r.conjugate(), abs(b) ** 2]],
        dtype=complex,
    )
