"""Dense complex 2x2 / 4x4 helpers and a real symmetric 3x3 eigensolver.

Only the three shapes the rest of the package needs are supported; shape
mismatches raise immediately instead of broadcasting.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidInputError
from .tolerances import TOL


def _require(m, shape: tuple[int, int], dtype=complex) -> np.ndarray:
    arr = np.asarray(m, dtype=dtype)
    if arr.shape != shape:
        raise InvalidInputError(f"expected a {shape[0]}x{shape[1]} matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("matrix has non-finite entries")
    return arr


def is_hermitian(m: np.ndarray, tol: float = TOL.hermitian) -> bool:
    """Max entry-wise modulus of ``m - m^dagger`` within ``tol``."""
    m = np.asarray(m)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product of two 2x2 matrices, ``a`` acting on particle 1.

    The resulting basis order is (up-up, up-down, down-up, down-down).
    """
    return np.kron(_require(a, (2, 2)), _require(b, (2, 2)))


def trace_product(a, b) -> complex:
    """Tr(a @ b) for two 4x4 matrices without forming the product."""
    a = _require(a, (4, 4))
    b = _require(b, (4, 4))
    return complex(np.einsum("ij,ji->", a, b))


def _det3(b: np.ndarray) -> float:
    return float(
        b[0, 0] * (b[1, 1] * b[2, 2] - b[1, 2] * b[2, 1])
        - b[0, 1] * (b[1, 0] * b[2, 2] - b[1, 2] * b[2, 0])
        + b[0, 2] * (b[1, 0] * b[2, 1] - b[1, 1] * b[2, 0])
    )


def _jacobi_eigenvalues(m: np.ndarray) -> np.ndarray:
    a = m.copy()
    scale = max(np.max(np.abs(a)), 1.0)
    for _ in range(TOL.jacobi_max_sweeps):
        off = math.sqrt(a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2)
        if off <= TOL.jacobi_offdiag * scale:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            if a[p, q] == 0.0:
                continue
            theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
            t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
            c = 1.0 / math.sqrt(t * t + 1.0)
            s = t * c
            rot = np.eye(3)
            rot[p, p] = rot[q, q] = c
            rot[p, q] = s
            rot[q, p] = -s
            a = rot.T @ a @ rot
    return np.sort(np.diag(a))[::-1]


def symmetric3_eigenvalues(m) -> np.ndarray:
    """Eigenvalues of a real symmetric 3x3 matrix in descending order.

    Uses the trigonometric solution of the characteristic cubic. When the
    cubic is close to having a repeated root the ``acos`` step loses half
    the working precision, so those cases go through cyclic Jacobi instead.
    """
    a = _require(m, (3, 3), dtype=float)
    scale = max(np.max(np.abs(a)), 1.0)
    if np.max(np.abs(a - a.T)) > TOL.symmetric * scale:
        raise InvalidInputError("matrix is not symmetric")
    a = 0.5 * (a + a.T)

    off = a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2
    if off == 0.0:
        return np.sort(np.diag(a))[::-1].copy()

    q = np.trace(a) / 3.0
    p2 = (a[0, 0] - q) ** 2 + (a[1, 1] - q) ** 2 + (a[2, 2] - q) ** 2 + 2.0 * off
    p = math.sqrt(p2 / 6.0)
    half_det = _det3((a - q * np.eye(3)) / p) / 2.0
    half_det = min(1.0, max(-1.0, half_det))
    if 1.0 - half_det * half_det < TOL.eig_degenerate:
        return _jacobi_eigenvalues(a)

    phi = math.acos(half_det) / 3.0
    largest = q + 2.0 * p * math.cos(phi)
    smallest = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    middle = 3.0 * q - largest - smallest
    return np.array([largest, middle, smallest])
