"""Direct numerical maximization of |<B_CHSH>| over the four measurement spheres.

This is an independent route to the maximal violation: it never looks at
the eigenvalues of T^T T, so agreement with ``horodecki_max_violation`` is a
genuine cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .montecarlo import check_seed, generator, unit_vectors
from .quantum_state import (
    MeasurementConfig,
    chsh_batch,
    chsh_expectation,
    correlation_matrix,
    validate_density_matrix,
)
from .tolerances import TOL

INITIAL_STEP = 0.5
ARMIJO = 1e-4
MAX_HALVINGS = 60


@dataclass(frozen=True)
class OptimizationResult:
    best_value: float
    best_config: MeasurementConfig
    restarts_used: int
    iterations: int
    converged: bool


def _euclidean_gradient(tmat: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    a, ap, b, bp = (vecs[..., k, :] for k in range(4))
    grad = np.empty_like(vecs)
    grad[..., 0, :] = (b + bp) @ tmat.T
    grad[..., 1, :] = (b - bp) @ tmat.T
    grad[..., 2, :] = (a + ap) @ tmat
    grad[..., 3, :] = (a - ap) @ tmat
    return grad


def _tangent(grad: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    return grad - np.sum(grad * vecs, axis=-1, keepdims=True) * vecs


def _normalize(vecs: np.ndarray) -> np.ndarray:
    return vecs / np.linalg.norm(vecs, axis=-1, keepdims=True)


def gradient(cfg: MeasurementConfig, rho) -> np.ndarray:
    """Riemannian gradient of <B_CHSH> on (S^2)^4, flattened as (a, a', b, b')."""
    tmat = correlation_matrix(rho)
    vecs = cfg.as_array()
    return _tangent(_euclidean_gradient(tmat, vecs), vecs).reshape(12)


def euclidean_gradient_norm(tmat, vecs) -> np.ndarray:
    """Norm of the unprojected gradient for configurations shaped ``(..., 4, 3)``."""
    grad = _euclidean_gradient(np.asarray(tmat, dtype=float), np.asarray(vecs, dtype=float))
    return np.linalg.norm(grad.reshape(*grad.shape[:-2], 12), axis=-1)


def _ascend(tmat, start, signs, max_iter, tol):
    """Batched projected gradient ascent of ``signs * <B>`` from each start."""
    x = start.copy()
    value = signs * chsh_batch(tmat, x)
    n = len(x)
    iterations = np.zeros(n, dtype=int)
    converged = np.zeros(n, dtype=bool)
    stalled = np.zeros(n, dtype=bool)

    for _ in range(max_iter):
        grad = signs[:, None, None] * _tangent(_euclidean_gradient(tmat, x), x)
        gnorm = np.linalg.norm(grad.reshape(n, 12), axis=1)
        converged |= gnorm < tol
        active = ~(converged | stalled)
        if not active.any():
            break
        iterations[active] += 1

        step = np.full(n, INITIAL_STEP)
        pending = active.copy()
        for _ in range(MAX_HALVINGS):
            idx = np.flatnonzero(pending)
            cand = _normalize(x[idx] + step[idx, None, None] * grad[idx])
            cand_value = signs[idx] * chsh_batch(tmat, cand)
            # sufficient increase, with slack for rounding in the objective itself
            slack = 4 * np.finfo(float).eps * np.maximum(np.abs(value[idx]), 1.0)
            ok = cand_value >= value[idx] + ARMIJO * step[idx] * gnorm[idx] ** 2 - slack
            x[idx[ok]] = cand[ok]
            value[idx[ok]] = cand_value[ok]
            pending[idx[ok]] = False
            step[idx[~ok]] *= 0.5
            if not pending.any():
                break
        stalled |= pending
    return x, value, iterations, converged


def maximize_violation(
    rho,
    restarts: int = 20,
    seed: int = 42,
    max_iter: int = 10_000,
    tol: float = 1e-9,
) -> OptimizationResult:
    """Multistart ascent of both +<B> and -<B>; the larger optimum wins.

    Restart ``i`` starts from a uniform point drawn from substream ``(seed, i)``,
    so results do not depend on how many restarts run side by side.
    """
    if isinstance(restarts, bool) or int(restarts) != restarts or restarts < 1:
        raise InvalidInputError(f"restarts must be a positive integer, got {restarts!r}")
    restarts = int(restarts)
    seed = check_seed(seed)
    rho = validate_density_matrix(rho)
    tmat = correlation_matrix(rho)

    starts = np.stack([unit_vectors(generator(seed, i), 4) for i in range(restarts)])
    start = np.concatenate([starts, starts])
    signs = np.concatenate([np.ones(restarts), -np.ones(restarts)])
    x, value, iterations, converged = _ascend(tmat, start, signs, max_iter, tol)

    best = int(np.argmax(value))
    cfg = MeasurementConfig.from_array(_normalize(x[best]))
    return OptimizationResult(
        best_value=abs(chsh_expectation(rho, cfg)),
        best_config=cfg,
        restarts_used=restarts,
        iterations=int(iterations[best]),
        converged=bool(converged[best]),
    )


def analytic_optimum_r1(a, a_prime) -> MeasurementConfig:
    """Maximally violating directions for the singlet built from orthogonal a, a'.

    Returns (a, a', (a + a')/sqrt2, (a - a')/sqrt2). With T = -I the CHSH
    value is -2 sqrt 2, i.e. |<B>| attains the Tsirelson bound.
    """
    a = np.asarray(a, dtype=float)
    a_prime = np.asarray(a_prime, dtype=float)
    for name, v in (("a", a), ("a_prime", a_prime)):
        if v.shape != (3,) or abs(np.linalg.norm(v) - 1.0) > TOL.unit_norm:
            raise InvalidInputError(f"{name} must be a unit 3-vector")
    if abs(a @ a_prime) > TOL.orthogonal:
        raise InvalidInputError(f"a and a_prime are not orthogonal (a . a' = {a @ a_prime:.3g})")
    # a . a' may be up to 1e-10 off zero, which would leave b, b' slightly off the sphere
    b = (a + a_prime) / math.sqrt(2.0)
    b_prime = (a - a_prime) / math.sqrt(2.0)
    return MeasurementConfig(a, a_prime, b / np.linalg.norm(b), b_prime / np.linalg.norm(b_prime))
