"""Decoherence factors from a spin-bath environment.

The particle couples to N independent environment spins through
``sigma_z sigma_z^(k)`` terms of strength ``g_k``, free Hamiltonians
neglected. Each environment spin starting in ``alpha_k|up> + beta_k|down>``
contributes the overlap ``cos(2 g_k t) + i (|alpha_k|^2 - |beta_k|^2) sin(2 g_k t)``
(the sign of the imaginary part fixes the sign convention of ``g_k``); the
decoherence factor is their product.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .montecarlo import generator
from .quantum_state import as_factor
from .tolerances import TOL


@dataclass(frozen=True, eq=False)
class SpinBathSpec:
    couplings: np.ndarray
    weights: np.ndarray  # (N, 2): |alpha_k|^2, |beta_k|^2

    def __post_init__(self):
        g = np.asarray(self.couplings, dtype=float).reshape(-1)
        w = np.asarray(self.weights, dtype=float)
        if g.size < 1:
            raise InvalidInputError("couplings: bath needs at least one spin")
        if not np.all(np.isfinite(g)):
            raise InvalidInputError("couplings: entries must be finite")
        if w.ndim != 2 or w.shape[1] != 2:
            raise InvalidInputError("weights: expected a list of [w_up, w_down] pairs")
        if w.shape[0] != g.size:
            raise InvalidInputError(f"weights: {w.shape[0]} pairs for {g.size} couplings")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InvalidInputError("weights: entries must be finite and nonnegative")
        if np.any(np.abs(w.sum(axis=1) - 1.0) > TOL.normalization):
            raise InvalidInputError("weights: each pair must sum to 1")
        object.__setattr__(self, "couplings", g)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return self.couplings.size

    @classmethod
    def from_dict(cls, doc: dict) -> "SpinBathSpec":
        if not isinstance(doc, dict):
            raise InvalidInputError("bath document must be a JSON object")
        for key in ("couplings", "weights"):
            if key not in doc:
                raise InvalidInputError(f"{key}: missing field")
        try:
            couplings = np.asarray(doc["couplings"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise InvalidInputError("couplings: must be a list of numbers") from exc
        try:
            weights = np.asarray(doc["weights"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise InvalidInputError("weights: must be a list of number pairs") from exc
        if couplings.ndim != 1:
            raise InvalidInputError("couplings: must be a flat list of numbers")
        return cls(couplings, weights)

    @classmethod
    def from_json(cls, path) -> "SpinBathSpec":
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"{path}: not valid JSON ({exc.msg})") from exc
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        return {"couplings": self.couplings.tolist(), "weights": self.weights.tolist()}

    @classmethod
    def random(cls, n: int, seed: int, g_min: float = 0.5, g_max: float = 1.5) -> "SpinBathSpec":
        """Couplings uniform on [g_min, g_max]; |alpha_k|^2 uniform on [0, 1]."""
        if n < 1:
            raise InvalidInputError("bath needs at least one spin")
        rng = generator(seed)
        couplings = rng.uniform(g_min, g_max, size=n)
        up = rng.uniform(0.0, 1.0, size=n)
        return cls(couplings, np.column_stack([up, 1.0 - up]))


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    factors: np.ndarray  # complex


def _factors(bath: SpinBathSpec, t: np.ndarray) -> np.ndarray:
    phase = 2.0 * np.multiply.outer(t, bath.couplings)
    bias = bath.weights[:, 0] - bath.weights[:, 1]
    return np.prod(np.cos(phase) + 1j * bias * np.sin(phase), axis=-1)


def decoherence_factor(bath: SpinBathSpec, t: float) -> complex:
    """r(t) = <E_down(t)|E_up(t)> for the spin bath."""
    if not np.isfinite(t) or t < 0:
        raise InvalidInputError(f"time must be finite and nonnegative, got {t}")
    return complex(_factors(bath, np.asarray(float(t))))


def trajectory(bath: SpinBathSpec, times) -> Trajectory:
    times = np.asarray(times, dtype=float).reshape(-1)
    if np.any(~np.isfinite(times)) or np.any(times < 0):
        raise InvalidInputError("times must be finite and nonnegative")
    if np.any(np.diff(times) < 0):
        raise InvalidInputError("times must be in ascending order")
    return Trajectory(times, _factors(bath, times).astype(complex))


def effective_factor(r1, r2) -> complex:
    """Factor seen by the pair when both particles decohere independently: conj(r1) r2."""
    return as_factor(r1).conjugate() * as_factor(r2)
