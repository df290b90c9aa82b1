"""Numerical tolerances shared by every module."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-12
    symmetric: float = 1e-12
    trace: float = 1e-12
    psd_floor: float = -1e-10
    unit_norm: float = 1e-12
    orthogonal: float = 1e-10
    normalization: float = 1e-12
    factor_modulus: float = 1e-12
    imag_discard: float = 1e-12
    operator_norm: float = 1e-9
    # normalized discriminant 1 - (det(B)/2)^2 below which the trig eigensolver defers to Jacobi
    eig_degenerate: float = 1e-8
    jacobi_offdiag: float = 1e-15
    jacobi_max_sweeps: int = 50


TOL = Tolerances()
