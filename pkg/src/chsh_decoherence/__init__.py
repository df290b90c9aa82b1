"""Decoherence of a Bell pair and the CHSH inequality.

Two effects are quantified for the singlet whose second particle decoheres
with factor ``r``: the maximal CHSH value falls to ``2 sqrt(1 + |r|^2)``, and
the fraction of measurement directions that violate the inequality is at
most ``8 |r|^2``.
"""

from .decoherence import SpinBathSpec, Trajectory, decoherence_factor, effective_factor, trajectory
from .errors import InvalidInputError, InvariantError
from .geometry import (
    VolumeEstimate,
    ZPDecomposition,
    analytic_bound_fraction,
    cap_area,
    estimate_volume,
    in_E,
    in_L,
    verify_z_lemma,
    zp_decompose,
)
from .linalg_core import symmetric3_eigenvalues, tensor_product, trace_product
from .optimizer import OptimizationResult, analytic_optimum_r1, gradient, maximize_violation
from .quantum_state import (
    MeasurementConfig,
    chsh_expectation,
    chsh_expectation_via_t,
    correlation_matrix,
    horodecki_max_violation,
    make_bchsh,
    make_rho,
    make_rho_two_env,
    reduced_single_particle,
)

__version__ = "0.1.0"
