"""Invariant checks across all modules at reduced sample counts."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import decoherence, geometry, linalg_core, optimizer
from . import quantum_state as qs
from .montecarlo import generator, unit_vectors
from .tolerances import TOL


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _random_factors(rng, n, max_modulus=1.0):
    modulus = max_modulus * np.sqrt(rng.uniform(0.0, 1.0, n))
    return modulus * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, n))


def _random_hermitian(rng, dim):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return m + m.conj().T


def check_tensor_bilinear(rng, n):
    worst = 0.0
    for _ in range(n):
        alpha = complex(*rng.standard_normal(2))
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        diff = linalg_core.tensor_product(alpha * a, b) - alpha * linalg_core.tensor_product(a, b)
        worst = max(worst, np.max(np.abs(diff)))
    return worst <= 1e-12, f"max deviation {worst:.3g}"


def check_trace_conjugate(rng, n):
    worst = 0.0
    for _ in range(n):
        a, b = _random_hermitian(rng, 4), _random_hermitian(rng, 4)
        lhs = linalg_core.trace_product(a, b)
        rhs = linalg_core.trace_product(b.conj().T, a.conj().T).conjugate()
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    return worst <= 1e-12, f"max deviation {worst:.3g}"


def check_u_eigenstructure(rng, n):
    worst = 0.0
    floor = 0.0
    for r in _random_factors(rng, n):
        t = qs.correlation_matrix(qs.make_rho(r))
        eig = linalg_core.symmetric3_eigenvalues(t.T @ t)
        s = abs(r) ** 2
        worst = max(worst, np.max(np.abs(eig - np.array([1.0, s, s]))))
        floor = min(floor, eig.min())
    return worst <= 1e-10 and floor >= -1e-12, f"max deviation {worst:.3g}, min eigenvalue {floor:.3g}"


def check_rho_spectrum(rng, n):
    worst = 0.0
    for r in _random_factors(rng, n):
        rho = qs.validate_density_matrix(qs.make_rho(r))
        m = abs(r)
        expected = np.array([0.0, 0.0, (1 - m) / 2, (1 + m) / 2])
        worst = max(worst, np.max(np.abs(np.sort(np.linalg.eigvalsh(rho)) - np.sort(expected))))
    return worst <= 1e-10, f"max deviation {worst:.3g}"


def check_trace_vs_correlation_form(rng, n):
    worst = 0.0
    for r in _random_factors(rng, n):
        rho = qs.make_rho(r)
        cfg = qs.MeasurementConfig.from_array(unit_vectors(rng, 4))
        diff = qs.chsh_expectation(rho, cfg) - qs.chsh_expectation_via_t(qs.correlation_matrix(rho), cfg)
        worst = max(worst, abs(diff))
    return worst <= 1e-10, f"max |trace - T form| {worst:.3g}"


def check_horodecki_closed_form(rng, n):
    worst = 0.0
    phase_spread = 0.0
    for r in _random_factors(rng, n):
        value = qs.horodecki_max_violation(qs.make_rho(r))
        worst = max(worst, abs(value - 2.0 * math.sqrt(1.0 + abs(r) ** 2)))
        rotated = abs(r) * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
        phase_spread = max(phase_spread, abs(value - qs.horodecki_max_violation(qs.make_rho(rotated))))
    return worst <= 1e-10 and phase_spread <= 1e-12, f"closed form {worst:.3g}, phase spread {phase_spread:.3g}"


def check_two_env(rng, n):
    r1s, r2s = _random_factors(rng, n), _random_factors(rng, n)
    ok = all(
        np.array_equal(qs.make_rho_two_env(r1, r2), qs.make_rho(np.conj(r1) * r2)) for r1, r2 in zip(r1s, r2s)
    )
    return ok, "entry-exact"


def check_decoherence(rng, n):
    worst = 0.0
    exact_start = True
    real_when_balanced = 0.0
    for _ in range(n // 10 or 1):
        bath = decoherence.SpinBathSpec.random(int(rng.integers(1, 30)), int(rng.integers(2**63)), 0.0, 5.0)
        times = np.sort(rng.uniform(0.0, 100.0, 10))
        worst = max(worst, np.max(np.abs(decoherence.trajectory(bath, times).factors)))
        exact_start &= decoherence.decoherence_factor(bath, 0.0) == 1.0
        balanced = decoherence.SpinBathSpec(bath.couplings, np.full((bath.size, 2), 0.5))
        real_when_balanced = max(real_when_balanced, abs(decoherence.decoherence_factor(balanced, times[-1]).imag))
    r1s, r2s = _random_factors(rng, n), _random_factors(rng, n)
    mult = max(abs(abs(decoherence.effective_factor(a, b)) - abs(a) * abs(b)) for a, b in zip(r1s, r2s))
    ok = worst <= 1.0 + TOL.factor_modulus and exact_start and real_when_balanced == 0.0 and mult <= 1e-12
    return ok, f"max |r| {worst:.17g}, r(0)=1 {exact_start}, modulus product {mult:.3g}"


def _geometry_batches(rng, n, max_modulus=1.0, batches=20):
    per = max(1, n // batches)
    for r in _random_factors(rng, batches, max_modulus):
        yield complex(r), unit_vectors(rng, (per, 4))


def check_zp_reconstruction(rng, n):
    worst = 0.0
    for r, vecs in _geometry_batches(rng, n):
        tmat = qs.correlation_matrix(qs.make_rho(r))
        recon = geometry.z_part(vecs) + abs(r) * geometry.p_part(vecs, r)
        worst = max(worst, np.max(np.abs(recon - qs.chsh_batch(tmat, vecs))))
    return worst <= 1e-10, f"max |Z + |r|P - <B>| {worst:.3g}"


def check_p_bound(rng, n):
    worst = 0.0
    for r, vecs in _geometry_batches(rng, n):
        worst = max(worst, np.max(np.abs(geometry.p_part(vecs, r))))
    return worst <= qs.TSIRELSON + 1e-12, f"max |P| {worst:.17g}"


def check_triangle(rng, n):
    worst = -np.inf
    for r, vecs in _geometry_batches(rng, n):
        tmat = qs.correlation_matrix(qs.make_rho(r))
        gap = np.abs(qs.chsh_batch(tmat, vecs)) - (np.abs(geometry.z_part(vecs)) + qs.TSIRELSON * abs(r))
        worst = max(worst, gap.max())
    return worst <= 1e-12, f"max |<B>| - (|Z| + 2sqrt2|r|) {worst:.3g}"


def check_subset_and_caps(rng, n):
    outside = 0
    cap_failures = 0
    for r, vecs in _geometry_batches(rng, n, max_modulus=1.0 / math.sqrt(2.0)):
        if r == 0:
            continue
        in_l = geometry.membership(vecs, r, "L")
        in_e = geometry.membership(vecs, r, "E")
        outside += int(np.count_nonzero(in_l & ~in_e))
        cap_failures += int(np.count_nonzero(in_e & ~geometry.cap_conditions(vecs, r)))
    return outside == 0 and cap_failures == 0, f"L outside E: {outside}, E outside caps: {cap_failures}"


def check_volume(seed, n):
    details = []
    ok = True
    for r in (0.05, 0.1, 0.2, 0.3):
        est = geometry.estimate_volume(r, n, seed, "L")
        bound = geometry.analytic_bound_fraction(r)
        ok &= est.violating_fraction <= bound + 3 * est.ci95_halfwidth
        details.append(f"r={r}: {est.violating_fraction:.5f} <= {bound:.5f}")
    null = geometry.estimate_volume(0.0, n, seed, "L")
    ok &= null.hits == 0
    details.append(f"r=0 hits {null.hits}")
    return ok, "; ".join(details)


def check_determinism(seed, n):
    first = geometry.estimate_volume(1.0, n, seed, "L")
    again = geometry.estimate_volume(1.0, n, seed, "L")
    threaded = geometry.estimate_volume(1.0, n, seed, "L", workers=4)
    return first == again == threaded, f"hits {first.hits}, {again.hits}, {threaded.hits}"


def check_gradient(rng, n, h=1e-6):
    worst = 0.0
    for r in _random_factors(rng, n):
        rho = qs.make_rho(r)
        vecs = unit_vectors(rng, 4)
        cfg = qs.MeasurementConfig.from_array(vecs)
        analytic = optimizer.gradient(cfg, rho)
        numeric = np.empty(12)
        flat = vecs.reshape(12)
        for k in range(12):
            up, down = flat.copy(), flat.copy()
            up[k] += h
            down[k] -= h
            numeric[k] = (_trace_chsh(rho, up) - _trace_chsh(rho, down)) / (2 * h)
        numeric = optimizer._tangent(numeric.reshape(4, 3), vecs).reshape(12)
        worst = max(worst, np.linalg.norm(analytic - numeric) / np.linalg.norm(numeric))
    return worst < 1e-5, f"max relative error {worst:.3g}"


def _trace_chsh(rho, flat):
    a, ap, b, bp = flat.reshape(4, 3)
    bchsh = linalg_core.tensor_product(qs.spin_operator(a), qs.spin_operator(b + bp)) + linalg_core.tensor_product(
        qs.spin_operator(ap), qs.spin_operator(b - bp)
    )
    return linalg_core.trace_product(rho, bchsh).real


def check_optimizer(seed):
    worst = 0.0
    for r in (0.0, 0.5, 1.0):
        res = optimizer.maximize_violation(qs.make_rho(r), restarts=20, seed=seed)
        worst = max(worst, abs(res.best_value - 2.0 * math.sqrt(1.0 + r * r)))
    return worst < 1e-6, f"max |optimized - closed form| {worst:.3g}"


def check_z_lemma(seed, n):
    ok = all(geometry.verify_z_lemma(k, n, seed) for k in (0.1, 0.5, 0.999))
    return ok, "k in {0.1, 0.5, 0.999}"


def run_selftest(samples: int = 10_000, seed: int = 42) -> list[CheckResult]:
    """Run every check; each uses its own substream of ``seed``."""
    small = max(10, samples // 10)
    plan = [
        ("tensor_bilinear", lambda rng: check_tensor_bilinear(rng, small)),
        ("trace_conjugate_symmetry", lambda rng: check_trace_conjugate(rng, small)),
        ("u_eigenstructure", lambda rng: check_u_eigenstructure(rng, small)),
        ("rho_spectrum", lambda rng: check_rho_spectrum(rng, small)),
        ("trace_vs_correlation_form", lambda rng: check_trace_vs_correlation_form(rng, small)),
        ("horodecki_closed_form", lambda rng: check_horodecki_closed_form(rng, small)),
        ("two_environment_equivalence", lambda rng: check_two_env(rng, small)),
        ("decoherence_factor_bounds", lambda rng: check_decoherence(rng, samples)),
        ("zp_reconstruction", lambda rng: check_zp_reconstruction(rng, samples)),
        ("p_bound", lambda rng: check_p_bound(rng, samples)),
        ("triangle_step", lambda rng: check_triangle(rng, samples)),
        ("subset_and_caps", lambda rng: check_subset_and_caps(rng, samples)),
        ("volume_bound", lambda rng: check_volume(seed, samples)),
        ("determinism", lambda rng: check_determinism(seed, samples)),
        ("gradient_finite_difference", lambda rng: check_gradient(rng, max(10, samples // 100))),
        ("optimizer_vs_horodecki", lambda rng: check_optimizer(seed)),
        ("z_lemma", lambda rng: check_z_lemma(seed, samples)),
    ]
    results = []
    for index, (name, check) in enumerate(plan):
        try:
            passed, detail = check(generator(seed, 1_000_000 + index))
        except Exception as exc:  # a crash inside a check is a failed check, not a crashed report
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(passed), detail))
    return results
