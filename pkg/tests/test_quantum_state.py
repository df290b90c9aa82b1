import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chsh_decoherence.errors import InvalidInputError
from chsh_decoherence.linalg_core import symmetric3_eigenvalues
from chsh_decoherence.montecarlo import unit_vectors
from chsh_decoherence.optimizer import analytic_optimum_r1
from chsh_decoherence.quantum_state import (
    SIGMA_Z,
    TSIRELSON,
    MeasurementConfig,
    chsh_expectation,
    chsh_expectation_via_t,
    correlation_matrix,
    horodecki_max_violation,
    make_bchsh,
    make_rho,
    make_rho_two_env,
    reduced_single_particle,
    spin_operator,
    validate_density_matrix,
)

from oracles import chsh_from_correlators, rho_from_environment, rho_from_two_environments

X, Y, Z = np.eye(3)
ALL_Z = MeasurementConfig(Z, Z, Z, Z)


@st.composite
def factors(draw, max_modulus=1.0):
    modulus = draw(st.floats(0, max_modulus))
    phase = draw(st.floats(0, 2 * math.pi))
    return complex(modulus * math.cos(phase), modulus * math.sin(phase))


@st.composite
def configs(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    return MeasurementConfig.from_array(unit_vectors(np.random.default_rng(seed), 4))


# --- make_rho -----------------------------------------------------------------


def test_rho_singlet_is_pure():
    rho = make_rho(1.0)
    assert np.trace(rho @ rho).real == pytest.approx(1.0, abs=1e-15)
    singlet = np.array([0, 1, -1, 0]) / math.sqrt(2)
    np.testing.assert_allclose(rho, np.outer(singlet, singlet), atol=1e-15)


def test_rho_fully_decohered():
    rho = make_rho(0.0)
    np.testing.assert_array_equal(rho, np.diag([0, 0.5, 0.5, 0]))
    assert np.trace(rho @ rho).real == pytest.approx(0.5)


def test_rho_off_diagonals():
    rho = make_rho(0.6)
    assert rho[1, 2] == pytest.approx(-0.3)
    assert rho[2, 1] == pytest.approx(-0.3)


def test_rho_rejects_unphysical_factor():
    with pytest.raises(InvalidInputError):
        make_rho(0.8 + 0.8j)


@given(factors())
def test_rho_matches_environment_partial_trace(r):
    np.testing.assert_allclose(make_rho(r), rho_from_environment(r), atol=1e-12)


@given(factors())
def test_rho_spectrum(r):
    rho = validate_density_matrix(make_rho(r))
    m = abs(r)
    expected = np.sort([0, 0, (1 - m) / 2, (1 + m) / 2])
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(rho)), expected, atol=1e-10)


# --- two environments ---------------------------------------------------------


def test_two_env_examples():
    np.testing.assert_array_equal(make_rho_two_env(1, 1), make_rho(1))
    np.testing.assert_array_equal(make_rho_two_env(1j, 1j), make_rho(1))
    np.testing.assert_array_equal(make_rho_two_env(0.5, 0.8), make_rho(0.4))


@given(factors(), factors())
def test_two_env_entry_exact(r1, r2):
    np.testing.assert_array_equal(make_rho_two_env(r1, r2), make_rho(np.conj(r1) * r2))


@given(factors(), factors())
def test_two_env_matches_partial_trace(r1, r2):
    np.testing.assert_allclose(make_rho_two_env(r1, r2), rho_from_two_environments(r1, r2), atol=1e-12)


# --- B_CHSH -------------------------------------------------------------------


def test_bchsh_all_z():
    np.testing.assert_allclose(make_bchsh(ALL_Z), 2 * np.kron(SIGMA_Z, SIGMA_Z))


def test_bchsh_maximal_family_spectrum():
    eig = np.sort(np.linalg.eigvalsh(make_bchsh(analytic_optimum_r1(X, Y))))
    np.testing.assert_allclose(eig, [-TSIRELSON, 0, 0, TSIRELSON], atol=1e-12)


@given(configs())
def test_bchsh_with_equal_b_reduces(cfg):
    cfg = MeasurementConfig(cfg.a, cfg.a_prime, cfg.b, cfg.b)
    np.testing.assert_allclose(make_bchsh(cfg), 2 * np.kron(spin_operator(cfg.a), spin_operator(cfg.b)), atol=1e-14)


@given(configs())
def test_bchsh_hermitian_and_bounded(cfg):
    b = make_bchsh(cfg)
    np.testing.assert_allclose(b, b.conj().T, atol=1e-12)
    assert np.abs(np.linalg.eigvalsh(b)).max() <= TSIRELSON + 1e-9


def test_config_rejects_non_unit():
    with pytest.raises(InvalidInputError):
        MeasurementConfig(X, Y, Z, np.array([1.0, 1.0, 0.0]))


# --- expectations -------------------------------------------------------------


def test_singlet_family_attains_tsirelson():
    # T = -I for the singlet, so the family gives -2 sqrt 2
    value = chsh_expectation(make_rho(1.0), analytic_optimum_r1(X, Y))
    assert value == pytest.approx(-TSIRELSON, abs=1e-12)
    assert abs(value) == pytest.approx(2 * math.sqrt(2), abs=1e-12)


@given(configs())
def test_no_violation_at_r0(cfg):
    assert abs(chsh_expectation(make_rho(0.0), cfg)) <= 2 + 1e-12


@given(factors())
def test_all_z_gives_minus_two(r):
    assert chsh_expectation(make_rho(r), ALL_Z) == pytest.approx(-2.0, abs=1e-14)


@settings(max_examples=200)
@given(factors(), configs())
def test_trace_form_matches_correlator_oracle(r, cfg):
    rho = make_rho(r)
    expected = chsh_from_correlators(rho_from_environment(r), cfg.a, cfg.a_prime, cfg.b, cfg.b_prime)
    assert chsh_expectation(rho, cfg) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=200)
@given(factors(), configs())
def test_trace_form_equals_correlation_form(r, cfg):
    rho = make_rho(r)
    assert chsh_expectation(rho, cfg) == pytest.approx(chsh_expectation_via_t(correlation_matrix(rho), cfg), abs=1e-10)


@given(factors(), configs())
def test_negating_alice_negates_value(r, cfg):
    flipped = MeasurementConfig(-cfg.a, -cfg.a_prime, cfg.b, cfg.b_prime)
    rho = make_rho(r)
    assert chsh_expectation(rho, flipped) == pytest.approx(-chsh_expectation(rho, cfg), abs=1e-12)


@pytest.mark.parametrize(
    "r, cfg, expected",
    [
        (1.0, analytic_optimum_r1(X, Y), -2 * math.sqrt(2)),
        (0.3 + 0.1j, ALL_Z, -2.0),
        (0.0, MeasurementConfig(X, Y, Z, X), 0.0),
    ],
)
def test_correlation_form_examples(r, cfg, expected):
    assert chsh_expectation_via_t(correlation_matrix(make_rho(r)), cfg) == pytest.approx(expected, abs=1e-12)


# --- correlation matrix -------------------------------------------------------


def test_correlation_matrix_singlet():
    np.testing.assert_allclose(correlation_matrix(make_rho(1.0)), -np.eye(3), atol=1e-15)


def test_correlation_matrix_decohered():
    np.testing.assert_allclose(correlation_matrix(make_rho(0.0)), np.diag([0, 0, -1.0]), atol=1e-15)


def test_correlation_matrix_complex_r():
    expected = [[-0.3, 0.4, 0], [-0.4, -0.3, 0], [0, 0, -1]]
    np.testing.assert_allclose(correlation_matrix(make_rho(0.3 + 0.4j)), expected, atol=1e-12)


@given(factors())
def test_correlation_matrix_closed_form(r):
    expected = [[-r.real, r.imag, 0], [-r.imag, -r.real, 0], [0, 0, -1]]
    t = correlation_matrix(make_rho(r))
    np.testing.assert_allclose(t, expected, atol=1e-12)
    assert np.abs(t).max() <= 1 + 1e-12


@given(factors())
def test_u_eigenvalues(r):
    t = correlation_matrix(make_rho(r))
    s = abs(r) ** 2
    np.testing.assert_allclose(symmetric3_eigenvalues(t.T @ t), [1, s, s], atol=1e-10)


# --- Horodecki ----------------------------------------------------------------


@pytest.mark.parametrize("r, expected", [(1.0, 2.8284271247), (0.0, 2.0), (0.5, 2.2360679775)])
def test_horodecki_examples(r, expected):
    assert horodecki_max_violation(make_rho(r)) == pytest.approx(expected, abs=1e-10)


@given(factors())
def test_horodecki_closed_form(r):
    assert horodecki_max_violation(make_rho(r)) == pytest.approx(2 * math.sqrt(1 + abs(r) ** 2), abs=1e-10)


@given(st.floats(0, 1), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_horodecki_depends_only_on_modulus(m, p1, p2):
    v1 = horodecki_max_violation(make_rho(m * np.exp(1j * p1)))
    v2 = horodecki_max_violation(make_rho(m * np.exp(1j * p2)))
    assert v1 == pytest.approx(v2, abs=1e-12)


def test_horodecki_on_a_generic_state():
    # product state |up>|up>: no correlations beyond t_zz = 1, maximum 2
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1
    assert horodecki_max_violation(rho) == pytest.approx(2.0)


def test_horodecki_rejects_invalid_state():
    with pytest.raises(InvalidInputError):
        horodecki_max_violation(np.eye(4))


# --- single particle ----------------------------------------------------------


def test_single_particle_examples():
    np.testing.assert_array_equal(reduced_single_particle(1, 0, 0.3), np.diag([1, 0]))
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(reduced_single_particle(s, s, 0), 0.5 * np.eye(2), atol=1e-15)
    np.testing.assert_allclose(reduced_single_particle(s, s, 0.5), 0.5 * np.array([[1, 0.5], [0.5, 1]]), atol=1e-15)


def test_single_particle_complex_entries():
    a, b, r = 0.6, 0.8j, 0.5j
    np.testing.assert_allclose(
        reduced_single_particle(a, b, r), [[0.36, a * np.conj(b) * r], [np.conj(a) * b * np.conj(r), 0.64]]
    )


def test_single_particle_rejects_unnormalized():
    with pytest.raises(InvalidInputError):
        reduced_single_particle(1, 1, 0.5)
