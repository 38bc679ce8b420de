import math

import numpy as np
import pytest
from scipy import integrate

from src.errors import DomainError, ResourceError
from src.params_units import TWO_PI, PhysicalParams
from src.rotor_model import (
    build_rotor,
    exact_spinor_spectrum,
    fock_basis,
    ground_state_density,
    ground_state_width,
    harmonic_depletion,
    potential_full,
    potential_harmonic,
    quartic_beta,
    spectrum_table,
    spin_operators,
)


def unit_params(n_atoms: int, q: float, c2: float = 1.0) -> PhysicalParams:
    return PhysicalParams(c2=c2, q=q, n_atoms=n_atoms, gamma=1.0)


# ══════════════════════════════════════════════════════════════════════════════
#  HARMONIC ROTOR
# ══════════════════════════════════════════════════════════════════════════════

def test_build_rotor_fig1(fig1_params):
    model = build_rotor(fig1_params)
    assert model.inertia_i == pytest.approx(795.77, rel=1e-5)
    assert model.omega_theta == pytest.approx(5.6227, rel=1e-4)
    assert model.omega_theta / TWO_PI == pytest.approx(0.895, rel=1e-3)
    assert model.bracket == pytest.approx(1.0 + 1.5e-5 + 1.0e-3, rel=1e-15)


def test_build_rotor_identities(fig1_params):
    model = build_rotor(fig1_params)
    p = fig1_params
    assert model.omega_theta ** 2 == pytest.approx(2.0 * p.q * p.c2 * model.bracket, rel=1e-15)
    assert model.xi_theta / (p.u0 * p.n_atoms * model.bracket) == pytest.approx(1.0, rel=1e-15)
    assert model.xi_theta == pytest.approx(6.29e7, rel=1e-3)


def test_default_damping_is_one_percent_of_omega_theta(fig1_params):
    model = build_rotor(fig1_params)
    assert model.damping_rate == pytest.approx(1.0e-2 * model.omega_theta, rel=1e-14)
    explicit = build_rotor(fig1_params.with_updates(d_theta=3.0))
    assert explicit.d_theta == 3.0


def test_small_q_limit():
    params = PhysicalParams(c2=1.0, q=1.0e-12, n_atoms=100, u0=2.0, gamma=1.0)
    model = build_rotor(params)
    assert model.omega_theta < 1.0e-5
    assert model.xi_theta == pytest.approx(2.0 * 100 * (1.0 + 1.5 / 100), rel=1e-10)


def test_potentials_at_special_angles(fig1_params):
    p = fig1_params
    assert potential_full(0.0, p) == 0.0
    assert potential_full(math.pi / 2, p) == pytest.approx(p.q * (p.n_atoms + 1.5), rel=1e-14)
    assert potential_full(0.01, p) == pytest.approx(1.257, rel=1e-3)
    model = build_rotor(p)
    assert potential_harmonic(0.0, model) == 0.0
    assert potential_harmonic(model.theta_bar, model) == pytest.approx(
        0.5 * model.inertia_i * model.omega_theta ** 2 * model.theta_bar ** 2, rel=1e-15
    )


def test_harmonic_potential_matches_full_near_zero():
    # the two quadratic coefficients differ by q^2 N / 2 c2, so keep q/c2 tiny
    params = PhysicalParams(c2=1.0, q=1.0e-7, n_atoms=100000, gamma=1.0)
    model = build_rotor(params)
    ratio = potential_harmonic(1.0e-4, model) / potential_full(1.0e-4, params)
    assert ratio == pytest.approx(1.0, rel=1e-6)


def test_potentials_are_vectorized(fig1_params):
    theta = np.linspace(-0.1, 0.1, 11)
    values = potential_full(theta, fig1_params)
    assert values.shape == theta.shape
    np.testing.assert_allclose(values, values[::-1], rtol=1e-14)


def test_quartic_beta(fig1_params):
    p = fig1_params
    assert quartic_beta(p, 0.0) == pytest.approx(p.q * p.n_atoms / 3.0, rel=1e-15)
    assert quartic_beta(p, p.q / p.u0) == pytest.approx(0.0, abs=1e-9)
    assert quartic_beta(p, 3600.0) == pytest.approx(-7.54e10, rel=1e-3)
    with pytest.raises(DomainError):
        quartic_beta(p, -1.0)


# ══════════════════════════════════════════════════════════════════════════════
#  GROUND STATE
# ══════════════════════════════════════════════════════════════════════════════

def test_ground_state_width_modes():
    params = unit_params(200, q=1.0 / 20.0)
    assert ground_state_width(params, "scaled") == pytest.approx(0.0158, rel=1e-2)
    assert ground_state_width(params, "dimensional") == pytest.approx(0.125, rel=1e-2)
    with pytest.raises(DomainError):
        ground_state_width(params, "other")


def test_ground_state_width_shrinks_with_n():
    small = ground_state_width(unit_params(100, q=0.5))
    large = ground_state_width(unit_params(100000, q=0.5))
    assert large < small / 30.0
    assert ground_state_width(unit_params(100000, q=0.5), "scaled") < 1e-4


def test_ground_state_density_normalized(fig1_params):
    width = ground_state_width(fig1_params)
    total, _ = integrate.quad(
        lambda t: ground_state_density(t, fig1_params), -20 * width, 20 * width, epsabs=1e-13, epsrel=1e-12
    )
    assert total == pytest.approx(1.0, abs=1e-9)
    peak = ground_state_density(0.0, fig1_params)
    assert peak == pytest.approx(1.0 / math.sqrt(math.pi * width ** 2), rel=1e-14)
    assert ground_state_density(width, fig1_params) / peak == pytest.approx(math.exp(-1.0), rel=1e-14)


# ══════════════════════════════════════════════════════════════════════════════
#  EXACT DIAGONALIZATION
# ══════════════════════════════════════════════════════════════════════════════

def test_fock_basis_size_and_order():
    basis = fock_basis(2)
    assert len(basis) == 6
    assert basis[0] == (0, 0, 2)
    assert basis[-1] == (2, 0, 0)
    assert all(sum(state) == 2 for state in basis)
    assert len(fock_basis(60)) == 1891


def test_spin_operators_structure():
    ops = spin_operators(6)
    f2 = ops["f_squared"].toarray()
    np.testing.assert_allclose(f2, f2.T, atol=1e-12)
    assert np.linalg.eigvalsh(f2).min() >= -1e-9 * np.abs(f2).max()
    # F^2 eigenvalues are F(F+1) for F = N, N-2, ...
    levels = np.unique(np.round(np.linalg.eigvalsh(f2), 8))
    np.testing.assert_allclose(levels, [0.0, 6.0, 20.0, 42.0], atol=1e-8)
    # [F_z, F_+] = F_+
    fz, fp = ops["fz"].toarray(), ops["f_plus"].toarray()
    np.testing.assert_allclose(fz @ fp - fp @ fz, fp, atol=1e-12)


def test_exact_spectrum_q_zero_is_f_squared():
    spectrum = exact_spinor_spectrum(20, c2=1.0, q=0.0, k=6)
    assert spectrum.basis_dimension == 231
    assert spectrum.gap == pytest.approx(3.0 / 20.0, rel=1e-10)
    # F = 2 is five-fold degenerate
    np.testing.assert_allclose(spectrum.eigenvalues[1:6], [0.15] * 5, rtol=1e-10)
    assert spectrum.ground_n0_expectation == pytest.approx(20.0 / 3.0, rel=1e-8)


def test_exact_spectrum_regression_values():
    assert exact_spinor_spectrum(2, c2=1.0, q=0.3, k=2).gap == pytest.approx(1.417745, rel=1e-5)
    small = exact_spinor_spectrum(20, c2=1.0, q=0.02, k=2)
    assert small.gap == pytest.approx(0.187731, rel=1e-5)
    assert 20 - small.ground_n0_expectation == pytest.approx(4.4958, rel=1e-4)
    assert small.eigenvalues[0] == 0.0


def test_exact_spectrum_matches_rotor_in_regime():
    params = unit_params(40, q=0.02)
    spectrum = exact_spinor_spectrum(40, c2=1.0, q=0.02, k=6)
    omega_theta = build_rotor(params).omega_theta
    assert spectrum.gap == pytest.approx(0.190294, rel=1e-5)
    assert abs(spectrum.gap / omega_theta - 1.0) < 0.10
    depletion = 40 - spectrum.ground_n0_expectation
    assert depletion == pytest.approx(4.16794, rel=1e-4)
    assert abs(depletion / harmonic_depletion(params) - 1.0) < 0.15


def test_exact_spectrum_departs_from_rotor_out_of_regime():
    params = unit_params(40, q=2.0e-4)
    spectrum = exact_spinor_spectrum(40, c2=1.0, q=2.0e-4, k=2)
    assert abs(spectrum.gap / build_rotor(params).omega_theta - 1.0) > 0.25


def test_exact_spectrum_energies_sorted_and_shifted():
    spectrum = exact_spinor_spectrum(12, c2=2.0, q=0.1, k=8)
    assert spectrum.eigenvalues[0] == 0.0
    assert spectrum.eigenvalues == sorted(spectrum.eigenvalues)
    assert 0.0 <= spectrum.ground_n0_expectation <= 12


def test_exact_spectrum_limits():
    with pytest.raises(ResourceError):
        exact_spinor_spectrum(61, c2=1.0, q=0.02)
    with pytest.raises(DomainError):
        exact_spinor_spectrum(1, c2=1.0, q=0.02)
    with pytest.raises(DomainError):
        exact_spinor_spectrum(2, c2=1.0, q=0.02, k=7)
    with pytest.raises(DomainError):
        exact_spinor_spectrum(2, c2=1.0, q=0.02, k=1).gap


def test_spectrum_table():
    spectrum = exact_spinor_spectrum(4, c2=1.0, q=0.1, k=3)
    table = spectrum_table(spectrum, 4, 1.0, 0.1)
    assert table.columns == ["index", "energy_rad_s"]
    assert table.column("index") == [0.0, 1.0, 2.0]
    assert table.metadata["n_atoms"] == "4"
    assert table.metadata["basis_dimension"] == "15"
