import logging
import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.errors import ConfigurationError, DomainError, StabilityError
from src.moments import (
    MomentState,
    dispersive_shift,
    integrate_moments,
    moment_matrix,
    moment_rhs,
    rotor_energy,
    roton_occupation,
    shift_per_roton,
    shifted_frequency,
    steady_moments,
    thermal_occupation,
    uncertainty_product,
)
from src.rotor_model import build_rotor
from src.steady_state import solve_steady_state


# ══════════════════════════════════════════════════════════════════════════════
#  OCCUPATIONS
# ══════════════════════════════════════════════════════════════════════════════

def test_thermal_occupation_values(fig1_params):
    omega = build_rotor(fig1_params).omega_theta
    assert thermal_occupation(omega, 0.0) == 0.0
    assert thermal_occupation(omega, 5.0e-10) == pytest.approx(11.15, rel=1e-3)
    assert thermal_occupation(omega, 2.0e-6) == pytest.approx(4.66e4, rel=1e-3)


def test_thermal_occupation_classical_limit():
    # omega / k_B T = 1e-12
    n = thermal_occupation(0.13092, 1.0)
    assert n == pytest.approx(1.0e12 - 0.5, rel=1e-9)


def test_thermal_occupation_deep_quantum():
    assert thermal_occupation(1.0e6, 1.0e-9) == 0.0
    with pytest.raises(DomainError):
        thermal_occupation(0.0, 1.0e-9)


def test_roton_occupation():
    assert roton_occupation(3.0, 1.0) == 3.5
    assert roton_occupation(0.0, 1.0e6) == pytest.approx(1.0 / 4.0e6, rel=1e-9)
    assert roton_occupation(11.149, 4242.64) == pytest.approx(1.37e-3, rel=5e-3)
    with pytest.raises(DomainError):
        roton_occupation(1.0, 0.5)
    with pytest.raises(DomainError):
        roton_occupation(-1.0, 2.0)


def test_shifted_frequency():
    assert shifted_frequency(2.0, 1.0) == 2.0
    assert shifted_frequency(5.6227, 4242.64) == pytest.approx(5.6227 / 2.0, rel=1e-7)
    with pytest.raises(DomainError):
        shifted_frequency(1.0, 0.0)


def test_moment_state_validation():
    with pytest.raises(ValidationError):
        MomentState(theta2=-1.0, l2=0.0)
    state = MomentState(theta2=1.0, l2=2.0, sym=-0.5)
    np.testing.assert_array_equal(state.vector(), [1.0, 2.0, -0.5])
    assert uncertainty_product(state) == 2.0


# ══════════════════════════════════════════════════════════════════════════════
#  MOMENT EQUATIONS
# ══════════════════════════════════════════════════════════════════════════════

def test_vacuum_diffusion(dynamics_params):
    steady = solve_steady_state(dynamics_params)
    model = build_rotor(dynamics_params)
    rates = moment_rhs(MomentState(theta2=0.0, l2=0.0), dynamics_params, steady)
    assert rates.theta2 == 0.0
    assert rates.sym == 0.0
    assert rates.l2 == pytest.approx(2.0 * model.d_theta * model.omega_theta * 0.5, rel=1e-15)


def test_theta2_rate_is_sym_over_inertia(dynamics_params):
    steady = solve_steady_state(dynamics_params)
    inertia = build_rotor(dynamics_params).inertia_i
    rates = moment_rhs(MomentState(theta2=0.3, l2=7.0, sym=1.7), dynamics_params, steady)
    assert rates.theta2 == pytest.approx(1.7 / inertia, rel=1e-15)


def test_steady_state_is_a_fixed_point(random_stable_params):
    for params in random_stable_params(20):
        steady = solve_steady_state(params)
        model = build_rotor(params)
        state = steady_moments(params, steady, model)
        matrix, source = moment_matrix(params, steady, model)
        rates = moment_rhs(state, params, steady, model)
        scale = np.abs(matrix) @ np.abs(state.vector()) + np.abs(source)
        np.testing.assert_array_less(np.abs(rates), 1e-10 * scale + 1e-300)


def test_moment_matrix_eigenvalues(dynamics_params):
    steady = solve_steady_state(dynamics_params)
    model = build_rotor(dynamics_params)
    matrix, _ = moment_matrix(dynamics_params, steady, model)
    values = np.linalg.eigvals(matrix)
    g = model.damping_rate
    np.testing.assert_allclose(values.real, -g, rtol=1e-9)
    expected = 2.0 * math.sqrt(steady.omega_eff ** 2 - g ** 2 / 4.0)
    assert sorted(np.abs(values.imag)) == pytest.approx([0.0, expected, expected], abs=1e-9)


def test_ground_state_saturates_heisenberg(dynamics_params):
    params = dynamics_params.with_updates(kappa_l=0.0)
    steady = solve_steady_state(params)
    model = build_rotor(params)
    state = steady_moments(params, steady, model)
    assert state.theta2 == pytest.approx(1.0 / (2.0 * model.inertia_i * model.omega_theta), rel=1e-14)
    assert state.l2 == pytest.approx(0.5 * model.inertia_i * model.omega_theta, rel=1e-14)
    assert state.sym == 0.0
    assert uncertainty_product(state) >= 0.25 * (1.0 - 1e-6)
    assert rotor_energy(state, params, model) == pytest.approx(0.5 * model.omega_theta, rel=1e-14)


def test_enhanced_trap_reports_product_below_quarter(dynamics_params, caplog):
    steady = solve_steady_state(dynamics_params)
    with caplog.at_level(logging.WARNING, logger="src.moments"):
        state = steady_moments(dynamics_params, steady)
    # (n + 1/2)^2 / eta^2 with n = 0, eta^2 = 2
    assert uncertainty_product(state) == pytest.approx(0.125, rel=1e-12)
    assert "1/4" in caplog.text


def test_steady_moments_fig1(fig1_params):
    steady = solve_steady_state(fig1_params)
    state = steady_moments(fig1_params, steady)
    assert state.l2 == pytest.approx(5.21e4, rel=2e-3)
    assert state.theta2 == pytest.approx(1.45e-10, rel=1e-2)
    energy = rotor_energy(state, fig1_params)
    assert energy / steady.omega_eff == pytest.approx(1.373e-3, rel=1e-3)


def test_steady_moments_unstable(dynamics_params):
    params = dynamics_params.with_updates(d_theta=0.0)
    with pytest.raises(StabilityError):
        steady_moments(params, solve_steady_state(params))


def test_identity_suite(random_stable_params):
    for params in random_stable_params(100):
        steady = solve_steady_state(params)
        model = build_rotor(params)
        state = steady_moments(params, steady, model)
        n = thermal_occupation(model.omega_theta, params.temperature)
        energy = rotor_energy(state, params, model)
        assert energy == pytest.approx((n + 0.5) * shifted_frequency(model.omega_theta, steady.eta), rel=1e-10)
        assert roton_occupation(n, steady.eta) * steady.omega_eff == pytest.approx(energy, rel=1e-10)


def test_dispersive_shift(fig1_params):
    steady = solve_steady_state(fig1_params)
    model = build_rotor(fig1_params)
    state = steady_moments(fig1_params, steady, model)
    assert dispersive_shift(fig1_params, state, model) == pytest.approx(model.xi_theta * state.theta2, rel=1e-15)
    assert shift_per_roton(fig1_params, steady, model) == pytest.approx(
        model.xi_theta / (model.inertia_i * steady.omega_eff), rel=1e-15
    )


# ══════════════════════════════════════════════════════════════════════════════
#  INTEGRATION
# ══════════════════════════════════════════════════════════════════════════════

def test_integration_from_steady_state_stays_put(dynamics_params):
    params = dynamics_params.with_updates(temperature=1.0e-9)
    steady = solve_steady_state(params)
    target = steady_moments(params, steady)
    series = integrate_moments(target, params, steady, t_end=10.0, dt=1.0e-3)
    assert len(series) == 10001
    np.testing.assert_allclose(series.theta2, target.theta2, rtol=1e-9)
    np.testing.assert_allclose(series.l2, target.l2, rtol=1e-9)
    assert np.max(np.abs(series.sym)) < 1e-9 * math.sqrt(target.theta2 * target.l2)


def test_integration_converges_to_steady_state(random_stable_params):
    for params in random_stable_params(100):
        steady = solve_steady_state(params)
        model = build_rotor(params)
        g = model.damping_rate
        dt = 0.04 / steady.omega_eff
        series = integrate_moments(MomentState(theta2=0.0, l2=0.0), params, steady, 30.0 / g, dt, model)
        final = series.final()
        target = steady_moments(params, steady, model)
        assert final.theta2 == pytest.approx(target.theta2, rel=1e-8)
        assert final.l2 == pytest.approx(target.l2, rel=1e-8)
        assert abs(final.sym) < 1e-8 * math.sqrt(target.theta2 * target.l2)


def test_undamped_energy_is_conserved(dynamics_params):
    params = dynamics_params.with_updates(d_theta=0.0)
    steady = solve_steady_state(params)
    model = build_rotor(params)
    series = integrate_moments(MomentState(theta2=1.0e-3, l2=0.0), params, steady, t_end=20.0, dt=1.0e-3)
    inertia, omega_eff = model.inertia_i, steady.omega_eff
    energy = series.l2 / (2.0 * inertia) + 0.5 * inertia * omega_eff ** 2 * series.theta2
    np.testing.assert_allclose(energy, energy[0], rtol=1e-8)
    assert np.ptp(series.theta2) > 0.5e-3


def test_envelope_relaxes_at_damping_rate(dynamics_params):
    steady = solve_steady_state(dynamics_params)
    model = build_rotor(dynamics_params)
    target = steady_moments(dynamics_params, steady, model)
    series = integrate_moments(MomentState(theta2=0.0, l2=0.0), dynamics_params, steady, t_end=8.0, dt=1.0e-3)
    deviation = np.abs(series.theta2 - target.theta2)
    period = math.pi / steady.omega_eff

    def envelope(t0):
        window = (series.t >= t0) & (series.t < t0 + period)
        return deviation[window].max()

    rate = math.log(envelope(2.0) / envelope(7.0)) / 5.0
    assert rate == pytest.approx(model.damping_rate, rel=0.1)


def test_integration_step_checks(dynamics_params):
    steady = solve_steady_state(dynamics_params)
    start = MomentState(theta2=0.0, l2=0.0)
    with pytest.raises(ConfigurationError):
        integrate_moments(start, dynamics_params, steady, t_end=1.0, dt=0.01)
    with pytest.raises(ConfigurationError):
        integrate_moments(start, dynamics_params, steady, t_end=-1.0, dt=1.0e-3)
    with pytest.raises(ConfigurationError):
        integrate_moments(start, dynamics_params, steady, t_end=1.0e5, dt=1.0e-3)
