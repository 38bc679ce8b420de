import math
from decimal import Decimal, getcontext

import numpy as np
import pytest

from src.errors import AntiTrappingError
from src.params_units import TWO_PI
from src.rotor_model import build_rotor
from src.steady_state import (
    cavity_steady_field,
    effective_frequency,
    enhancement_factor,
    intensity_fixed_points,
    mean_field_fixed_points,
    solve_steady_state,
)


def test_cavity_field_fig1(fig1_params):
    steady = cavity_steady_field(fig1_params)
    assert steady.a_re == pytest.approx(60.0, rel=1e-14)
    assert steady.a_im == 0.0
    assert steady.photon_number == pytest.approx(3600.0, rel=1e-14)
    assert steady.theta_s == 0.0 and steady.l_z_s == 0.0
    assert steady.eta is None and steady.omega_eff is None


def test_cavity_field_undriven(fig1_params):
    steady = cavity_steady_field(fig1_params.with_updates(kappa_l=0.0))
    assert steady.a_s == 0.0
    assert steady.photon_number == 0.0


def test_cavity_field_at_symmetry_point(fig1_params):
    params = fig1_params.with_updates(delta=fig1_params.gamma)
    steady = cavity_steady_field(params)
    assert steady.photon_number == pytest.approx(params.kappa_l ** 2 / (2.0 * params.gamma ** 2), rel=1e-14)
    assert steady.a_s == pytest.approx(params.kappa_l / complex(params.gamma, -params.delta), rel=1e-14)
    assert abs(steady.a_s) ** 2 == pytest.approx(steady.photon_number, rel=1e-13)


def test_enhancement_factor_fig1(fig1_params):
    getcontext().prec = 40
    exact = float(Decimal(1 + 5000 * 3600).sqrt())
    assert enhancement_factor(fig1_params) == pytest.approx(exact, rel=1e-10)
    assert enhancement_factor(fig1_params) == pytest.approx(4.2426e3, rel=1e-4)


def test_enhancement_factor_detuned(fig1_params):
    eta = enhancement_factor(fig1_params.with_updates(delta=3.0 * fig1_params.gamma))
    assert eta == pytest.approx(1.342e3, rel=1e-3)


def test_enhancement_factor_undriven(fig1_params):
    assert enhancement_factor(fig1_params.with_updates(kappa_l=0.0)) == 1.0


def test_enhancement_factor_even_and_monotone(fig1_params):
    ratios = np.linspace(0.0, 10.0, 101)
    values = [enhancement_factor(fig1_params.with_updates(delta=r * fig1_params.gamma)) for r in ratios]
    mirrored = [enhancement_factor(fig1_params.with_updates(delta=-r * fig1_params.gamma)) for r in ratios]
    np.testing.assert_allclose(values, mirrored, rtol=1e-15)
    assert all(b < a for a, b in zip(values, values[1:]))


def test_anti_trapping(fig1_params):
    params = fig1_params.with_updates(u0=-fig1_params.u0)
    with pytest.raises(AntiTrappingError):
        enhancement_factor(params)
    with pytest.raises(AntiTrappingError):
        effective_frequency(params)
    with pytest.raises(AntiTrappingError):
        solve_steady_state(params)
    # weak red-detuned light still traps
    weak = fig1_params.with_updates(u0=-TWO_PI * 1.0e-6)
    assert 0.0 < enhancement_factor(weak) < 1.0


def test_effective_frequency(fig1_params):
    assert effective_frequency(fig1_params) == pytest.approx(2.386e4, rel=1e-3)
    bare = fig1_params.with_updates(kappa_l=0.0)
    assert effective_frequency(bare) == pytest.approx(build_rotor(bare).omega_theta, rel=1e-15)


def test_stiffening_identity(fig1_params, random_stable_params):
    for params in [fig1_params] + random_stable_params(20):
        model = build_rotor(params)
        steady = solve_steady_state(params)
        stiffening = 2.0 * model.xi_theta * steady.photon_number / (model.inertia_i * model.omega_theta ** 2)
        assert steady.eta ** 2 - 1.0 == pytest.approx(stiffening, rel=1e-12)
        assert steady.omega_eff ** 2 - model.omega_theta ** 2 == pytest.approx(
            2.0 * model.xi_theta * steady.photon_number / model.inertia_i, rel=1e-12
        )


def test_solve_steady_state_fills_eta(fig1_params):
    steady = solve_steady_state(fig1_params)
    assert steady.eta == pytest.approx(enhancement_factor(fig1_params), rel=1e-15)
    assert steady.omega_eff == pytest.approx(steady.eta * build_rotor(fig1_params).omega_theta, rel=1e-15)
    assert steady.photon_number == pytest.approx(3600.0, rel=1e-14)


@pytest.mark.parametrize("ratio", [-10.0, -1.0, 0.0, 0.5, 7.0])
def test_intensity_fixed_point_is_unique(fig1_params, ratio):
    params = fig1_params.with_updates(delta=ratio * fig1_params.gamma)
    roots = intensity_fixed_points(params)
    assert len(roots) == 1
    assert roots[0] == pytest.approx(cavity_steady_field(params).photon_number, rel=1e-12)


def test_intensity_fixed_point_undriven(fig1_params):
    assert intensity_fixed_points(fig1_params.with_updates(kappa_l=0.0)) == [0.0]


def test_no_multistability_for_blue_light_shift(fig1_params):
    points = mean_field_fixed_points(fig1_params)
    assert len(points) == 1
    theta2, photons = points[0]
    assert theta2 == 0.0
    assert photons == pytest.approx(3600.0, rel=1e-12)


def test_red_light_shift_admits_tilted_fixed_points(dynamics_params):
    # I omega_theta^2 + 2 xi n = 0 at n ~ 1e4 with U0 = -1e-4
    params = dynamics_params.with_updates(u0=-1.0e-4, kappa_l=3000.0)
    points = mean_field_fixed_points(params)
    assert points[0][0] == 0.0
    tilted = [p for p in points if p[0] > 0.0]
    assert tilted
    model = build_rotor(params)
    for theta2, photons in tilted:
        assert model.inertia_i * model.omega_theta ** 2 + 2.0 * model.xi_theta * photons == pytest.approx(0.0, abs=1e-9)
        detuning = params.delta - model.xi_theta * theta2
        assert photons * (detuning ** 2 + params.gamma ** 2) == pytest.approx(params.kappa_l ** 2, rel=1e-9)
    assert math.isfinite(points[0][1])
