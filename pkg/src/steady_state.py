"""
╔══════════════════════════════════════════════════════════════════════════════╗
║                           MEAN-FIELD STEADY STATE                             ║
║                                                                               ║
║  theta_s = L_z,s = 0 and a_s = kappa_L / (gamma - i Delta). The intracavity   ║
║  intensity stiffens the rotor trap by the enhancement factor eta.             ║
╚══════════════════════════════════════════════════════════════════════════════╝
"""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .errors import AntiTrappingError
from .params_units import PhysicalParams
from .rotor_model import build_rotor

logger = logging.getLogger(__name__)


class SteadyState(BaseModel):
    """Mean-field steady state. eta and omega_eff are unset until trapping is checked."""
    model_config = ConfigDict(frozen=True)

    a_re: float
    a_im: float
    photon_number: float = Field(ge=0.0)
    eta: Optional[float] = Field(default=None, ge=0.0)
    omega_eff: Optional[float] = Field(default=None, ge=0.0)
    theta_s: float = 0.0
    l_z_s: float = 0.0

    @property
    def a_s(self) -> complex:
        return complex(self.a_re, self.a_im)


def cavity_steady_field(params: PhysicalParams) -> SteadyState:
    """Steady cavity amplitude and photon number; eta is left unset."""
    a_s = params.kappa_l / complex(params.gamma, -params.delta)
    photon_number = params.kappa_l ** 2 / (params.gamma ** 2 + params.delta ** 2)
    return SteadyState(a_re=a_s.real, a_im=a_s.imag, photon_number=photon_number)


def enhancement_factor(params: PhysicalParams) -> float:
    """eta = sqrt(1 + (U0/q) kappa_L^2 / (Delta^2 + gamma^2))."""
    photon_number = params.kappa_l ** 2 / (params.gamma ** 2 + params.delta ** 2)
    radicand = 1.0 + params.u0 / params.q * photon_number
    if radicand < 0.0:
        raise AntiTrappingError(
            f"eta^2 = {radicand:.6g} < 0: light shift U0={params.u0:.6g} rad/s removes the rotor trap"
        )
    return math.sqrt(radicand)


def effective_frequency(params: PhysicalParams) -> float:
    """omega_eff = eta * omega_theta."""
    return enhancement_factor(params) * build_rotor(params).omega_theta


def solve_steady_state(params: PhysicalParams) -> SteadyState:
    """Full steady state including eta and omega_eff."""
    field = cavity_steady_field(params)
    eta = enhancement_factor(params)
    omega_eff = eta * build_rotor(params).omega_theta
    return field.model_copy(update={"eta": eta, "omega_eff": omega_eff})


def intensity_fixed_points(params: PhysicalParams, theta_s: float = 0.0) -> List[float]:
    """
    Real non-negative roots n of n [(Delta - xi_theta theta_s^2)^2 + gamma^2] = kappa_L^2.
    """
    xi = build_rotor(params).xi_theta
    detuning = params.delta - xi * theta_s ** 2
    roots = np.roots([detuning ** 2 + params.gamma ** 2, -params.kappa_l ** 2])
    return sorted(float(r.real) for r in roots if abs(r.imag) <= 1e-12 * max(1.0, abs(r)) and r.real >= 0.0)


def mean_field_fixed_points(params: PhysicalParams) -> List[Tuple[float, float]]:
    """
    All mean-field fixed points as (theta_s^2, photon number).

    Besides theta_s = 0, a fixed point with theta_s != 0 needs
    I omega_theta^2 + 2 xi_theta n = 0, which has no solution for U0 >= 0.
    """
    model = build_rotor(params)
    points = [(0.0, n) for n in intensity_fixed_points(params, 0.0)]
    if model.xi_theta >= 0.0:
        return points

    n_star = -model.inertia_i * model.omega_theta ** 2 / (2.0 * model.xi_theta)
    spread = params.kappa_l ** 2 / n_star - params.gamma ** 2
    if spread < 0.0:
        return points
    # (Delta - xi theta^2)^2 = spread, with theta^2 > 0
    for sign in (1.0, -1.0):
        theta2 = (params.delta - sign * math.sqrt(spread)) / model.xi_theta
        if theta2 > 0.0:
            points.append((theta2, n_star))
    if len(points) > 1:
        logger.warning("multiple mean-field fixed points: %s", points)
    return points
