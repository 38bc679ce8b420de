"""
╔══════════════════════════════════════════════════════════════════════════════╗
║                            SECOND-MOMENT DYNAMICS                             ║
║                                                                               ║
║  x = (<theta^2>, <L_z^2>, <L_z theta + theta L_z>) obeys a closed linear      ║
║  system with a thermal diffusion source. Its steady state gives the rotor    ║
║  energy E_Q and the roton occupation nbar.                                    ║
╚══════════════════════════════════════════════════════════════════════════════╝
"""

import logging
import math
from typing import NamedTuple, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .errors import ConfigurationError, DomainError, StabilityError
from .linear_dynamics import build_drift, rotor_stiffness, stable_routh_hurwitz
from .params_units import PhysicalParams, thermal_frequency
from .rotor_model import RotorModel, build_rotor
from .steady_state import SteadyState

logger = logging.getLogger(__name__)

# dt * max(omega_eff, D_theta / I) must not exceed this
MAX_STEP_FRACTION = 0.05

HEISENBERG_TOLERANCE = 1.0e-6

MAX_STEPS = 10 ** 7


# ══════════════════════════════════════════════════════════════════════════════
#  DOMAIN TYPES
# ══════════════════════════════════════════════════════════════════════════════

class MomentState(BaseModel):
    """Second moments at time t."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    theta2: float = Field(ge=0.0, description="<theta^2>")
    l2: float = Field(ge=0.0, description="<L_z^2>")
    sym: float = Field(default=0.0, description="<L_z theta + theta L_z>")
    t: float = Field(default=0.0, description="Time (s)")

    def vector(self) -> np.ndarray:
        return np.array([self.theta2, self.l2, self.sym])


class MomentRates(NamedTuple):
    """Time derivatives of the three moments."""
    theta2: float
    l2: float
    sym: float


class MomentSeries(BaseModel):
    """Fixed-step moment trajectory, stored column-wise."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    t: np.ndarray
    theta2: np.ndarray
    l2: np.ndarray
    sym: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    def state(self, index: int) -> MomentState:
        return MomentState(
            theta2=float(self.theta2[index]),
            l2=float(self.l2[index]),
            sym=float(self.sym[index]),
            t=float(self.t[index]),
        )

    def final(self) -> MomentState:
        return self.state(-1)


# ══════════════════════════════════════════════════════════════════════════════
#  OCCUPATIONS AND ENERGIES
# ══════════════════════════════════════════════════════════════════════════════

def thermal_occupation(omega_theta: float, temperature: float) -> float:
    """Bose factor n = 1 / (exp(omega / k_B T) - 1); zero at T = 0."""
    if not omega_theta > 0.0:
        raise DomainError(f"frequency must be positive, got {omega_theta}")
    kt = thermal_frequency(temperature)
    if kt == 0.0:
        return 0.0
    x = omega_theta / kt
    # e^-x / (1 - e^-x) stays finite for large x and exact for small x
    return math.exp(-x) / -math.expm1(-x)


def shifted_frequency(omega_theta: float, eta: float) -> float:
    """omega'_theta = (omega_theta / 2)(1 + eta^-2)."""
    if not eta > 0.0:
        raise DomainError(f"eta must be positive, got {eta}")
    return 0.5 * omega_theta * (1.0 + eta ** -2)


def roton_occupation(n: float, eta: float) -> float:
    """nbar = (n + 1/2)(eta^2 + 1) / (2 eta^3)."""
    if eta < 1.0:
        raise DomainError(f"eta must be >= 1, got {eta}")
    if n < 0.0:
        raise DomainError(f"thermal occupation must be non-negative, got {n}")
    return (n + 0.5) * (eta * eta + 1.0) / (2.0 * eta ** 3)


def rotor_energy(state: MomentState, params: PhysicalParams, model: Optional[RotorModel] = None) -> float:
    """E_Q = <L_z^2>/2I + I omega_theta^2 <theta^2>/2, with the bare omega_theta."""
    model = model or build_rotor(params)
    inertia = model.inertia_i
    return state.l2 / (2.0 * inertia) + 0.5 * inertia * model.omega_theta ** 2 * state.theta2


def uncertainty_product(state: MomentState) -> float:
    return state.theta2 * state.l2


def dispersive_shift(params: PhysicalParams, state: MomentState, model: Optional[RotorModel] = None) -> float:
    """Cavity frequency shift xi_theta <theta^2> produced by the rotor."""
    model = model or build_rotor(params)
    return model.xi_theta * state.theta2


def shift_per_roton(params: PhysicalParams, steady: SteadyState, model: Optional[RotorModel] = None) -> float:
    """d(xi_theta <theta^2>)/d nbar = xi_theta / (I omega_eff)."""
    model = model or build_rotor(params)
    omega_eff = _effective_frequency(model, steady)
    return model.xi_theta / (model.inertia_i * omega_eff)


# ══════════════════════════════════════════════════════════════════════════════
#  MOMENT EQUATIONS
# ══════════════════════════════════════════════════════════════════════════════

def _effective_frequency(model: RotorModel, steady: SteadyState) -> float:
    if steady.omega_eff is not None:
        return steady.omega_eff
    return math.sqrt(abs(rotor_stiffness(model, steady)) / model.inertia_i)


def moment_matrix(params: PhysicalParams, steady: SteadyState,
                  model: Optional[RotorModel] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    The affine system dx/dt = M x + b for x = (theta2, l2, sym).

    b carries the diffusion source 2 D_theta (n + 1/2) omega_theta, with n
    evaluated at the bare omega_theta.
    """
    model = model or build_rotor(params)
    inertia = model.inertia_i
    stiffness = rotor_stiffness(model, steady)
    rate = model.damping_rate
    n = thermal_occupation(model.omega_theta, params.temperature)

    matrix = np.array([
        [0.0, 0.0, 1.0 / inertia],
        [0.0, -2.0 * rate, -stiffness],
        [-2.0 * stiffness, 2.0 / inertia, -rate],
    ])
    source = np.array([0.0, 2.0 * model.d_theta * (n + 0.5) * model.omega_theta, 0.0])
    return matrix, source


def moment_rhs(state: MomentState, params: PhysicalParams, steady: SteadyState,
               model: Optional[RotorModel] = None) -> MomentRates:
    matrix, source = moment_matrix(params, steady, model)
    rates = matrix @ state.vector() + source
    return MomentRates(*(float(v) for v in rates))


def steady_moments(params: PhysicalParams, steady: SteadyState,
                   model: Optional[RotorModel] = None) -> MomentState:
    """
    Closed-form fixed point: sym = 0, l2 = I omega_theta (n + 1/2),
    theta2 = (n + 1/2) omega_theta / (I omega_eff^2).
    """
    model = model or build_rotor(params)
    if not stable_routh_hurwitz(build_drift(params, model, steady)):
        raise StabilityError("linearized dynamics are not stable; no steady moments")

    inertia = model.inertia_i
    n_half = thermal_occupation(model.omega_theta, params.temperature) + 0.5
    state = MomentState(
        theta2=n_half * model.omega_theta / rotor_stiffness(model, steady),
        l2=inertia * model.omega_theta * n_half,
        sym=0.0,
    )
    product = uncertainty_product(state)
    if product < 0.25 * (1.0 - HEISENBERG_TOLERANCE):
        logger.warning(
            "steady moments give <theta^2><L_z^2> = %.6g < 1/4; the diffusion source "
            "is set by the bare omega_theta while the trap is stiffened", product,
        )
    return state


def _rk4_propagator(matrix: np.ndarray, source: np.ndarray, dt: float) -> Tuple[np.ndarray, np.ndarray]:
    """One classical RK4 step of a linear affine system written as x -> P x + c."""
    identity = np.eye(matrix.shape[0])
    h = dt * matrix
    h2 = h @ h
    h3 = h2 @ h
    propagator = identity + h + h2 / 2.0 + h3 / 6.0 + h3 @ h / 24.0
    offset = dt * (identity + h / 2.0 + h2 / 6.0 + h3 / 24.0) @ source
    return propagator, offset


def integrate_moments(initial: MomentState, params: PhysicalParams, steady: SteadyState,
                      t_end: float, dt: float, model: Optional[RotorModel] = None) -> MomentSeries:
    """Fixed-step fourth-order Runge-Kutta integration from initial up to t_end."""
    model = model or build_rotor(params)
    if not (dt > 0.0 and t_end > 0.0):
        raise ConfigurationError(f"dt and t_end must be positive, got dt={dt}, t_end={t_end}")
    fastest = max(_effective_frequency(model, steady), model.damping_rate)
    if dt * fastest > MAX_STEP_FRACTION:
        raise ConfigurationError(
            f"dt={dt:.6g} s too large: need dt <= {MAX_STEP_FRACTION / fastest:.6g} s"
        )
    if not stable_routh_hurwitz(build_drift(params, model, steady)):
        logger.warning("integrating moments for parameters that are not strictly stable")

    matrix, source = moment_matrix(params, steady, model)
    propagator, offset = _rk4_propagator(matrix, source, dt)

    n_steps = max(1, int(math.ceil(t_end / dt - 1e-9)))
    if n_steps > MAX_STEPS:
        raise ConfigurationError(f"t_end/dt = {n_steps} steps exceeds {MAX_STEPS}")
    logger.info("integrating moments: %d steps of %.6g s", n_steps, dt)
    values = np.empty((n_steps + 1, 3))
    values[0] = initial.vector()
    for k in range(n_steps):
        values[k + 1] = propagator @ values[k] + offset

    return MomentSeries(
        t=initial.t + dt * np.arange(n_steps + 1),
        theta2=values[:, 0],
        l2=values[:, 1],
        sym=values[:, 2],
    )
