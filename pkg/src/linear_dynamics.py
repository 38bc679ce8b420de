"""
╔══════════════════════════════════════════════════════════════════════════════╗
║                         LINEARIZED FLUCTUATION DYNAMICS                       ║
║                                                                               ║
║  v = (d theta, d L_z, d X1, d X2), dv/dt = R v + noise.                       ║
║  Routh-Hurwitz stability of R, the rotor susceptibility chi(omega), the       ║
║  thermal force spectrum and the cavity quadrature transfer functions.         ║
╚══════════════════════════════════════════════════════════════════════════════╝
"""

import logging
import math
from typing import List, NamedTuple, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.linalg import matrix_balance

from .errors import NumericalError, PoleError
from .params_units import PhysicalParams, thermal_frequency
from .rotor_model import RotorModel, build_rotor
from .steady_state import SteadyState

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Conditions within this fraction of the terms they are built from count as marginal
MARGINAL_TOLERANCE = 1.0e-12


# ══════════════════════════════════════════════════════════════════════════════
#  DOMAIN TYPES
# ══════════════════════════════════════════════════════════════════════════════

class DriftMatrix(BaseModel):
    """4x4 drift matrix ordered (d theta, d L_z, d X1, d X2)."""
    model_config = ConfigDict(frozen=True)

    r: Tuple[Tuple[float, float, float, float], ...]

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.r, dtype=float)

    @classmethod
    def from_array(cls, array: np.ndarray) -> "DriftMatrix":
        return cls(r=tuple(tuple(float(v) for v in row) for row in np.asarray(array)))


class SpectrumPoint(BaseModel):
    """Linear response at one frequency."""
    model_config = ConfigDict(frozen=True)

    omega: float
    chi_re: float
    chi_im: float
    s_theta: float
    s_x1: float
    s_x2: float

    @property
    def chi(self) -> complex:
        return complex(self.chi_re, self.chi_im)


class QuadratureResponse(NamedTuple):
    """Cavity quadrature transfer coefficients and output spectra."""
    t_self: ArrayLike
    t_cross: ArrayLike
    s_x1: ArrayLike
    s_x2: ArrayLike


# ══════════════════════════════════════════════════════════════════════════════
#  DRIFT MATRIX AND STABILITY
# ══════════════════════════════════════════════════════════════════════════════

def rotor_stiffness(model: RotorModel, steady: SteadyState) -> float:
    """I omega_theta^2 + 2 xi_theta |a_s|^2, which equals I omega_eff^2."""
    return model.inertia_i * model.omega_theta ** 2 + 2.0 * model.xi_theta * steady.photon_number


def build_drift(params: PhysicalParams, model: RotorModel, steady: SteadyState) -> DriftMatrix:
    """Drift matrix of the linearized equations; the rotor and cavity blocks do not couple."""
    r = np.zeros((4, 4))
    r[0, 1] = 1.0 / model.inertia_i
    r[1, 0] = -rotor_stiffness(model, steady)
    r[1, 1] = -model.damping_rate
    r[2, 2] = r[3, 3] = -params.gamma
    r[2, 3] = -params.delta
    r[3, 2] = params.delta
    return DriftMatrix.from_array(r)


def characteristic_polynomial(matrix: np.ndarray) -> np.ndarray:
    """
    Coefficients [1, c_{n-1}, ..., c_0] of det(lambda - A), by Faddeev-LeVerrier.
    """
    a = np.asarray(matrix, dtype=float)
    n = a.shape[0]
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    m = np.zeros_like(a)
    identity = np.eye(n)
    for k in range(1, n + 1):
        m = a @ m + coeffs[k - 1] * identity
        coeffs[k] = -np.trace(a @ m) / k
    return coeffs


def _block_quadratics(matrix: np.ndarray) -> Optional[List[Tuple[np.ndarray, np.ndarray]]]:
    """[1, -tr, det] of each diagonal 2x2 block with the magnitudes of its terms; None if the blocks couple."""
    if np.any(matrix[:2, 2:]) or np.any(matrix[2:, :2]):
        return None
    quadratics = []
    for block in (matrix[:2, :2], matrix[2:, 2:]):
        (a, b), (c, d) = block
        quadratics.append((
            np.array([1.0, -(a + d), a * d - b * c]),
            np.array([1.0, abs(a) + abs(d), abs(a * d) + abs(b * c)]),
        ))
    return quadratics


def hurwitz_coefficients(drift: DriftMatrix) -> Tuple[np.ndarray, np.ndarray]:
    """
    Characteristic polynomial of R and, per coefficient, the summed magnitude
    of the terms it is built from.

    Decoupled rotor and cavity blocks give the product of two quadratics, which
    keeps a0 ~ omega_eff^2 (gamma^2 + Delta^2) exact even when the cavity rates
    exceed the rotor rates by many decades. Coupled matrices fall back to
    Faddeev-LeVerrier on the balanced matrix.
    """
    matrix = drift.matrix
    blocks = _block_quadratics(matrix)
    if blocks is not None:
        (rotor, rotor_size), (cavity, cavity_size) = blocks
        return np.polymul(rotor, cavity), np.polymul(rotor_size, cavity_size)

    # balancing leaves the characteristic polynomial unchanged
    balanced, _ = matrix_balance(matrix, permute=False)
    scale = float(np.max(np.abs(balanced))) or 1.0
    size = np.array([math.comb(4, k) * scale ** k for k in range(5)])
    return characteristic_polynomial(balanced), size


def stable_routh_hurwitz(drift: DriftMatrix) -> bool:
    """
    True iff every eigenvalue of R has a strictly negative real part, decided
    from the quartic Hurwitz conditions a3 > 0, a1 > 0, a0 > 0 and
    a3 a2 a1 > a1^2 + a3^2 a0. Marginal cases report unstable.
    """
    coeffs, size = hurwitz_coefficients(drift)
    _, a3, a2, a1, a0 = coeffs

    for k, value in ((1, a3), (3, a1), (4, a0)):
        if value <= MARGINAL_TOLERANCE * size[k]:
            return False
    lhs = a3 * a2 * a1
    rhs = a1 * a1 + a3 * a3 * a0
    hurwitz = lhs - rhs
    return hurwitz > MARGINAL_TOLERANCE * max(abs(lhs), abs(rhs))


def eigenvalues(drift: DriftMatrix) -> np.ndarray:
    """Eigenvalues of R sorted by real part, largest first."""
    try:
        values = np.linalg.eigvals(drift.matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue computation failed: {exc}") from exc
    order = np.lexsort((-values.imag, -values.real))
    return values[order]


# ══════════════════════════════════════════════════════════════════════════════
#  LINEAR RESPONSE
# ══════════════════════════════════════════════════════════════════════════════

def susceptibility(omega: ArrayLike, params: PhysicalParams, steady: SteadyState,
                   model: Optional[RotorModel] = None) -> ArrayLike:
    """chi(omega) = 1 / (I (omega_eff^2 - omega^2) - i D_theta omega)."""
    model = model or build_rotor(params)
    omega = np.asarray(omega, dtype=float)
    inverse = (rotor_stiffness(model, steady) - model.inertia_i * omega ** 2) - 1j * model.d_theta * omega
    if np.any(inverse == 0.0):
        raise PoleError("susceptibility evaluated at the undamped pole omega = omega_eff")
    chi = 1.0 / inverse
    return complex(chi) if chi.ndim == 0 else chi


def noise_spectrum_epsilon(omega: ArrayLike, d_theta: float, temperature: float) -> ArrayLike:
    """
    S_eps(omega) = D_theta omega [1 + coth(omega / 2 k_B T)], i.e. 2 D_theta omega (n(omega) + 1).

    The omega -> 0 limit is 2 D_theta k_B T; at T = 0 only omega > 0 is populated.
    """
    kt = thermal_frequency(temperature)
    omega = np.asarray(omega, dtype=float)
    if kt == 0.0:
        spectrum = np.where(omega > 0.0, 2.0 * d_theta * omega, 0.0)
    else:
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            spectrum = np.where(
                omega == 0.0,
                2.0 * d_theta * kt,
                2.0 * d_theta * omega / -np.expm1(-omega / kt),
            )
    # clears the -0.0 left by the far negative tail
    spectrum = np.abs(spectrum)
    return float(spectrum) if np.ndim(spectrum) == 0 else spectrum


def symmetrized_noise_spectrum(omega: ArrayLike, d_theta: float, temperature: float) -> ArrayLike:
    """[S_eps(omega) + S_eps(-omega)] / 2 = D_theta omega coth(omega / 2 k_B T)."""
    kt = thermal_frequency(temperature)
    omega = np.asarray(omega, dtype=float)
    if kt == 0.0:
        spectrum = d_theta * np.abs(omega)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            spectrum = np.where(
                omega == 0.0,
                2.0 * d_theta * kt,
                d_theta * omega / np.tanh(omega / (2.0 * kt)),
            )
    return float(spectrum) if np.ndim(spectrum) == 0 else spectrum


def theta_spectrum(omega: ArrayLike, params: PhysicalParams, steady: SteadyState,
                   model: Optional[RotorModel] = None) -> ArrayLike:
    """S_theta(omega) = |chi(omega)|^2 S_eps(omega)."""
    model = model or build_rotor(params)
    chi = susceptibility(omega, params, steady, model)
    return np.abs(chi) ** 2 * noise_spectrum_epsilon(omega, model.d_theta, params.temperature)


def quadrature_response(omega: ArrayLike, params: PhysicalParams) -> QuadratureResponse:
    """
    Transfer of the input quadratures to the intracavity quadratures.

    T_self = sqrt(2 gamma)(gamma - i omega) / (Delta^2 + (gamma - i omega)^2) and
    T_cross = sqrt(2 gamma) Delta / (same), entering X1 with - and X2 with +.
    With vacuum inputs of symmetrized density 1/2, both output spectra are
    (|T_self|^2 + |T_cross|^2) / 2.
    """
    omega = np.asarray(omega, dtype=float)
    gamma_minus = params.gamma - 1j * omega
    denominator = params.delta ** 2 + gamma_minus ** 2
    root = math.sqrt(2.0 * params.gamma)
    t_self = root * gamma_minus / denominator
    t_cross = root * params.delta / denominator
    spectrum = 0.5 * (np.abs(t_self) ** 2 + np.abs(t_cross) ** 2)
    if omega.ndim == 0:
        return QuadratureResponse(complex(t_self), complex(t_cross), float(spectrum), float(spectrum))
    return QuadratureResponse(t_self, t_cross, spectrum, spectrum.copy())


def spectrum_grid(omegas: np.ndarray, params: PhysicalParams, steady: SteadyState,
                  model: Optional[RotorModel] = None) -> List[SpectrumPoint]:
    """Evaluate chi, S_theta, S_X1 and S_X2 on a caller-supplied grid."""
    model = model or build_rotor(params)
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    chi = np.atleast_1d(susceptibility(omegas, params, steady, model))
    s_eps = np.atleast_1d(noise_spectrum_epsilon(omegas, model.d_theta, params.temperature))
    quad = quadrature_response(omegas, params)
    return [
        SpectrumPoint(
            omega=float(w),
            chi_re=float(c.real),
            chi_im=float(c.imag),
            s_theta=float(abs(c) ** 2 * s),
            s_x1=float(x1),
            s_x2=float(x2),
        )
        for w, c, s, x1, x2 in zip(omegas, chi, s_eps, np.atleast_1d(quad.s_x1), np.atleast_1d(quad.s_x2))
    ]
