"""
╔══════════════════════════════════════════════════════════════════════════════╗
║                              QUANTUM ROTOR MODEL                              ║
║                                                                               ║
║  Harmonic rotor derived from the single-mode spin-1 Hamiltonian               ║
║  H = (c2/2N) F^2 - q n0, the quadratic optomechanical coupling xi_theta,      ║
║  the quartic correction beta, and an exact-diagonalization oracle of H        ║
║  in the full symmetric Fock space for small N.                                ║
╚══════════════════════════════════════════════════════════════════════════════╝
"""

import logging
import math
from typing import Dict, List, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import sparse
from scipy.linalg import eigh
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from core import ResultTable
from .errors import DomainError, NumericalError, ResourceError
from .params_units import DEFAULT_DAMPING_FRACTION, PhysicalParams

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]
WidthMode = Literal["dimensional", "scaled"]

MAX_EXACT_ATOMS = 60
DENSE_DIMENSION_LIMIT = 500


# ══════════════════════════════════════════════════════════════════════════════
#  DOMAIN TYPES
# ══════════════════════════════════════════════════════════════════════════════

class RotorModel(BaseModel):
    """Derived rotor quantities."""
    model_config = ConfigDict(frozen=True)

    inertia_i: float = Field(gt=0.0, description="Moment of inertia I = N/c2 (s)")
    omega_theta: float = Field(gt=0.0, description="Bare trap frequency (rad/s)")
    theta_bar: float = Field(gt=0.0, description="Ground-state width (dimensional mode)")
    xi_theta: float = Field(description="Quadratic optomechanical coupling (rad/s)")
    bracket: float = Field(description="1 + 3/(2N) + q/c2")
    d_theta: float = Field(ge=0.0, description="Resolved damping constant D_theta")

    @property
    def damping_rate(self) -> float:
        """Physical damping rate D_theta / I."""
        return self.d_theta / self.inertia_i


class SpinorSpectrum(BaseModel):
    """Lowest levels of the exact spinor Hamiltonian."""
    model_config = ConfigDict(frozen=True)

    eigenvalues: List[float]
    ground_n0_expectation: float
    basis_dimension: int

    @property
    def gap(self) -> float:
        """Lowest excitation energy."""
        if len(self.eigenvalues) < 2:
            raise DomainError("need k >= 2 levels for a gap")
        return self.eigenvalues[1] - self.eigenvalues[0]


# ══════════════════════════════════════════════════════════════════════════════
#  ROTOR QUANTITIES
# ══════════════════════════════════════════════════════════════════════════════

def rotor_bracket(params: PhysicalParams) -> float:
    """The common factor 1 + 3/(2N) + q/c2."""
    return 1.0 + 1.5 / params.n_atoms + params.q / params.c2


def build_rotor(params: PhysicalParams) -> RotorModel:
    """Build the harmonic rotor description for params."""
    bracket = rotor_bracket(params)
    inertia = params.n_atoms / params.c2
    omega_theta = math.sqrt(2.0 * params.q * params.c2 * bracket)
    if params.d_theta is None:
        d_theta = DEFAULT_DAMPING_FRACTION * omega_theta * inertia
    else:
        d_theta = params.d_theta
    return RotorModel(
        inertia_i=inertia,
        omega_theta=omega_theta,
        theta_bar=(inertia * omega_theta) ** -0.5,
        xi_theta=params.u0 * params.n_atoms * bracket,
        bracket=bracket,
        d_theta=d_theta,
    )


def potential_full(theta: ArrayLike, params: PhysicalParams) -> ArrayLike:
    """V(theta) = q(N+3/2) sin^2(theta) + (q^2 N / 8 c2) sin^2(2 theta)."""
    n = params.n_atoms
    return (params.q * (n + 1.5) * np.sin(theta) ** 2
            + params.q ** 2 * n / (8.0 * params.c2) * np.sin(2.0 * theta) ** 2)


def potential_harmonic(theta: ArrayLike, model: RotorModel) -> ArrayLike:
    """(1/2) I omega_theta^2 theta^2."""
    return 0.5 * model.inertia_i * model.omega_theta ** 2 * np.square(theta)


def quartic_beta(params: PhysicalParams, photon_number: ArrayLike) -> ArrayLike:
    """Quartic coefficient beta = (q - U0 n_ph) N / 3."""
    if np.any(np.asarray(photon_number) < 0.0):
        raise DomainError("photon number must be non-negative")
    return (params.q - params.u0 * photon_number) * params.n_atoms / 3.0


def ground_state_width(params: PhysicalParams, mode: WidthMode = "dimensional") -> float:
    """
    Width theta_bar of the harmonic ground state exp(-theta^2 / 2 theta_bar^2).

    "dimensional" is (I omega_theta)^(-1/2) and is what every downstream
    quantity uses. "scaled" is sqrt(c2 / (2 q N^2)), which scales as 1/N
    instead of 1/sqrt(N) and equals the square of the dimensional width up
    to the bracket factor.
    """
    if mode == "scaled":
        return math.sqrt(params.c2 / (2.0 * params.q * params.n_atoms ** 2))
    if mode == "dimensional":
        inertia = params.n_atoms / params.c2
        omega = math.sqrt(2.0 * params.q * params.c2 * rotor_bracket(params))
        return (inertia * omega) ** -0.5
    raise DomainError(f"unknown width mode {mode!r}")


def ground_state_density(theta: ArrayLike, params: PhysicalParams,
                         mode: WidthMode = "dimensional") -> ArrayLike:
    """|Psi_0(theta)|^2, normalized over the real line."""
    width2 = ground_state_width(params, mode) ** 2
    return np.exp(-np.square(theta) / width2) / math.sqrt(math.pi * width2)


def harmonic_depletion(params: PhysicalParams) -> float:
    """
    Harmonic prediction of N - <n0>.

    The localized rotor oscillates in both transverse directions at the
    pole, so <theta^2> = theta_bar^2 and N - <n0> = N theta_bar^2.
    """
    return params.n_atoms * ground_state_width(params) ** 2


# ══════════════════════════════════════════════════════════════════════════════
#  EXACT DIAGONALIZATION
# ══════════════════════════════════════════════════════════════════════════════

def fock_basis(n_atoms: int) -> List[Tuple[int, int, int]]:
    """States |n+, n0, n-> with n+ + n0 + n- = N, lexicographic in (n+, n0)."""
    return [
        (n_plus, n_zero, n_atoms - n_plus - n_zero)
        for n_plus in range(n_atoms + 1)
        for n_zero in range(n_atoms - n_plus + 1)
    ]


def spin_operators(n_atoms: int) -> Dict[str, sparse.csr_matrix]:
    """
    Sparse F_z, F_+, F_-, F^2 and n0 on the fixed-N Fock basis.

    F_+ = sqrt(2) (psi_+^dag psi_0 + psi_0^dag psi_-), F_- = F_+^T,
    F^2 = F_z^2 + (F_+ F_- + F_- F_+) / 2.
    """
    basis = fock_basis(n_atoms)
    index = {state: i for i, state in enumerate(basis)}
    dim = len(basis)

    rows, cols, vals = [], [], []
    for j, (n_plus, n_zero, n_minus) in enumerate(basis):
        if n_zero > 0:
            rows.append(index[(n_plus + 1, n_zero - 1, n_minus)])
            cols.append(j)
            vals.append(math.sqrt(2.0 * (n_plus + 1) * n_zero))
        if n_minus > 0:
            rows.append(index[(n_plus, n_zero + 1, n_minus - 1)])
            cols.append(j)
            vals.append(math.sqrt(2.0 * (n_zero + 1) * n_minus))
    f_plus = sparse.csr_matrix((vals, (rows, cols)), shape=(dim, dim))
    f_minus = f_plus.T.tocsr()

    fz = sparse.diags([float(p - m) for p, _, m in basis], format="csr")
    n0 = sparse.diags([float(z) for _, z, _ in basis], format="csr")
    f_squared = (fz @ fz + 0.5 * (f_plus @ f_minus + f_minus @ f_plus)).tocsr()
    return {"fz": fz, "f_plus": f_plus, "f_minus": f_minus, "f_squared": f_squared, "n0": n0}


def spinor_hamiltonian(n_atoms: int, c2: float, q: float) -> sparse.csr_matrix:
    """H = (c2 / 2N) F^2 - q n0 as a sparse symmetric matrix."""
    ops = spin_operators(n_atoms)
    return (c2 / (2.0 * n_atoms) * ops["f_squared"] - q * ops["n0"]).tocsr()


def exact_spinor_spectrum(n_atoms: int, c2: float, q: float, k: int = 6) -> SpinorSpectrum:
    """
    Diagonalize the spinor Hamiltonian and return its k lowest levels,
    measured from the ground state, with <n0> in the ground state.
    """
    if n_atoms < 2:
        raise DomainError(f"need at least 2 atoms, got {n_atoms}")
    if n_atoms > MAX_EXACT_ATOMS:
        raise ResourceError(f"exact diagonalization supports N <= {MAX_EXACT_ATOMS}, got {n_atoms}")
    dim = (n_atoms + 1) * (n_atoms + 2) // 2
    if k < 1 or k > dim:
        raise DomainError(f"k must lie in [1, {dim}], got {k}")

    hamiltonian = spinor_hamiltonian(n_atoms, c2, q)
    logger.info("diagonalizing spinor Hamiltonian: N=%d, dimension=%d, k=%d", n_atoms, dim, k)

    if dim < DENSE_DIMENSION_LIMIT or k >= dim - 1:
        energies, vectors = eigh(hamiltonian.toarray())
        energies, vectors = energies[:k], vectors[:, :k]
    else:
        try:
            energies, vectors = eigsh(hamiltonian, k=k, which="SA")
        except ArpackNoConvergence as exc:
            raise NumericalError(f"eigsh did not converge for N={n_atoms}") from exc
        order = np.argsort(energies)
        energies, vectors = energies[order], vectors[:, order]

    ground = vectors[:, 0]
    n0_diag = np.array([z for _, z, _ in fock_basis(n_atoms)], dtype=float)
    n0_expectation = float(np.dot(ground * ground, n0_diag))
    shifted = [float(e - energies[0]) for e in energies]
    return SpinorSpectrum(
        eigenvalues=shifted,
        ground_n0_expectation=min(max(n0_expectation, 0.0), float(n_atoms)),
        basis_dimension=dim,
    )


def spectrum_table(spectrum: SpinorSpectrum, n_atoms: int, c2: float, q: float) -> ResultTable:
    """Spectrum as a table: index, energy_rad_s."""
    table = ResultTable(
        name="exactdiag",
        columns=["index", "energy_rad_s"],
        metadata={
            "n_atoms": str(n_atoms),
            "c2_rad_s": f"{c2:.17g}",
            "q_rad_s": f"{q:.17g}",
            "ground_n0_expectation": f"{spectrum.ground_n0_expectation:.17g}",
            "basis_dimension": str(spectrum.basis_dimension),
        },
    )
    for i, energy in enumerate(spectrum.eigenvalues):
        table.append([i, energy])
    return table
