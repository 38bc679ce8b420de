"""Shared parameter sets for the test suite."""

import math
import sys
from pathlib import Path
from typing import Callable, List

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.params_units import TWO_PI, PhysicalParams  # noqa: E402
from src.rotor_model import build_rotor  # noqa: E402
from src.steady_state import solve_steady_state  # noqa: E402


def fig1() -> PhysicalParams:
    """Na condensate in a high-finesse cavity, Delta = 0, 500 pK."""
    return PhysicalParams(
        c2=TWO_PI * 20.0,
        q=TWO_PI * 0.02,
        n_atoms=100000,
        u0=TWO_PI * 100.0,
        gamma=TWO_PI * 5.0e4,
        kappa_l=TWO_PI * 3.0e6,
        delta=0.0,
        temperature=5.0e-10,
    )


def dynamics() -> PhysicalParams:
    """
    Small rates for trajectory tests: I = 10 s, omega_theta ~ 14.2,
    |a_s|^2 = 1e4, eta = sqrt(2), D_theta / I = 1.
    """
    return PhysicalParams(
        c2=100.0,
        q=1.0,
        n_atoms=1000,
        u0=1.0e-4,
        gamma=20.0,
        kappa_l=2000.0,
        d_theta=10.0,
    )


def thermal() -> PhysicalParams:
    """
    Classical regime for ensemble statistics: I = 100 s, omega_eff ~ 10.0,
    D_theta / I = 1, k_B T ~ 1309 rad/s >= 100 omega_eff.
    """
    return PhysicalParams(
        c2=100.0,
        q=0.25,
        n_atoms=10000,
        u0=2.5e-6,
        gamma=10.0,
        kappa_l=10.0 * math.sqrt(1.0e5),
        d_theta=100.0,
        temperature=1.0e-8,
    )


@pytest.fixture
def fig1_params() -> PhysicalParams:
    return fig1()


@pytest.fixture
def dynamics_params() -> PhysicalParams:
    return dynamics()


@pytest.fixture
def thermal_params() -> PhysicalParams:
    return thermal()


def draw_stable_params(rng: np.random.Generator) -> PhysicalParams:
    """
    One random strictly stable, underdamped parameter set:
    omega_eff / (D_theta / I) in [1, 10], |a_s|^2 = 1e4, eta^2 in (1, 11].
    """
    gamma = 20.0
    delta = rng.uniform(-2.0, 2.0) * gamma
    base = PhysicalParams(
        c2=100.0,
        q=1.0,
        n_atoms=1000,
        u0=10.0 ** rng.uniform(-6.0, -3.0),
        gamma=gamma,
        kappa_l=math.sqrt(1.0e4 * (gamma ** 2 + delta ** 2)),
        delta=delta,
        temperature=10.0 ** rng.uniform(-12.0, -8.0),
    )
    model = build_rotor(base)
    omega_eff = solve_steady_state(base).omega_eff
    ratio = rng.uniform(1.0, 10.0)
    return base.with_updates(d_theta=model.inertia_i * omega_eff / ratio)


@pytest.fixture
def random_stable_params() -> Callable[[int], List[PhysicalParams]]:
    """Factory of reproducible random stable draws."""
    def draw(count: int, seed: int = 20240611) -> List[PhysicalParams]:
        rng = np.random.default_rng(seed)
        return [draw_stable_params(rng) for _ in range(count)]
    return draw
