"""
Quantum rotor optomechanics implementation.

This package models the collective rotor of an antiferromagnetic spin-1
condensate coupled to a driven cavity:
    - params_units.py   : Physical parameters, units, regime check (PhysicalParams)
    - rotor_model.py    : Harmonic rotor and exact spinor spectrum (RotorModel)
    - steady_state.py   : Mean-field steady state and enhancement factor (SteadyState)
    - linear_dynamics.py: Drift matrix, stability, susceptibility, spectra
    - moments.py        : Second moments, rotor energy, roton occupation
    - langevin.py       : Stochastic trajectories and theta PSD
    - config.py         : Run configuration, sweeps, presets (ExperimentConfig)
    - headers.py        : CSV metadata and annotation templates (get_header)
    - experiments.py    : One experiment per subcommand
    - cli.py            : Command-line driver (main)
"""

from .config import PRESETS, ExperimentConfig, SweepSpec
from .errors import RotorOptomechanicsError
from .experiments import emit_plot, run_sweep
from .headers import get_header
from .params_units import PhysicalParams, load_params_file, validate_regime
from .rotor_model import RotorModel, build_rotor
from .steady_state import SteadyState, solve_steady_state

__all__ = [
    "PRESETS",
    "ExperimentConfig",
    "SweepSpec",
    "RotorOptomechanicsError",
    "emit_plot",
    "run_sweep",
    "get_header",
    "PhysicalParams",
    "load_params_file",
    "validate_regime",
    "RotorModel",
    "build_rotor",
    "SteadyState",
    "solve_steady_state",
]
