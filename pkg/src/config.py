"""
╔══════════════════════════════════════════════════════════════════════════════╗
║                        ROTOR EXPERIMENT CONFIGURATION                         ║
║                                                                               ║
║  Run settings for every subcommand, the sweep definition and the              ║
║  named parameter presets. Inherits common settings from core.RunConfig.       ║
╚══════════════════════════════════════════════════════════════════════════════╝
"""

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from core import RunConfig
from .params_units import DEFAULT_MARGIN

SweepAxis = Literal["delta_over_gamma", "q_over_c2", "kappa_l_hz", "temperature_k"]

MAX_SWEEP_POINTS = 10 ** 6


class SweepSpec(BaseModel):
    """One-dimensional parameter sweep, optionally repeated per temperature."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    axis: SweepAxis = Field(default="delta_over_gamma")
    start: float = Field(default=-10.0)
    stop: float = Field(default=10.0)
    points: int = Field(default=401, ge=2, le=MAX_SWEEP_POINTS)
    temperatures: List[float] = Field(
        default_factory=list,
        description="Temperatures (K), one curve each; empty uses the parameter temperature",
    )

    @model_validator(mode="after")
    def _check_range(self) -> "SweepSpec":
        if not self.start < self.stop:
            raise ValueError(f"sweep needs start < stop, got {self.start} >= {self.stop}")
        if any(t < 0.0 for t in self.temperatures):
            raise ValueError("sweep temperatures must be non-negative")
        return self


class ExperimentConfig(RunConfig):
    """
    Rotor experiment configuration.

    Inherited from RunConfig:
        - jobs: int                  # Worker processes for sweeps and ensembles
        - random_seed: Optional[int] # Root seed of every noise stream
        - output_dir: Path           # Where to save outputs
        - strict: bool               # Out-of-regime parameters become errors
    """

    # ══════════════════════════════════════════════════════════════════════════
    #  REGIME CHECK
    # ══════════════════════════════════════════════════════════════════════════

    margin: float = Field(
        default=DEFAULT_MARGIN, ge=1.0,
        description="Factor by which '<<' must hold in 1 << c2/q << 2N^2",
    )

    # ══════════════════════════════════════════════════════════════════════════
    #  SPECTRUM GRID
    # ══════════════════════════════════════════════════════════════════════════

    omega_min: float = Field(default=0.0, ge=0.0, description="Lowest frequency of the grid (rad/s)")
    omega_max: Optional[float] = Field(
        default=None, gt=0.0,
        description="Highest frequency of the grid (rad/s); None selects 2 omega_eff",
    )
    spectrum_points: int = Field(default=401, ge=2, le=MAX_SWEEP_POINTS)

    # ══════════════════════════════════════════════════════════════════════════
    #  MOMENT INTEGRATION
    # ══════════════════════════════════════════════════════════════════════════

    moments_t_end: Optional[float] = Field(
        default=None, gt=0.0,
        description="Integration time (s); None selects 20 I / D_theta",
    )
    moments_dt: Optional[float] = Field(
        default=None, gt=0.0,
        description="Step (s); None selects 0.02 / max(omega_eff, D_theta / I)",
    )
    moments_stride: int = Field(default=1, ge=1, description="Emit every k-th step")

    # ══════════════════════════════════════════════════════════════════════════
    #  TRAJECTORIES AND PSD
    # ══════════════════════════════════════════════════════════════════════════

    sim_dt: Optional[float] = Field(
        default=None, gt=0.0,
        description="Step (s); None selects 0.02 / max(gamma, |Delta|, omega_eff, D_theta / I)",
    )
    sim_t_end: Optional[float] = Field(
        default=None, gt=0.0,
        description="Integration time (s); None selects 64 periods of omega_eff",
    )
    noise_mode: Literal["deterministic", "classical_white", "quantum_colored"] = "quantum_colored"
    include_vacuum_input: bool = False
    include_quartic: bool = False
    n_trajectories: int = Field(default=1, ge=1)
    record_stride: int = Field(default=1, ge=1)
    psd_segment_len: Optional[int] = Field(
        default=None, ge=2,
        description="Welch segment length; None skips the PSD",
    )
    psd_window: Literal["none", "cosine-taper"] = "cosine-taper"

    # ══════════════════════════════════════════════════════════════════════════
    #  EXACT DIAGONALIZATION
    # ══════════════════════════════════════════════════════════════════════════

    levels: int = Field(default=6, ge=1, description="Number of lowest levels to report")


# ══════════════════════════════════════════════════════════════════════════════
#  PRESETS (config-file keys, plain Hz)
# ══════════════════════════════════════════════════════════════════════════════

PRESETS: Dict[str, Dict[str, object]] = {
    # Na-23 condensate in a high-finesse cavity, q/c2 = 1e-3
    "fig1": {
        "c2_hz": 20.0,
        "q_hz": 0.02,
        "n_atoms": 100000,
        "u0_hz": 100.0,
        "gamma_hz": 5.0e4,
        "kappa_l_hz": 3.0e6,
        "delta_over_gamma": 0.0,
        "temperature_k": 5.0e-10,
    },
}

# Curves of the detuning scan: 2 uK and 500 pK
FIG1_TEMPERATURES = (2.0e-6, 5.0e-10)
