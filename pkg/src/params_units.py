"""
╔══════════════════════════════════════════════════════════════════════════════╗
║                        PHYSICAL PARAMETERS AND UNITS                          ║
║                                                                               ║
║  hbar = 1. Every rate and frequency is an angular frequency in rad/s,         ║
║  theta and L_z are dimensionless, the moment of inertia I is in seconds.      ║
║  Temperature enters only through thermal_frequency (k_B T / hbar).            ║
╚══════════════════════════════════════════════════════════════════════════════╝
"""

import logging
import math
import re
from pathlib import Path
from typing import Dict, Mapping, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigurationError, DomainError

logger = logging.getLogger(__name__)


# ══════════════════════════════════════════════════════════════════════════════
#  CONSTANTS
# ══════════════════════════════════════════════════════════════════════════════

TWO_PI = 2.0 * math.pi

TESLA_PER_GAUSS = 1.0e-4

# mu_B / hbar = 2 pi x 1.399624 MHz/gauss, expressed per tesla
MU_B_OVER_HBAR = TWO_PI * 1.399624e6 / TESLA_PER_GAUSS  # rad/(s T)

K_B_OVER_HBAR = 1.30920e11  # rad/(s K)

DEFAULT_MARGIN = 10.0

# D_theta / I as a fraction of omega_theta when d_theta is not given
DEFAULT_DAMPING_FRACTION = 1.0e-2


# ══════════════════════════════════════════════════════════════════════════════
#  DOMAIN TYPES
# ══════════════════════════════════════════════════════════════════════════════

class PhysicalParams(BaseModel):
    """All experimental inputs, in rad/s (and kelvin for temperature)."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    c2: float = Field(gt=0.0, description="Antiferromagnetic spin coupling (rad/s)")
    q: float = Field(gt=0.0, description="Quadratic Zeeman shift (rad/s)")
    n_atoms: int = Field(ge=2, description="Atom number N")
    u0: float = Field(default=0.0, description="Single-photon light shift U0 (rad/s), may be negative")
    gamma: float = Field(gt=0.0, description="Cavity damping rate (rad/s)")
    kappa_l: float = Field(default=0.0, ge=0.0, description="Pump amplitude (rad/s)")
    delta: float = Field(default=0.0, description="Static pump-cavity detuning (rad/s)")
    d_theta: Optional[float] = Field(
        default=None, ge=0.0,
        description="Rotor damping constant D_theta (dimensionless); None selects D_theta/I = 1e-2 omega_theta",
    )
    temperature: float = Field(default=0.0, ge=0.0, description="Reservoir temperature (K)")

    def with_updates(self, **changes) -> "PhysicalParams":
        """Return a re-validated copy with some fields replaced."""
        return PhysicalParams(**{**self.model_dump(), **changes})


class RegimeReport(BaseModel):
    """Outcome of the 1 << c2/q << 2N^2 check."""
    model_config = ConfigDict(frozen=True)

    ratio_c2_q: float
    bound_2n2: float
    lower_ok: bool
    upper_ok: bool
    margin: float
    theta_bar: float
    width_ok: bool

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.upper_ok


# ══════════════════════════════════════════════════════════════════════════════
#  OPERATIONS
# ══════════════════════════════════════════════════════════════════════════════

def quadratic_zeeman(b_field: float, delta_hf: float) -> float:
    """
    Quadratic Zeeman shift q = (mu_B B / hbar)^2 / (4 Delta_hf).

    Args:
        b_field: Magnetic field in tesla
        delta_hf: Hyperfine splitting in rad/s

    Returns:
        q in rad/s
    """
    if not delta_hf > 0.0:
        raise DomainError(f"hyperfine splitting must be positive, got {delta_hf}")
    if b_field < 0.0:
        raise DomainError(f"magnetic field must be non-negative, got {b_field}")
    larmor = MU_B_OVER_HBAR * b_field
    return larmor * larmor / (4.0 * delta_hf)


def thermal_frequency(temperature: float) -> float:
    """k_B T / hbar in rad/s."""
    if temperature < 0.0:
        raise DomainError(f"temperature must be non-negative, got {temperature}")
    return K_B_OVER_HBAR * temperature


def validate_regime(params: PhysicalParams, margin: float = DEFAULT_MARGIN) -> RegimeReport:
    """
    Check the harmonic-rotor window 1 << c2/q << 2N^2, reading "<<" as a
    factor-of-margin separation. Never raises for valid params; only reports.
    """
    if margin < 1.0:
        raise DomainError(f"margin must be >= 1, got {margin}")
    from .rotor_model import ground_state_width

    ratio = params.c2 / params.q
    bound = 2.0 * params.n_atoms ** 2
    theta_bar = ground_state_width(params)
    report = RegimeReport(
        ratio_c2_q=ratio,
        bound_2n2=bound,
        lower_ok=ratio >= margin,
        upper_ok=ratio <= bound / margin,
        margin=margin,
        theta_bar=theta_bar,
        width_ok=theta_bar <= 1.0 / margin,
    )
    if not report.ok:
        logger.warning(
            "outside the harmonic rotor regime: c2/q=%.6g, 2N^2=%.6g, margin=%g",
            ratio, bound, margin,
        )
    return report


# ══════════════════════════════════════════════════════════════════════════════
#  CONFIG FILE SURFACE (plain Hz, converted once)
# ══════════════════════════════════════════════════════════════════════════════

class ParamsFile(BaseModel):
    """
    Parameters as written in a config file: frequencies in plain Hz.

    q is given either as q_hz or through (b_field_gauss, delta_hf_hz);
    the detuning either as delta_hz or as delta_over_gamma.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    c2_hz: float
    q_hz: Optional[float] = None
    b_field_gauss: Optional[float] = None
    delta_hf_hz: Optional[float] = None
    n_atoms: int
    u0_hz: float = 0.0
    gamma_hz: float
    kappa_l_hz: float = 0.0
    delta_hz: Optional[float] = None
    delta_over_gamma: Optional[float] = None
    d_theta: Optional[float] = None
    temperature_k: float = 0.0

    @model_validator(mode="after")
    def _check_alternatives(self) -> "ParamsFile":
        zeeman = (self.b_field_gauss is not None, self.delta_hf_hz is not None)
        if self.q_hz is not None and any(zeeman):
            raise ValueError("give either q_hz or b_field_gauss + delta_hf_hz, not both")
        if self.q_hz is None and not all(zeeman):
            raise ValueError("q_hz, or both b_field_gauss and delta_hf_hz, are required")
        if self.delta_hz is not None and self.delta_over_gamma is not None:
            raise ValueError("give either delta_hz or delta_over_gamma, not both")
        return self

    def to_params(self) -> PhysicalParams:
        """Convert to canonical rad/s units."""
        if self.q_hz is not None:
            q = TWO_PI * self.q_hz
        else:
            q = quadratic_zeeman(self.b_field_gauss * TESLA_PER_GAUSS, TWO_PI * self.delta_hf_hz)
        gamma = TWO_PI * self.gamma_hz
        if self.delta_over_gamma is not None:
            delta = self.delta_over_gamma * gamma
        else:
            delta = TWO_PI * (self.delta_hz or 0.0)
        return PhysicalParams(
            c2=TWO_PI * self.c2_hz,
            q=q,
            n_atoms=self.n_atoms,
            u0=TWO_PI * self.u0_hz,
            gamma=gamma,
            kappa_l=TWO_PI * self.kappa_l_hz,
            delta=delta,
            d_theta=self.d_theta,
            temperature=self.temperature_k,
        )


CONFIG_KEYS = tuple(ParamsFile.model_fields)

_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(\S.*?)\s*$")


def parse_config_text(text: str) -> Dict[str, str]:
    """Parse `key = value` lines; `#` starts a comment."""
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        match = _LINE.match(line)
        if match is None:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = match.groups()
        if key not in CONFIG_KEYS:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def params_file_from_mapping(values: Mapping[str, object]) -> ParamsFile:
    """Validate raw key/value pairs, turning validation failures into ConfigurationError."""
    unknown = sorted(set(values) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
    try:
        return ParamsFile(**values)
    except ValidationError as exc:
        raise ConfigurationError(str(exc)) from exc


def load_params_file(path: Union[str, Path], overrides: Optional[Mapping[str, object]] = None) -> PhysicalParams:
    """Read a config file, apply overrides (overrides win) and convert to PhysicalParams."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    values = merge_overrides(parse_config_text(text), overrides or {})
    return params_from_hz(values)


def params_from_hz(values: Mapping[str, object]) -> PhysicalParams:
    """Build PhysicalParams from config-style keys (plain Hz)."""
    params_file = params_file_from_mapping(values)
    try:
        return params_file.to_params()
    except ValidationError as exc:
        raise ConfigurationError(str(exc)) from exc


# Keys that replace each other: setting one from an override drops the others
_ALTERNATIVES = (
    ("q_hz", ("b_field_gauss", "delta_hf_hz")),
    ("b_field_gauss", ("q_hz",)),
    ("delta_hf_hz", ("q_hz",)),
    ("delta_hz", ("delta_over_gamma",)),
    ("delta_over_gamma", ("delta_hz",)),
)


def merge_overrides(values: Mapping[str, object], overrides: Mapping[str, object]) -> Dict[str, object]:
    """Merge overrides over file values; None means "not given"."""
    merged: Dict[str, object] = dict(values)
    given = {k: v for k, v in overrides.items() if v is not None}
    for key, replaced in _ALTERNATIVES:
        if key in given:
            for other in replaced:
                if other not in given:
                    merged.pop(other, None)
    merged.update(given)
    return merged
