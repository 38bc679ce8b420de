"""
╔══════════════════════════════════════════════════════════════════════════════╗
║                            CSV HEADER TEMPLATES                               ║
║                                                                               ║
║  `#` metadata lines echoing the effective parameters, plus the fixed          ║
║  interpretation notes attached to each kind of table.                         ║
╚══════════════════════════════════════════════════════════════════════════════╝
"""

from typing import Dict, List, Mapping, Optional, Tuple

from core import format_value
from .params_units import PhysicalParams
from .rotor_model import build_rotor


# ══════════════════════════════════════════════════════════════════════════════
#  ANNOTATION TEMPLATES
# ══════════════════════════════════════════════════════════════════════════════

ANNOTATION_TEMPLATES: Dict[str, List[str]] = {
    "sweep": [
        "axis {axis}: delta_over_gamma is the scaled static detuning Delta/gamma",
        "nbar = E_Q / omega_eff from the steady second moments; n_thermal uses the bare omega_theta",
        "rows with stable = 0 are anti-trapping or unstable and carry NaN",
        "expected orders of magnitude at Delta = 0: nbar ~ 1e-4 at 500 pK, n ~ 4e3 at 2 uK "
        "(the formulas give nbar ~ 1.4e-3 and n ~ 4.7e4 for c2 = 2 pi x 20 Hz)",
    ],
    "steady": [
        "units: rad/s for frequencies, s for I, theta and L_z dimensionless",
    ],
    "validate": [
        "ok requires {margin} <= c2/q <= 2N^2/{margin}",
    ],
    "spectrum": [
        "s_theta = |chi|^2 S_eps(omega); s_x1, s_x2 assume vacuum inputs",
    ],
    "moments": [
        "integrated with fixed-step fourth-order Runge-Kutta, dt = {dt} s",
    ],
    "trajectory": [
        "noise mode {noise_mode}; thermal force uses the symmetrized spectrum",
    ],
    "psd": [
        "two-sided density per rad/s: variance = sum over +-omega of s_theta domega/2pi",
        "{n_trajectories} trajectories, {n_segments} segments of {segment_len}, window {window}",
    ],
    "exactdiag": [
        "energies in rad/s measured from the ground state",
    ],
}


# ══════════════════════════════════════════════════════════════════════════════
#  METADATA
# ══════════════════════════════════════════════════════════════════════════════

def params_metadata(params: PhysicalParams) -> Dict[str, str]:
    """Effective parameters, canonical units, in a stable key order."""
    return {
        "c2_rad_s": format_value(params.c2),
        "q_rad_s": format_value(params.q),
        "n_atoms": str(params.n_atoms),
        "u0_rad_s": format_value(params.u0),
        "gamma_rad_s": format_value(params.gamma),
        "kappa_l_rad_s": format_value(params.kappa_l),
        "delta_rad_s": format_value(params.delta),
        "d_theta": format_value(build_rotor(params).d_theta),
        "temperature_k": format_value(params.temperature),
    }


def get_annotations(kind: str, context: Optional[Mapping[str, object]] = None) -> List[str]:
    """
    Fixed notes for a table kind.

    Args:
        kind: Table kind, e.g. "sweep" or "psd"
        context: Values substituted into the templates

    Returns:
        Formatted annotation lines, empty for unknown kinds
    """
    context = dict(context or {})
    return [template.format(**context) for template in ANNOTATION_TEMPLATES.get(kind, [])]


def get_header(kind: str, params: PhysicalParams,
               context: Optional[Mapping[str, object]] = None,
               extra: Optional[Mapping[str, str]] = None) -> Tuple[Dict[str, str], List[str]]:
    """Metadata and annotations for one table."""
    metadata = {"table": kind, **params_metadata(params)}
    if extra:
        metadata.update(extra)
    return metadata, get_annotations(kind, context)
