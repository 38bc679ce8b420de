"""
╔══════════════════════════════════════════════════════════════════════════════╗
║                                COMMAND LINE                                   ║
║                                                                               ║
║  rotor-opto {validate,steady,spectrum,moments,sweep,simulate,exactdiag}       ║
║                                                                               ║
║  Parameters come from --preset, then --config FILE, then per-key flags        ║
║  (later sources win). Tables go to --output or stdout; logs to stderr.        ║
║  Exit codes: 0 ok, 1 configuration, 2 physics regime, 3 numerical.            ║
╚══════════════════════════════════════════════════════════════════════════════╝
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import ValidationError

from core import OutputWriter
from .config import FIG1_TEMPERATURES, PRESETS, ExperimentConfig, SweepSpec
from .errors import ConfigurationError, RotorOptomechanicsError
from .experiments import (
    ExactDiagExperiment,
    MomentsExperiment,
    SimulationExperiment,
    SpectrumExperiment,
    SteadyExperiment,
    SweepExperiment,
    ValidateExperiment,
    emit_plot,
)
from .params_units import CONFIG_KEYS, PhysicalParams, merge_overrides, params_from_hz, parse_config_text

logger = logging.getLogger(__name__)

# Flag types for the per-key overrides
_OVERRIDE_TYPES = {"n_atoms": int}


# ══════════════════════════════════════════════════════════════════════════════
#  PARSER
# ══════════════════════════════════════════════════════════════════════════════

class ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with the configuration code instead of argparse's 2."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(ConfigurationError.exit_code, f"{self.prog}: error: {message}\n")


def _common_parser() -> argparse.ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="Parameter file with key = value lines")
    common.add_argument("--preset", choices=sorted(PRESETS), help="Start from a named parameter set")
    for key in CONFIG_KEYS:
        common.add_argument(
            "--" + key.replace("_", "-"), dest=key, type=_OVERRIDE_TYPES.get(key, float),
            help=f"Override {key}",
        )
    common.add_argument("--output", "-o", help="Output CSV path (default: stdout)")
    common.add_argument("--jobs", "-j", type=int, help="Worker processes (default: $ROTOR_OPTO_JOBS or 1)")
    common.add_argument("--seed", type=int, help="Root random seed")
    common.add_argument("--margin", type=float, help="Regime separation factor (default 10)")
    common.add_argument("--strict", action="store_true", help="Fail on out-of-regime parameters")
    common.add_argument("--verbose", "-v", action="count", default=0, help="-v info, -vv debug")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(
        prog="rotor-opto",
        description="Cavity optomechanics of the quantum rotor of an antiferromagnetic spin-1 condensate",
    )
    common = _common_parser()
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common], help="Check the harmonic rotor regime")
    sub.add_parser("steady", parents=[common], help="Steady state, eta, omega_eff and nbar")

    spectrum = sub.add_parser("spectrum", parents=[common], help="chi, S_theta and quadrature spectra")
    spectrum.add_argument("--omega-min", type=float, help="Lowest frequency (rad/s)")
    spectrum.add_argument("--omega-max", type=float, help="Highest frequency (rad/s), default 2 omega_eff")
    spectrum.add_argument("--points", type=int, help="Grid points (default 401)")

    moments = sub.add_parser("moments", parents=[common], help="Integrate the second-moment equations")
    moments.add_argument("--t-end", type=float, help="Integration time (s)")
    moments.add_argument("--dt", type=float, help="Time step (s)")
    moments.add_argument("--stride", type=int, help="Emit every k-th step")

    sweep = sub.add_parser("sweep", parents=[common], help="nbar along one parameter axis")
    sweep.add_argument("--axis", choices=["delta_over_gamma", "q_over_c2", "kappa_l_hz", "temperature_k"],
                       default="delta_over_gamma")
    sweep.add_argument("--start", type=float, default=-10.0)
    sweep.add_argument("--stop", type=float, default=10.0)
    sweep.add_argument("--points", type=int, default=401)
    sweep.add_argument("--temperatures", type=float, nargs="+", help="One curve per temperature (K)")
    sweep.add_argument("--plot", type=Path, help="Also write an SVG plot here")

    simulate = sub.add_parser("simulate", parents=[common], help="Langevin trajectories and theta PSD")
    simulate.add_argument("--t-end", type=float, help="Integration time (s)")
    simulate.add_argument("--dt", type=float, help="Time step (s)")
    simulate.add_argument("--noise", choices=["deterministic", "classical_white", "quantum_colored"])
    simulate.add_argument("--vacuum", action="store_true", help="Add vacuum input noise to the cavity")
    simulate.add_argument("--quartic", action="store_true", help="Include the quartic rotor potential")
    simulate.add_argument("--trajectories", type=int, help="Ensemble size")
    simulate.add_argument("--stride", type=int, help="Record every k-th step")
    simulate.add_argument("--psd-output", help="Also write the ensemble theta PSD here")
    simulate.add_argument("--segment-len", type=int, default=1024, help="Welch segment length")
    simulate.add_argument("--window", choices=["none", "cosine-taper"])

    exactdiag = sub.add_parser("exactdiag", parents=[common], help="Exact spinor spectrum for N <= 60")
    exactdiag.add_argument("--levels", type=int, help="Number of lowest levels (default 6)")
    return parser


# ══════════════════════════════════════════════════════════════════════════════
#  ARGUMENT RESOLUTION
# ══════════════════════════════════════════════════════════════════════════════

def resolve_params(args: argparse.Namespace) -> PhysicalParams:
    """preset < config file < per-key flags."""
    values: Dict[str, object] = dict(PRESETS[args.preset]) if args.preset else {}
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigurationError(f"cannot read config file {args.config}: {exc}") from exc
        values = merge_overrides(values, parse_config_text(text))
    overrides = {key: getattr(args, key) for key in CONFIG_KEYS}
    return params_from_hz(merge_overrides(values, overrides))


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """ExperimentConfig from the flags that were actually given."""
    given = {
        "jobs": args.jobs,
        "random_seed": args.seed,
        "margin": args.margin,
        "strict": args.strict,
        "omega_min": getattr(args, "omega_min", None),
        "omega_max": getattr(args, "omega_max", None),
        "levels": getattr(args, "levels", None),
        "noise_mode": getattr(args, "noise", None),
        "n_trajectories": getattr(args, "trajectories", None),
        "psd_window": getattr(args, "window", None),
    }
    if args.command == "spectrum":
        given["spectrum_points"] = args.points
    if args.command == "moments":
        given.update(moments_t_end=args.t_end, moments_dt=args.dt, moments_stride=args.stride)
    if args.command == "simulate":
        given.update(
            sim_t_end=args.t_end,
            sim_dt=args.dt,
            record_stride=args.stride,
            include_vacuum_input=args.vacuum,
            include_quartic=args.quartic,
            psd_segment_len=args.segment_len if args.psd_output else None,
        )
    return ExperimentConfig(**{k: v for k, v in given.items() if v is not None})


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


# ══════════════════════════════════════════════════════════════════════════════
#  COMMANDS
# ══════════════════════════════════════════════════════════════════════════════

_SIMPLE = {
    "validate": ValidateExperiment,
    "steady": SteadyExperiment,
    "spectrum": SpectrumExperiment,
    "moments": MomentsExperiment,
    "exactdiag": ExactDiagExperiment,
}


def run_command(args: argparse.Namespace) -> None:
    params = resolve_params(args)
    config = resolve_config(args)
    writer = OutputWriter()

    if args.command in _SIMPLE:
        table = _SIMPLE[args.command](params, config).run()
        writer.write_table(table, args.output)
        return

    if args.command == "sweep":
        temperatures = args.temperatures
        if temperatures is None and args.preset == "fig1":
            temperatures = list(FIG1_TEMPERATURES)
        spec = SweepSpec(
            axis=args.axis, start=args.start, stop=args.stop,
            points=args.points, temperatures=temperatures or [],
        )
        table = SweepExperiment(params, spec, config).run()
        if args.plot is not None:
            emit_plot(table, args.plot)
            table.metadata["plot"] = str(args.plot)
        writer.write_table(table, args.output)
        return

    if args.command == "simulate":
        experiment = SimulationExperiment(params, config)
        writer.write_table(experiment.run(), args.output)
        if args.psd_output:
            writer.write_table(experiment.psd_table(), args.psd_output)
        return

    raise ConfigurationError(f"unknown command {args.command!r}")


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    configure_logging(args.verbose)
    try:
        run_command(args)
    except RotorOptomechanicsError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    except ValidationError as exc:
        logger.error("invalid parameters: %s", exc)
        return 1
    except (ValueError, OSError) as exc:
        logger.error("%s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
