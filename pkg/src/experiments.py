"""
╔══════════════════════════════════════════════════════════════════════════════╗
║                              ROTOR EXPERIMENTS                                ║
║                                                                               ║
║  One experiment per CLI subcommand. Each turns PhysicalParams and an          ║
║  ExperimentConfig into a ResultTable with `#` metadata; the detuning sweep   ║
║  reproduces the roton occupation curves.                                      ║
╚══════════════════════════════════════════════════════════════════════════════╝
"""

import logging
import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from core import BaseExperiment, OutputWriter, ResultTable, format_value
from .config import ExperimentConfig, SweepSpec
from .errors import AntiTrappingError, ConfigurationError, RegimeError, StabilityError
from .headers import get_header
from .langevin import (
    SimConfig,
    TrajectoryEnsemble,
    check_step,
    ensemble_theta_psd,
    integrate_trajectory,
)
from .linear_dynamics import build_drift, rotor_stiffness, spectrum_grid, stable_routh_hurwitz
from .moments import (
    MomentState,
    dispersive_shift,
    integrate_moments,
    rotor_energy,
    roton_occupation,
    shift_per_roton,
    steady_moments,
    thermal_occupation,
    uncertainty_product,
)
from .params_units import TWO_PI, PhysicalParams, RegimeReport, validate_regime
from .rotor_model import build_rotor, exact_spinor_spectrum, harmonic_depletion, quartic_beta, spectrum_table
from .steady_state import SteadyState, cavity_steady_field, solve_steady_state

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["temperature_k", "eta", "omega_eff_rad_s", "n_thermal", "nbar", "stable", "regime_ok"]

# Default integration windows
MOMENTS_RELAXATION_TIMES = 20.0
MOMENTS_MAX_PERIODS = 1000.0
SIM_PERIODS = 64.0
DEFAULT_STEP_FRACTION = 0.02

NAN = float("nan")


class RotorExperiment(BaseExperiment):
    """Common plumbing: parameters, derived rotor, regime check, table headers."""

    kind = "rotor"

    def __init__(self, params: PhysicalParams, config: Optional[ExperimentConfig] = None):
        super().__init__(config or ExperimentConfig())
        self.params = params
        self.model = build_rotor(params)

    def check_regime(self, params: Optional[PhysicalParams] = None) -> RegimeReport:
        """Validity-window report; out of regime raises only in strict mode."""
        params = params or self.params
        report = validate_regime(params, self.config.margin)
        if self.config.strict and not report.ok:
            raise RegimeError(
                f"c2/q = {report.ratio_c2_q:.6g} outside [{report.margin:g}, "
                f"{report.bound_2n2 / report.margin:.6g}]"
            )
        return report

    def new_table(self, columns: List[str], context: Optional[dict] = None,
                  extra: Optional[dict] = None, kind: Optional[str] = None) -> ResultTable:
        kind = kind or self.kind
        metadata, annotations = get_header(kind, self.params, context, extra)
        return ResultTable(name=kind, columns=columns, metadata=metadata, annotations=annotations)


# ══════════════════════════════════════════════════════════════════════════════
#  VALIDATE / STEADY
# ══════════════════════════════════════════════════════════════════════════════

class ValidateExperiment(RotorExperiment):
    kind = "validate"

    def run(self) -> ResultTable:
        report = self.check_regime()
        table = self.new_table(
            ["ratio_c2_q", "bound_2n2", "lower_ok", "upper_ok", "theta_bar", "width_ok", "ok"],
            context={"margin": format_value(self.config.margin)},
            extra={"margin": format_value(report.margin)},
        )
        table.append([
            report.ratio_c2_q, report.bound_2n2, report.lower_ok, report.upper_ok,
            report.theta_bar, report.width_ok, report.ok,
        ])
        return table


class SteadyExperiment(RotorExperiment):
    """Steady state, rotor constants and the steady-moment observables."""

    kind = "steady"

    COLUMNS = [
        "a_re", "a_im", "photon_number", "eta", "omega_eff_rad_s", "omega_theta_rad_s",
        "inertia_s", "xi_theta_rad_s", "theta_bar", "beta_rad_s", "d_theta", "stable",
        "n_thermal", "nbar", "e_q_rad_s", "uncertainty_product",
        "dispersive_shift_rad_s", "shift_per_roton_rad_s",
    ]

    def run(self) -> ResultTable:
        self.check_regime()
        params, model = self.params, self.model
        steady = solve_steady_state(params)
        stable = stable_routh_hurwitz(build_drift(params, model, steady))
        n_thermal = thermal_occupation(model.omega_theta, params.temperature)

        nbar = e_q = product = shift = NAN
        if stable:
            moments = steady_moments(params, steady, model)
            e_q = rotor_energy(moments, params, model)
            product = uncertainty_product(moments)
            shift = dispersive_shift(params, moments, model)
            if steady.eta >= 1.0:
                nbar = roton_occupation(n_thermal, steady.eta)
            else:
                nbar = e_q / steady.omega_eff
        else:
            logger.warning("linearized dynamics unstable; moment observables left as NaN")

        table = self.new_table(self.COLUMNS)
        table.append([
            steady.a_re, steady.a_im, steady.photon_number, steady.eta, steady.omega_eff,
            model.omega_theta, model.inertia_i, model.xi_theta, model.theta_bar,
            quartic_beta(params, steady.photon_number), model.d_theta, stable,
            n_thermal, nbar, e_q, product, shift, shift_per_roton(params, steady, model),
        ])
        return table


# ══════════════════════════════════════════════════════════════════════════════
#  SPECTRUM / MOMENTS
# ══════════════════════════════════════════════════════════════════════════════

class SpectrumExperiment(RotorExperiment):
    kind = "spectrum"

    def run(self) -> ResultTable:
        self.check_regime()
        steady = solve_steady_state(self.params)
        omega_max = self.config.omega_max or 2.0 * steady.omega_eff
        if not omega_max > self.config.omega_min:
            raise ConfigurationError(f"omega_max={omega_max:.6g} must exceed omega_min={self.config.omega_min:.6g}")
        omegas = np.linspace(self.config.omega_min, omega_max, self.config.spectrum_points)
        points = spectrum_grid(omegas, self.params, steady, self.model)

        table = self.new_table(
            ["omega_rad_s", "chi_re", "chi_im", "s_theta", "s_x1", "s_x2"],
            extra={"omega_eff_rad_s": format_value(steady.omega_eff)},
        )
        for p in points:
            table.append([p.omega, p.chi_re, p.chi_im, p.s_theta, p.s_x1, p.s_x2])
        return table


class MomentsExperiment(RotorExperiment):
    """Second moments integrated from rest, next to the analytic steady state."""

    kind = "moments"

    def run(self) -> ResultTable:
        self.check_regime()
        params, model = self.params, self.model
        steady = solve_steady_state(params)
        rate = model.damping_rate
        fastest = max(steady.omega_eff, rate)
        dt = self.config.moments_dt or DEFAULT_STEP_FRACTION / fastest
        t_end = self.config.moments_t_end
        if t_end is None:
            periods = MOMENTS_MAX_PERIODS * TWO_PI / steady.omega_eff
            t_end = min(MOMENTS_RELAXATION_TIMES / rate, periods) if rate > 0.0 else periods

        series = integrate_moments(MomentState(theta2=0.0, l2=0.0), params, steady, t_end, dt, model)
        extra = {"dt_s": format_value(dt), "t_end_s": format_value(t_end)}
        if stable_routh_hurwitz(build_drift(params, model, steady)):
            target = steady_moments(params, steady, model)
            extra.update({
                "steady_theta2": format_value(target.theta2),
                "steady_l2": format_value(target.l2),
            })

        table = self.new_table(["t_s", "theta2", "l2", "sym"], context={"dt": format_value(dt)}, extra=extra)
        for k in range(0, len(series), self.config.moments_stride):
            table.append([series.t[k], series.theta2[k], series.l2[k], series.sym[k]])
        return table


# ══════════════════════════════════════════════════════════════════════════════
#  SWEEP
# ══════════════════════════════════════════════════════════════════════════════

def sweep_params(params: PhysicalParams, axis: str, value: float,
                 temperature: Optional[float] = None) -> PhysicalParams:
    """Parameters at one sweep point."""
    if axis == "delta_over_gamma":
        changes = {"delta": value * params.gamma}
    elif axis == "q_over_c2":
        changes = {"q": value * params.c2}
    elif axis == "kappa_l_hz":
        changes = {"kappa_l": TWO_PI * value}
    elif axis == "temperature_k":
        changes = {"temperature": value}
    else:
        raise ConfigurationError(f"unknown sweep axis {axis!r}")
    if temperature is not None and axis != "temperature_k":
        changes["temperature"] = temperature
    return params.with_updates(**changes)


SweepTask = Tuple[PhysicalParams, str, float, Optional[float], float, bool]


def evaluate_sweep_point(task: SweepTask) -> List[float]:
    """One sweep row: axis value followed by SWEEP_COLUMNS."""
    base, axis, value, temperature, margin, strict = task
    params = sweep_params(base, axis, value, temperature)
    report = validate_regime(params, margin)
    if strict and not report.ok:
        raise RegimeError(f"{axis} = {value:.6g}: c2/q = {report.ratio_c2_q:.6g} outside the rotor regime")

    model = build_rotor(params)
    n_thermal = thermal_occupation(model.omega_theta, params.temperature)
    regime_ok = float(report.ok)
    try:
        steady = solve_steady_state(params)
    except AntiTrappingError:
        return [value, params.temperature, NAN, NAN, n_thermal, NAN, 0.0, regime_ok]

    if not stable_routh_hurwitz(build_drift(params, model, steady)):
        return [value, params.temperature, steady.eta, steady.omega_eff, n_thermal, NAN, 0.0, regime_ok]

    moments = steady_moments(params, steady, model)
    nbar = rotor_energy(moments, params, model) / steady.omega_eff
    return [value, params.temperature, steady.eta, steady.omega_eff, n_thermal, nbar, 1.0, regime_ok]


class SweepExperiment(RotorExperiment):
    """nbar against one parameter axis, one curve per temperature."""

    kind = "sweep"

    def __init__(self, params: PhysicalParams, spec: SweepSpec,
                 config: Optional[ExperimentConfig] = None):
        super().__init__(params, config)
        self.spec = spec

    def run(self) -> ResultTable:
        spec = self.spec
        values = np.linspace(spec.start, spec.stop, spec.points)
        temperatures: Sequence[Optional[float]] = spec.temperatures or [None]
        if spec.axis == "temperature_k":
            temperatures = [None]
        tasks = [
            (self.params, spec.axis, float(v), t, self.config.margin, self.config.strict)
            for t in temperatures
            for v in values
        ]
        logger.info("sweeping %s over %d points x %d temperature(s)", spec.axis, spec.points, len(temperatures))
        rows = self.map_points(evaluate_sweep_point, tasks)

        table = self.new_table(
            [spec.axis] + SWEEP_COLUMNS,
            context={"axis": spec.axis},
            extra={
                "axis": spec.axis,
                "start": format_value(spec.start),
                "stop": format_value(spec.stop),
                "points": str(spec.points),
                "temperatures_k": " ".join(format_value(t) for t in spec.temperatures) or "params",
            },
        )
        for row in rows:
            table.append(row)

        stable = table.column("stable")
        if not any(stable):
            if all(math.isnan(eta) for eta in table.column("eta")):
                raise AntiTrappingError("every sweep point is anti-trapping")
            raise StabilityError("no sweep point has stable linearized dynamics")
        logger.info("sweep finished: %d of %d points stable", int(sum(stable)), len(stable))
        return table


def run_sweep(params: PhysicalParams, spec: SweepSpec,
              config: Optional[ExperimentConfig] = None) -> ResultTable:
    """Evaluate a sweep; rows come back in sweep order."""
    return SweepExperiment(params, spec, config).run()


def emit_plot(table: ResultTable, path: Union[str, Path]) -> Path:
    """SVG of nbar against the sweep axis, one curve per temperature."""
    if len(table.rows) < 2:
        raise ConfigurationError(f"need at least 2 sweep rows to plot, got {len(table.rows)}")
    axis = table.columns[0]
    group = "temperature_k" if len(set(table.column("temperature_k"))) > 1 else None
    path = OutputWriter().write_plot(table, path, axis, "nbar", group)
    table.plot_path = str(path)
    return path


# ══════════════════════════════════════════════════════════════════════════════
#  TRAJECTORIES
# ══════════════════════════════════════════════════════════════════════════════

class SimulationExperiment(RotorExperiment):
    """Langevin ensemble; run() returns the first trajectory, psd_table() the spectrum."""

    kind = "trajectory"

    def __init__(self, params: PhysicalParams, config: Optional[ExperimentConfig] = None):
        super().__init__(params, config)
        self.ensemble: Optional[TrajectoryEnsemble] = None
        self.sim: Optional[SimConfig] = None

    def steady_hint(self) -> SteadyState:
        try:
            return solve_steady_state(self.params)
        except AntiTrappingError:
            logger.warning("anti-trapping parameters: simulating around the bare cavity field")
            return cavity_steady_field(self.params)

    def sim_config(self, steady: SteadyState) -> SimConfig:
        cfg, params, model = self.config, self.params, self.model
        omega_eff = math.sqrt(abs(rotor_stiffness(model, steady)) / model.inertia_i)
        fastest = max(params.gamma, abs(params.delta), model.omega_theta, omega_eff, model.damping_rate)
        dt = cfg.sim_dt or DEFAULT_STEP_FRACTION / fastest
        t_end = cfg.sim_t_end or SIM_PERIODS * TWO_PI / omega_eff
        sim = SimConfig(
            dt=dt,
            t_end=t_end,
            seed=cfg.random_seed or 0,
            noise_mode=cfg.noise_mode,
            include_vacuum_input=cfg.include_vacuum_input,
            include_quartic=cfg.include_quartic,
            n_trajectories=cfg.n_trajectories,
            record_stride=cfg.record_stride,
        )
        check_step(params, steady, sim, model)
        return sim

    def simulate(self) -> TrajectoryEnsemble:
        self.check_regime()
        steady = self.steady_hint()
        self.sim = self.sim_config(steady)
        self.ensemble = integrate_trajectory(self.params, steady, self.sim, mapper=self.map_points)
        return self.ensemble

    def run(self) -> ResultTable:
        ensemble = self.simulate()
        table = ensemble.to_table(0)
        table.metadata, table.annotations = get_header(
            self.kind, self.params,
            context={"noise_mode": self.sim.noise_mode},
            extra={
                "dt_s": format_value(self.sim.dt),
                "t_end_s": format_value(self.sim.t_end),
                "seed": str(self.sim.seed),
                "record_stride": str(self.sim.record_stride),
                "n_trajectories": str(ensemble.n_trajectories),
            },
        )
        return table

    def psd_table(self, segment_len: Optional[int] = None) -> ResultTable:
        if self.ensemble is None:
            self.simulate()
        segment_len = segment_len or self.config.psd_segment_len
        if segment_len is None:
            raise ConfigurationError("no PSD segment length given")
        psd = ensemble_theta_psd(self.ensemble, segment_len, self.config.psd_window)
        table = self.new_table(
            ["omega_rad_s", "s_theta"],
            kind="psd",
            context={
                "n_trajectories": psd.n_trajectories,
                "n_segments": psd.n_segments,
                "segment_len": segment_len,
                "window": self.config.psd_window,
            },
            extra={"variance": format_value(psd.variance())},
        )
        for omega, s in zip(psd.omega, psd.s_theta):
            table.append([omega, s])
        return table


# ══════════════════════════════════════════════════════════════════════════════
#  EXACT DIAGONALIZATION
# ══════════════════════════════════════════════════════════════════════════════

class ExactDiagExperiment(RotorExperiment):
    kind = "exactdiag"

    def run(self) -> ResultTable:
        params = self.params
        spectrum = exact_spinor_spectrum(params.n_atoms, params.c2, params.q, self.config.levels)
        table = spectrum_table(spectrum, params.n_atoms, params.c2, params.q)
        metadata, annotations = get_header(self.kind, params)
        table.metadata = {**metadata, **table.metadata}
        table.annotations = annotations
        table.metadata.update({
            "rotor_omega_theta_rad_s": format_value(self.model.omega_theta),
            "harmonic_depletion": format_value(harmonic_depletion(params)),
        })
        return table
