"""
╔══════════════════════════════════════════════════════════════════════════════╗
║                       SEMICLASSICAL LANGEVIN TRAJECTORIES                     ║
║                                                                               ║
║  Nonlinear rotor + cavity equations with thermal force noise (white or        ║
║  coloured by the symmetrized quantum kernel) and optional vacuum input,       ║
║  integrated by a Heun predictor-corrector. Ensembles feed a Welch estimate   ║
║  of the theta power spectrum.                                                 ║
║                                                                               ║
║  Noise convention: a process with two-sided spectral density S(omega),       ║
║  <x(t) x(t')> = int dw/2pi S(w) e^{-iw(t-t')}, is sampled piecewise constant  ║
║  with variance int_{-pi/dt}^{pi/dt} S dw/2pi (= S/dt when white).             ║
╚══════════════════════════════════════════════════════════════════════════════╝
"""

import logging
import math
from functools import partial
from typing import Callable, Iterable, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import signal

from core import ResultTable
from .errors import ConfigurationError, DivergenceError, DomainError
from .linear_dynamics import build_drift, rotor_stiffness, stable_routh_hurwitz, symmetrized_noise_spectrum
from .params_units import PhysicalParams, thermal_frequency
from .rotor_model import RotorModel, build_rotor, quartic_beta
from .steady_state import SteadyState

logger = logging.getLogger(__name__)

NoiseMode = Literal["deterministic", "classical_white", "quantum_colored"]
WindowName = Literal["none", "cosine-taper"]
SeedLike = Union[int, np.random.SeedSequence]

# dt * max(gamma, |Delta|, omega_eff, D_theta / I) must not exceed this
MAX_STEP_FRACTION = 0.05
MAX_STEPS = 10 ** 8
# Noise samples held in memory per batch; longer runs integrate fewer trajectories at once
NOISE_SAMPLE_BUDGET = 2 ** 24

# SeedSequence spawn-key channels
THERMAL_CHANNEL = 0
VACUUM_RE_CHANNEL = 1
VACUUM_IM_CHANNEL = 2

# Symmetrized density of each vacuum input quadrature X = (zeta + zeta*) / sqrt(2)
VACUUM_QUADRATURE_DENSITY = 0.5

_WINDOWS = {"none": "boxcar", "cosine-taper": "hann"}


# ══════════════════════════════════════════════════════════════════════════════
#  DOMAIN TYPES
# ══════════════════════════════════════════════════════════════════════════════

class SimConfig(BaseModel):
    """Trajectory simulation settings."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    dt: float = Field(gt=0.0, description="Time step (s)")
    t_end: float = Field(gt=0.0, description="Integration time (s)")
    seed: int = Field(default=0, ge=0, lt=2 ** 64, description="Root seed of every noise stream")
    noise_mode: NoiseMode = Field(default="quantum_colored")
    include_vacuum_input: bool = Field(default=False)
    include_quartic: bool = Field(default=False)
    n_trajectories: int = Field(default=1, gt=0)
    record_stride: int = Field(default=1, gt=0, description="Keep every k-th step")
    batch_size: int = Field(default=50, gt=0, description="Trajectories integrated together")
    transient: Optional[float] = Field(
        default=None, ge=0.0,
        description="Time discarded before statistics (s); None selects 10 I / D_theta",
    )

    @property
    def n_steps(self) -> int:
        return max(1, int(math.ceil(self.t_end / self.dt - 1e-9)))


class TrajectoryRecord(BaseModel):
    """One recorded state of one trajectory."""
    model_config = ConfigDict(frozen=True)

    t: float
    theta: float
    l_z: float
    a_re: float
    a_im: float


class TrajectoryEnsemble(BaseModel):
    """Recorded trajectories; state arrays have shape (n_trajectories, n_records)."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    t: np.ndarray
    theta: np.ndarray
    l_z: np.ndarray
    a_re: np.ndarray
    a_im: np.ndarray
    transient_time: float = Field(ge=0.0)

    @property
    def n_trajectories(self) -> int:
        return self.theta.shape[0]

    @property
    def sample_interval(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else 0.0

    def records(self, index: int) -> List[TrajectoryRecord]:
        return [
            TrajectoryRecord(
                t=float(self.t[k]),
                theta=float(self.theta[index, k]),
                l_z=float(self.l_z[index, k]),
                a_re=float(self.a_re[index, k]),
                a_im=float(self.a_im[index, k]),
            )
            for k in range(len(self.t))
        ]

    def to_table(self, index: int = 0, stride: int = 1) -> ResultTable:
        """Trajectory `index` as t_s, theta, l_z, a_re, a_im rows."""
        table = ResultTable(name="trajectory", columns=["t_s", "theta", "l_z", "a_re", "a_im"])
        for k in range(0, len(self.t), stride):
            table.append([
                self.t[k], self.theta[index, k], self.l_z[index, k],
                self.a_re[index, k], self.a_im[index, k],
            ])
        return table


class ThetaPsd(BaseModel):
    """
    Ensemble-averaged theta spectrum on omega >= 0, in the two-sided
    convention: variance = int_{-inf}^{inf} s_theta dw/2pi.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    omega: np.ndarray
    s_theta: np.ndarray
    n_segments: int
    n_trajectories: int
    segment_len: int

    def variance(self) -> float:
        """Total power, folding the negative frequencies onto the positive grid."""
        weights = np.full(len(self.omega), 2.0)
        weights[0] = 1.0
        if self.segment_len % 2 == 0:
            weights[-1] = 1.0
        d_omega = self.omega[1] - self.omega[0]
        return float(np.sum(weights * self.s_theta) * d_omega / (2.0 * math.pi))


# ══════════════════════════════════════════════════════════════════════════════
#  NOISE SYNTHESIS
# ══════════════════════════════════════════════════════════════════════════════

def trajectory_seed(seed: int, trajectory: int, channel: int) -> np.random.SeedSequence:
    """Independent stream for (trajectory, channel); same stream whatever the batching."""
    return np.random.SeedSequence(seed, spawn_key=(trajectory, channel))


def generate_colored_noise(spectrum: Callable[[np.ndarray], np.ndarray], dt: float,
                           n_samples: int, seed: SeedLike) -> np.ndarray:
    """
    Stationary real Gaussian sequence with symmetrized two-sided density
    [S(w) + S(-w)] / 2, by shaping white noise in the frequency domain.

    Args:
        spectrum: S(omega), vectorized over angular frequency
        dt: Sample interval (s)
        n_samples: Sequence length, a power of two
        seed: Integer seed or SeedSequence

    Returns:
        Array of n_samples noise values, each held for dt
    """
    if n_samples < 2 or n_samples & (n_samples - 1):
        raise ConfigurationError(f"n_samples must be a power of two >= 2, got {n_samples}")
    if not dt > 0.0:
        raise ConfigurationError(f"dt must be positive, got {dt}")

    omega = 2.0 * math.pi * np.fft.rfftfreq(n_samples, d=dt)
    shape = 0.5 * (np.asarray(spectrum(omega), dtype=float) + np.asarray(spectrum(-omega), dtype=float))
    shape = np.broadcast_to(shape, omega.shape)
    if not np.all(np.isfinite(shape)):
        raise DomainError("spectrum is not finite on the resolved band")
    if np.any(shape < 0.0):
        raise DomainError(f"spectrum is negative on the resolved band (min {shape.min():.6g})")

    rng = np.random.default_rng(seed)
    white = rng.standard_normal(n_samples)
    return np.fft.irfft(np.fft.rfft(white) * np.sqrt(shape / dt), n=n_samples)


def _next_power_of_two(n: int) -> int:
    return 1 << max(1, (n - 1).bit_length())


def thermal_force_spectrum(params: PhysicalParams, model: RotorModel,
                           mode: NoiseMode) -> Callable[[np.ndarray], np.ndarray]:
    """Spectrum handed to the synthesizer for the thermal force epsilon."""
    if mode == "quantum_colored":
        return partial(symmetrized_noise_spectrum, d_theta=model.d_theta, temperature=params.temperature)
    level = 2.0 * model.d_theta * thermal_frequency(params.temperature)
    return partial(_flat_spectrum, level=level)


def _flat_spectrum(omega: np.ndarray, level: float) -> np.ndarray:
    return np.full(np.shape(omega), level)


# ══════════════════════════════════════════════════════════════════════════════
#  INTEGRATION
# ══════════════════════════════════════════════════════════════════════════════

def _drift(theta: np.ndarray, l_z: np.ndarray, a: np.ndarray, params: PhysicalParams,
           model: RotorModel, include_quartic: bool) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    inertia = model.inertia_i
    photons = a.real ** 2 + a.imag ** 2
    d_theta = l_z / inertia
    d_l = (-inertia * model.omega_theta ** 2 * theta
           - 2.0 * model.xi_theta * photons * theta
           - model.damping_rate * l_z)
    if include_quartic:
        d_l = d_l + 4.0 * quartic_beta(params, photons) * theta ** 3
    d_a = -1j * (-params.delta + model.xi_theta * theta ** 2) * a - params.gamma * a + params.kappa_l
    return d_theta, d_l, d_a


def check_step(params: PhysicalParams, steady: SteadyState, config: SimConfig,
               model: Optional[RotorModel] = None) -> None:
    """Raise ConfigurationError unless dt resolves every rate of the problem."""
    model = model or build_rotor(params)
    omega_eff = math.sqrt(abs(rotor_stiffness(model, steady)) / model.inertia_i)
    fastest = max(params.gamma, abs(params.delta), model.omega_theta, omega_eff, model.damping_rate)
    if config.dt * fastest > MAX_STEP_FRACTION:
        raise ConfigurationError(
            f"dt={config.dt:.6g} s too large: need dt <= {MAX_STEP_FRACTION / fastest:.6g} s"
        )
    if config.t_end / config.dt > MAX_STEPS:
        raise ConfigurationError(f"t_end/dt = {config.t_end / config.dt:.6g} exceeds {MAX_STEPS:g} steps")


def batch_size_for(config: SimConfig) -> int:
    """Trajectories per batch, shrunk so a batch holds at most NOISE_SAMPLE_BUDGET noise samples."""
    per_trajectory = _next_power_of_two(config.n_steps)
    return max(1, min(config.batch_size, NOISE_SAMPLE_BUDGET // per_trajectory))


def _integrate_batch(batch: Tuple[Sequence[int], np.ndarray, np.ndarray, np.ndarray],
                     params: PhysicalParams, model: RotorModel,
                     config: SimConfig) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integrate one batch; returns recorded theta, l_z and a, each (batch, n_records)."""
    indices, theta, l_z, a = batch
    theta, l_z, a = theta.astype(float), l_z.astype(float), a.astype(complex)
    size = len(indices)
    dt = config.dt
    n_steps = config.n_steps
    stride = config.record_stride
    n_records = n_steps // stride + 1

    force: Optional[np.ndarray] = None
    vacuum: Optional[np.ndarray] = None
    if config.noise_mode != "deterministic":
        force = np.empty((size, n_steps))
        n_samples = _next_power_of_two(n_steps)
        spectrum = thermal_force_spectrum(params, model, config.noise_mode)
        for row, index in enumerate(indices):
            force[row] = generate_colored_noise(
                spectrum, dt, n_samples, trajectory_seed(config.seed, index, THERMAL_CHANNEL)
            )[:n_steps]
        if config.include_vacuum_input:
            vacuum = np.empty((size, n_steps), dtype=complex)
            # each input quadrature carries density 1/2, so zeta_re, zeta_im carry 1/4
            sigma = math.sqrt(0.5 * VACUUM_QUADRATURE_DENSITY / dt)
            root = math.sqrt(2.0 * params.gamma)
            for row, index in enumerate(indices):
                re = np.random.default_rng(trajectory_seed(config.seed, index, VACUUM_RE_CHANNEL))
                im = np.random.default_rng(trajectory_seed(config.seed, index, VACUUM_IM_CHANNEL))
                vacuum[row] = root * sigma * (re.standard_normal(n_steps) + 1j * im.standard_normal(n_steps))

    rec_theta = np.empty((size, n_records))
    rec_l = np.empty((size, n_records))
    rec_a = np.empty((size, n_records), dtype=complex)
    rec_theta[:, 0], rec_l[:, 0], rec_a[:, 0] = theta, l_z, a

    half = 0.5 * dt
    for k in range(n_steps):
        eps = 0.0 if force is None else force[:, k]
        zeta = 0.0 if vacuum is None else vacuum[:, k]
        f_theta, f_l, f_a = _drift(theta, l_z, a, params, model, config.include_quartic)
        p_theta = theta + dt * f_theta
        p_l = l_z + dt * (f_l + eps)
        p_a = a + dt * (f_a + zeta)
        g_theta, g_l, g_a = _drift(p_theta, p_l, p_a, params, model, config.include_quartic)
        theta = theta + half * (f_theta + g_theta)
        l_z = l_z + half * (f_l + g_l) + dt * eps
        a = a + half * (f_a + g_a) + dt * zeta

        if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(l_z)) and np.all(np.isfinite(a))):
            raise DivergenceError(f"non-finite state at step {k + 1}", step_index=k + 1)
        if (k + 1) % stride == 0:
            slot = (k + 1) // stride
            rec_theta[:, slot], rec_l[:, slot], rec_a[:, slot] = theta, l_z, a

    logger.debug("batch of %d trajectories finished (first index %d)", size, indices[0])
    return rec_theta, rec_l, rec_a


def integrate_trajectory(params: PhysicalParams, steady_hint: SteadyState, config: SimConfig,
                         initial: Optional[Tuple[object, object, object]] = None,
                         mapper: Callable[[Callable, Iterable], Iterable] = map) -> TrajectoryEnsemble:
    """
    Integrate config.n_trajectories independent trajectories.

    Args:
        params: Physical parameters
        steady_hint: Mean-field steady state; supplies the default start (0, 0, a_s)
        config: Simulation settings
        initial: Optional (theta, l_z, a) start values, each a scalar or one
            value per trajectory
        mapper: map-like callable used to run batches, e.g. a process pool map

    Returns:
        TrajectoryEnsemble with every recorded state
    """
    model = build_rotor(params)
    check_step(params, steady_hint, config, model)
    if not stable_routh_hurwitz(build_drift(params, model, steady_hint)):
        logger.warning("simulating parameters whose linearized dynamics are not stable")
    if config.noise_mode == "classical_white" and params.temperature == 0.0:
        logger.warning("classical_white noise at T = 0 carries no thermal force")

    count = config.n_trajectories
    if initial is None:
        initial = (0.0, 0.0, steady_hint.a_s)
    theta0, l0, a0 = (np.broadcast_to(np.asarray(v), (count,)) for v in initial)

    batches = []
    step = batch_size_for(config)
    for start in range(0, count, step):
        stop = min(start + step, count)
        batches.append((list(range(start, stop)), theta0[start:stop], l0[start:stop], a0[start:stop]))

    logger.info(
        "integrating %d trajectories: %d steps of %.6g s, noise=%s",
        count, config.n_steps, config.dt, config.noise_mode,
    )
    results = list(mapper(partial(_integrate_batch, params=params, model=model, config=config), batches))

    rec_theta = np.concatenate([r[0] for r in results], axis=0)
    rec_l = np.concatenate([r[1] for r in results], axis=0)
    rec_a = np.concatenate([r[2] for r in results], axis=0)
    n_records = rec_theta.shape[1]

    if config.transient is not None:
        transient = config.transient
    elif model.d_theta > 0.0:
        transient = 10.0 * model.inertia_i / model.d_theta
    else:
        transient = 0.0

    return TrajectoryEnsemble(
        t=config.dt * config.record_stride * np.arange(n_records),
        theta=rec_theta,
        l_z=rec_l,
        a_re=rec_a.real.copy(),
        a_im=rec_a.imag.copy(),
        transient_time=transient,
    )


# ══════════════════════════════════════════════════════════════════════════════
#  SPECTRAL ESTIMATION
# ══════════════════════════════════════════════════════════════════════════════

def ensemble_theta_psd(trajectories: TrajectoryEnsemble, segment_len: int,
                       window: WindowName = "cosine-taper") -> ThetaPsd:
    """
    Welch estimate of the theta spectrum averaged over the ensemble, after
    dropping t < transient_time. Segments overlap by 50%.
    """
    if window not in _WINDOWS:
        raise ConfigurationError(f"unknown window {window!r}; choose from {sorted(_WINDOWS)}")
    if segment_len < 2:
        raise ConfigurationError(f"segment length must be >= 2, got {segment_len}")
    interval = trajectories.sample_interval
    if not interval > 0.0:
        raise ConfigurationError("need at least two recorded samples")

    keep = trajectories.t >= trajectories.transient_time
    theta = trajectories.theta[:, keep]
    n_samples = theta.shape[1]
    overlap = segment_len // 2
    n_segments = (n_samples - segment_len) // (segment_len - overlap) + 1 if n_samples >= segment_len else 0
    if n_segments < 2:
        raise ConfigurationError(
            f"{n_samples} samples after the transient give {n_segments} segment(s) of {segment_len}; need 2"
        )

    freqs, density = signal.welch(
        theta,
        fs=1.0 / interval,
        window=_WINDOWS[window],
        nperseg=segment_len,
        noverlap=overlap,
        detrend=False,
        scaling="density",
        axis=-1,
    )
    one_sided = density.mean(axis=0)
    # one-sided density per Hz -> two-sided density per rad/s: interior bins halve
    s_theta = one_sided / 2.0
    s_theta[0] = one_sided[0]
    if segment_len % 2 == 0:
        s_theta[-1] = one_sided[-1]

    logger.info("theta PSD: %d trajectories x %d segments", trajectories.n_trajectories, n_segments)
    return ThetaPsd(
        omega=2.0 * math.pi * freqs,
        s_theta=s_theta,
        n_segments=n_segments,
        n_trajectories=trajectories.n_trajectories,
        segment_len=segment_len,
    )
