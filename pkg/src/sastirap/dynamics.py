"""Schrodinger propagation of the driven three-level system.

Integrates i d/dt (c1, c2, c3) = H(t) (c1, c2, c3) with an optional
non-Hermitian loss -i*Gamma_2/2 on the intermediate state, using an adaptive
high-order Runge-Kutta pair with dense output.  The Hamiltonian is evaluated
analytically at the integrator-chosen times.  A fourth (real) component
accumulates integral(|c2|^2 dt) alongside the state so the loss bookkeeping
identity can be checked to integrator accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp

from . import protocols
from .protocols import DriveParams, ProtocolSpec, DEFAULT_EPS_CUT

MODES = ("stirap", "sa_stirap", "detuning_only")


@dataclass(frozen=True)
class RunConfig:
    """Full description of one simulation."""

    protocol: ProtocolSpec
    drive: DriveParams = field(default_factory=DriveParams)
    mode: str = "stirap"
    # Correction options: lock_tau_T computes the detuning pulse from that
    # delay ratio regardless of the actual pulse delay; area_scale multiplies
    # the 1-3 coupling; phase_offset rotates its phase away from the nominal
    # +i orientation.
    lock_tau_T: float | None = None
    area_scale: float = 1.0
    phase_offset: float = 0.0
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float | None = None
    n_samples: int = 1001
    eps_cut: float = DEFAULT_EPS_CUT
    initial_state: tuple[complex, complex, complex] = (1.0 + 0.0j, 0.0j, 0.0j)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.area_scale < 0:
            raise ValueError("area_scale must be >= 0")
        if abs(self.phase_offset) > math.pi:
            raise ValueError("|phase_offset| must not exceed pi")
        if self.n_samples < 500:
            raise ValueError("n_samples must be >= 500")
        protocols.validate(self.protocol, self.drive)


@dataclass(frozen=True)
class Trajectory:
    """Time series of the three complex amplitudes on the output grid."""

    times: np.ndarray
    amplitudes: np.ndarray  # shape (n, 3) complex
    norm: np.ndarray
    populations: np.ndarray  # shape (n, 3)
    c2_integral: float  # integral(|c2|^2 dt) accumulated by the integrator
    gamma_2: float
    config: RunConfig

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("t,re_c1,im_c1,re_c2,im_c2,re_c3,im_c3,norm,p1,p2,p3\n")
            a = self.amplitudes
            for i, t in enumerate(self.times):
                row = (
                    t,
                    a[i, 0].real,
                    a[i, 0].imag,
                    a[i, 1].real,
                    a[i, 1].imag,
                    a[i, 2].real,
                    a[i, 2].imag,
                    self.norm[i],
                    self.populations[i, 0],
                    self.populations[i, 1],
                    self.populations[i, 2],
                )
                fh.write(",".join("%.17g" % v for v in row) + "\n")


def integration_window(config: RunConfig) -> tuple[float, float]:
    """Window for the run: envelope support, widened to cover the detuning
    pulse when the correction is active (possibly at a locked delay)."""
    spec, params = config.protocol, config.drive
    lo, hi = protocols.support_window(spec, params, config.eps_cut)
    if config.mode == "stirap":
        return (lo, hi)
    lock = params if config.lock_tau_T is None else replace(params, tau_T=config.lock_tau_T)
    clo, chi = protocols.correction_window(spec, lock, config.eps_cut)
    return (min(lo, clo), max(hi, chi))


def _make_rhs(config: RunConfig):
    spec = config.protocol
    params = config.drive
    om = params.omega_peak
    gamma = params.gamma_2
    dkind, dval = params.delta_p
    with_drive = config.mode != "detuning_only"
    with_correction = config.mode != "stirap"
    lock = params if config.lock_tau_T is None else replace(params, tau_T=config.lock_tau_T)
    # 1-3 coupling i*(Omega_d/2) rotated by phase_offset and scaled in area
    zfac = config.area_scale * complex(math.cos(math.pi / 2 + config.phase_offset),
                                       math.sin(math.pi / 2 + config.phase_offset))
    raw = protocols._raw_envelopes
    omega_d = protocols.detuning_closed_form

    def rhs(t, y):
        c1, c2, c3 = y[0], y[1], y[2]
        d1 = 0.0j
        d2 = 0.0j
        d3 = 0.0j
        if with_drive:
            fp, fs, dfp, dfs = raw(spec, params, t)
            op = om * fp
            os_ = om * fs
            o0sq = op * op + os_ * os_
            if dkind == "const":
                dp = dval
            else:
                dp = dval * math.sqrt(o0sq)
            d1 += -0.5j * op * c2
            d2 += -1j * (0.5 * op * c1 + dp * c2 + 0.5 * os_ * c3)
            d3 += -0.5j * os_ * c2
            if with_correction and dkind == "const" and dval != 0.0 and o0sq > 0.0:
                # phi_dot terms of the correction (zero when Delta_p tracks
                # Omega_0 or vanishes)
                o0 = math.sqrt(o0sq)
                do0 = (op * om * dfp + os_ * om * dfs) / o0
                pd = -dval * do0 / (2.0 * (dval * dval + o0sq))
                st = op / o0
                ct = os_ / o0
                d1 += -1j * (1j * pd * st) * c2
                d2 += -1j * ((-1j * pd * st) * c1 + (-1j * pd * ct) * c3)
                d3 += -1j * (1j * pd * ct) * c2
        if with_correction:
            z = 0.5 * omega_d(spec, lock, t) * zfac
            d1 += -1j * z * c3
            d3 += -1j * z.conjugate() * c1
        if gamma:
            d2 += -0.5 * gamma * c2
        return np.array([d1, d2, d3, c2.real * c2.real + c2.imag * c2.imag],
                        dtype=complex)

    return rhs


def _sample_times(config: RunConfig, t_i: float, t_f: float) -> np.ndarray:
    """Output grid: uniform, refined over the dynamically active core.

    Families with slowly decaying tails (sincos_arctan especially) need
    integration windows orders of magnitude wider than the region where the
    mixing angle actually turns; a purely uniform grid there is far too
    coarse for threshold-crossing interpolation, so half the samples are
    concentrated on the core.
    """
    n = config.n_samples
    spec, params = config.protocol, config.drive
    lock = params if config.lock_tau_T is None else replace(params, tau_T=config.lock_tau_T)
    lo, hi = protocols.support_window(spec, params, eps_cut=1e-2)
    if config.mode != "stirap":
        clo, chi = protocols.correction_window(spec, lock, eps_cut=1e-2)
        lo, hi = min(lo, clo), max(hi, chi)
    lo, hi = max(lo, t_i), min(hi, t_f)
    if hi - lo >= 0.5 * (t_f - t_i):
        return np.linspace(t_i, t_f, n)
    coarse = np.linspace(t_i, t_f, n // 2)
    fine = np.linspace(lo, hi, n - n // 2)
    return np.unique(np.concatenate([coarse, fine]))


def propagate(config: RunConfig) -> Trajectory:
    """Integrate the run and sample it on the output grid."""
    t_i, t_f = integration_window(config)
    y0 = np.array(list(config.initial_state) + [0.0], dtype=complex)
    rhs = _make_rhs(config)
    kwargs = {}
    if config.max_step is not None:
        kwargs["max_step"] = config.max_step
    sol = solve_ivp(
        rhs,
        (t_i, t_f),
        y0,
        method="DOP853",
        t_eval=_sample_times(config, t_i, t_f),
        rtol=config.rel_tol,
        atol=config.abs_tol,
        **kwargs,
    )
    if not sol.success:
        raise RuntimeError(f"integration failed: {sol.message}")
    amps = sol.y[:3].T.copy()
    pops = np.abs(amps) ** 2
    return Trajectory(
        times=sol.t,
        amplitudes=amps,
        norm=np.sqrt(pops.sum(axis=1)),
        populations=pops,
        c2_integral=float(sol.y[3, -1].real),
        gamma_2=config.drive.gamma_2,
        config=config,
    )


def dark_state_overlap(trajectory: Trajectory, config: RunConfig):
    """|<a0(t)|psi(t)>|^2 at each sample where the dark state is defined.

    Returns (times, overlap) restricted to samples with nonzero drive.
    """
    spec, params = config.protocol, config.drive
    ts, ov = [], []
    for i, t in enumerate(trajectory.times):
        fp, fs, _, _ = protocols._raw_envelopes(spec, params, t)
        n = math.hypot(fp, fs)
        if n == 0.0:
            continue
        ct, st = fs / n, fp / n
        amp = ct * trajectory.amplitudes[i, 0] - st * trajectory.amplitudes[i, 2]
        ts.append(t)
        ov.append(abs(amp) ** 2)
    return np.array(ts), np.array(ov)


def rescaled(config: RunConfig, scale: float) -> RunConfig:
    """The timescale-invariance twin: T -> s*T with the dimensionless groups
    (omega_T, tau_T, gamma_T) held fixed, i.e. (T, tau, Omega_peak, Gamma_2)
    -> (sT, s*tau, Omega_peak/s, Gamma_2/s)."""
    if scale <= 0:
        raise ValueError("scale must be > 0")
    return replace(config, drive=replace(config.drive, T=config.drive.T * scale))


def timescale_rescale_check(config: RunConfig, scale: float) -> tuple[float, float]:
    """Final-state fidelity of the run and of its rescaled twin."""
    f0 = propagate(config).populations[-1, 2]
    f1 = propagate(rescaled(config, scale)).populations[-1, 2]
    return float(f0), float(f1)
