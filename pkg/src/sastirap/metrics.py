"""Scalar figures of merit for one trajectory.

Fidelity F = |c3(t_f)|^2, integrated loss L = Gamma_2 * integral(|c2|^2),
threshold transfer time T09 (first time p1 drops below 0.99 to first
subsequent time p3 exceeds 0.9), the speed-limit time 2.29/Omega for that
threshold convention, detuning-pulse areas, and the closed-form oscillating
fidelity of the constant-rate sin/cos protocol.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import IntegrationWarning, quad, simpson
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from . import protocols
from .dynamics import RunConfig, Trajectory
from .protocols import DriveParams, ProtocolSpec

# Empirical speed-limit constant for the 99% -> 90% threshold convention,
# alongside its analytic value from the resonant Rabi solution
# p3 = sin^2(Omega t / 2).
QSL_CONSTANT = 2.29
QSL_CONSTANT_EXACT = 2.0 * (math.asin(math.sqrt(0.9)) - math.asin(0.1))


@dataclass(frozen=True)
class MetricsReport:
    fidelity: float
    loss: float
    transfer_time: float | None
    qsl_time: float
    qsl_ratio: float | None
    detuning_area: float
    global_adiabaticity: float

    def to_csv(self, path) -> None:
        fields = (
            self.fidelity,
            self.loss,
            self.transfer_time,
            self.qsl_time,
            self.qsl_ratio,
            self.detuning_area,
            self.global_adiabaticity,
        )
        with open(path, "w", newline="") as fh:
            fh.write(
                "fidelity,loss,transfer_time,qsl_time,qsl_ratio,"
                "detuning_area,global_adiabaticity\n"
            )
            fh.write(",".join("" if v is None else "%.17g" % v for v in fields) + "\n")


def fidelity(trajectory: Trajectory) -> float:
    return float(trajectory.populations[-1, 2])


def loss(trajectory: Trajectory, gamma_2: float | None = None) -> float:
    """Gamma_2 * integral(|c2|^2 dt) by composite quadrature on the dense grid."""
    g = trajectory.gamma_2 if gamma_2 is None else gamma_2
    if g == 0.0:
        return 0.0
    return float(g * simpson(trajectory.populations[:, 1], x=trajectory.times))


def _first_crossing(times, series, level, falling):
    """First time the spline through (times, series) crosses level."""
    spline = CubicSpline(times, series)
    vals = series - level
    if falling:
        hit = np.nonzero((vals[:-1] > 0) & (vals[1:] <= 0))[0]
    else:
        hit = np.nonzero((vals[:-1] < 0) & (vals[1:] >= 0))[0]
    if hit.size == 0:
        return None
    i = hit[0]
    return brentq(lambda t: spline(t) - level, times[i], times[i + 1], xtol=1e-12)


def transfer_time(trajectory: Trajectory) -> float | None:
    """T09 = t(p3 >= 0.9) - t(p1 <= 0.99), first crossings on the dense output."""
    crossings = transfer_crossings(trajectory)
    if crossings is None:
        return None
    return crossings[1] - crossings[0]


def transfer_crossings(trajectory: Trajectory):
    """(t_start, t_end) of the 99% departure / 90% arrival thresholds."""
    t = trajectory.times
    t1 = _first_crossing(t, trajectory.populations[:, 0], 0.99, falling=True)
    if t1 is None:
        return None
    after = t >= t1
    # keep one grid point before t1 so the crossing interval is bracketed
    i0 = max(np.argmax(after) - 1, 0)
    t2 = _first_crossing(t[i0:], trajectory.populations[i0:, 2], 0.9, falling=False)
    if t2 is None or t2 < t1:
        return None
    return t1, t2


def qsl_time(omega: float) -> float:
    """Speed-limit time 2.29/Omega; for time-varying drives pass a
    characteristic value (the peak coupling between the crossing times)."""
    if omega <= 0:
        raise ValueError("omega must be > 0")
    return QSL_CONSTANT / omega


def sa_transfer_estimate(trajectory: Trajectory, config: RunConfig) -> float:
    """Transfer-time estimate pi * (t2 - t1) / integral(Omega_d dt).

    The time-averaged detuning-pulse rate sets the estimate; the integral runs
    over the full pulse (a near-pi area), the interval (t1, t2) between the
    threshold crossings.  For a constant-rate pulse the estimate collapses to
    t2 - t1 exactly.  Honors lock_tau_T and area_scale of the run.
    """
    crossings = transfer_crossings(trajectory)
    if crossings is None:
        raise ValueError("threshold crossings not present in trajectory")
    t1, t2 = crossings
    params = config.drive
    if config.lock_tau_T is not None:
        params = replace(params, tau_T=config.lock_tau_T)
    area = config.area_scale * detuning_area(config.protocol, params)
    return math.pi * (t2 - t1) / area


def chen_muga_fidelity(omega_T: float) -> float:
    """Closed-form final fidelity of the bare constant-rate sin/cos protocol.

    With eps = arccot(omega_T/pi), sqrt(F) = 1 - sin^2(eps) * [1 -
    cos(pi/(2 sin eps))].  The oscillation maxima F = 1 sit where pi/sin(eps)
    is an integer multiple of 2*pi.
    """
    if omega_T <= 0:
        raise ValueError("omega_T must be > 0")
    sin_eps = math.pi / math.hypot(omega_T, math.pi)
    root_f = 1.0 - sin_eps * sin_eps * (1.0 - math.cos(math.pi / (2.0 * sin_eps)))
    return root_f * root_f


def detuning_area(
    spec: ProtocolSpec, params: DriveParams, t_span: tuple[float, float] | None = None
) -> float:
    """integral(Omega_d dt) by adaptive quadrature of the closed form.

    Defaults to the full support of the detuning pulse (infinite for the
    non-compact families; the integrand decays and the quadrature converges).
    """
    protocols.validate(spec, params)
    if t_span is None:
        if spec.family == "sin4":
            t_span = (params.tau, params.T - params.tau)
        elif spec.family == "sincos":
            return math.pi  # constant pi/T over (0, T)
        elif spec.family == "sincos_arctan":
            t_span = (-np.inf, np.inf)
        else:
            # finite window where the mixing angle has converged to within
            # 1e-9 rad of its limits; the truncated tail area is ~2e-9
            t_span = protocols.correction_window(spec, params, eps_cut=1e-9)
    with warnings.catch_warnings():
        # near machine precision the subdivision estimate reports roundoff;
        # the result is still far more accurate than any consumer needs
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(
            lambda t: protocols.detuning_closed_form(spec, params, t),
            t_span[0],
            t_span[1],
            limit=400,
            epsabs=1e-12,
            epsrel=1e-12,
        )
    return float(val)


def _characteristic_omega(trajectory: Trajectory, config: RunConfig, crossings):
    """Peak coupling between the crossings: the detuning-pulse peak when the
    correction is active, else the pump peak Rabi frequency."""
    if crossings is None:
        lo, hi = trajectory.times[0], trajectory.times[-1]
    else:
        lo, hi = crossings
    if config.mode == "stirap":
        return config.drive.omega_peak
    params = config.drive
    if config.lock_tau_T is not None:
        params = replace(params, tau_T=config.lock_tau_T)
    ts = np.linspace(lo, hi, 801)
    vals = [protocols.detuning_closed_form(config.protocol, params, t) for t in ts]
    return max(vals) * config.area_scale


def metrics_report(trajectory: Trajectory, config: RunConfig | None = None) -> MetricsReport:
    cfg = trajectory.config if config is None else config
    crossings = transfer_crossings(trajectory)
    t09 = None if crossings is None else crossings[1] - crossings[0]
    omega_char = _characteristic_omega(trajectory, cfg, crossings)
    tq = qsl_time(omega_char) if omega_char > 0 else float("nan")
    ratio = None if t09 is None or not math.isfinite(tq) else t09 / tq
    if cfg.mode == "stirap":
        area = 0.0
    else:
        params = cfg.drive
        if cfg.lock_tau_T is not None:
            params = replace(params, tau_T=cfg.lock_tau_T)
        area = detuning_area(cfg.protocol, params) * cfg.area_scale
    return MetricsReport(
        fidelity=fidelity(trajectory),
        loss=loss(trajectory),
        transfer_time=t09,
        qsl_time=tq,
        qsl_ratio=ratio,
        detuning_area=area,
        global_adiabaticity=cfg.drive.omega_T * cfg.drive.tau_T,
    )
