"""Three-level rotating-wave Hamiltonians and the adiabatic eigenframe.

hbar = 1 throughout; all energies are angular frequencies.  Basis order is
(|1>, |2>, |3>).  The bare Hamiltonian couples 1-2 with the pump and 2-3 with
the Stokes pulse; the counterdiabatic correction adds a direct imaginary 1-3
coupling i*Omega_d/2 plus detuning-dependent 1-2/2-3 terms that vanish when
the pump detuning is proportional to the effective Rabi frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .protocols import PulseSample


@dataclass(frozen=True)
class HamiltonianSample:
    matrix: np.ndarray  # 3x3 complex
    t: float


@dataclass(frozen=True)
class AdiabaticFrame:
    theta: float
    phi: float
    theta_dot: float
    phi_dot: float
    eigenvalues: tuple[float, float, float]  # (lambda_0, lambda_-, lambda_+)
    eigenvectors: np.ndarray  # columns (a0, a-, a+)


@dataclass(frozen=True)
class ComplexDrive:
    """Complex pump/Stokes Rabi frequencies with analytic derivatives."""

    omega_p: complex
    omega_s: complex
    domega_p: complex
    domega_s: complex
    geometry: str = "ladder"  # or "lambda"

    def __post_init__(self):
        if self.geometry not in ("ladder", "lambda"):
            raise ValueError(f"unknown geometry {self.geometry!r}")


def h0(sample: PulseSample, delta_p: float, delta_3: float = 0.0) -> HamiltonianSample:
    """Bare rotating-wave Hamiltonian (hbar/2) * [[0, Wp, 0], [Wp, 2Dp, Ws], [0, Ws, 2D3]]."""
    m = 0.5 * np.array(
        [
            [0.0, sample.omega_p, 0.0],
            [sample.omega_p, 2.0 * delta_p, sample.omega_s],
            [0.0, sample.omega_s, 2.0 * delta_3],
        ],
        dtype=complex,
    )
    return HamiltonianSample(matrix=m, t=sample.t)


def adiabatic_frame(
    sample: PulseSample, delta_p: float = 0.0, ddelta_p: float = 0.0
) -> AdiabaticFrame:
    """Mixing angles, their rates, eigenvalues and eigenvectors at one time.

    theta = atan(Omega_p/Omega_s); phi = atan(Omega_0 / (Delta_p +
    sqrt(Delta_p^2 + Omega_0^2))).  phi_dot is evaluated analytically from
    (Delta_p, dDelta_p/dt, Omega_0, dOmega_0/dt) rather than by differencing
    phi.
    """
    o0 = sample.omega_0
    if o0 == 0.0:
        raise ValueError("adiabatic frame undefined where both pulses vanish")
    th = math.atan2(sample.omega_p, sample.omega_s)
    root = math.hypot(delta_p, o0)
    ph = math.atan2(o0, delta_p + root)
    th_dot = (sample.domega_p * sample.omega_s - sample.omega_p * sample.domega_s) / (
        o0 * o0
    )
    do0 = (sample.omega_p * sample.domega_p + sample.omega_s * sample.domega_s) / o0
    ph_dot = (ddelta_p * o0 - delta_p * do0) / (2.0 * (delta_p * delta_p + o0 * o0))
    lam_minus = -0.5 * o0 * math.tan(ph)
    lam_plus = 0.5 * o0 / math.tan(ph)
    st, ct = math.sin(th), math.cos(th)
    sp, cp = math.sin(ph), math.cos(ph)
    vecs = np.array(
        [
            [ct, st * cp, st * sp],
            [0.0, -sp, cp],
            [-st, ct * cp, ct * sp],
        ]
    )
    return AdiabaticFrame(
        theta=th,
        phi=ph,
        theta_dot=th_dot,
        phi_dot=ph_dot,
        eigenvalues=(0.0, lam_minus, lam_plus),
        eigenvectors=vecs,
    )


def h1(frame: AdiabaticFrame, t: float = 0.0) -> HamiltonianSample:
    """Counterdiabatic correction for the adiabatic frame.

    [[0, i*phi_dot*sin(theta), i*theta_dot],
     [-i*phi_dot*sin(theta), 0, -i*phi_dot*cos(theta)],
     [-i*theta_dot, i*phi_dot*cos(theta), 0]]
    The (1,3) entry equals i*Omega_d/2 with Omega_d = 2*theta_dot.
    """
    td = frame.theta_dot
    pd = frame.phi_dot
    st, ct = math.sin(frame.theta), math.cos(frame.theta)
    m = np.array(
        [
            [0.0, 1j * pd * st, 1j * td],
            [-1j * pd * st, 0.0, -1j * pd * ct],
            [-1j * td, 1j * pd * ct, 0.0],
        ],
        dtype=complex,
    )
    return HamiltonianSample(matrix=m, t=t)


def vanishing_condition_check(
    delta_p_profile: np.ndarray, omega_0_profile: np.ndarray, rel_tol: float = 1e-8
) -> bool:
    """True iff Delta_p(t) = C * Omega_0(t) for a single constant C.

    When it holds, phi is constant and the 1-2 and 2-3 entries of the
    correction vanish identically.
    """
    dp = np.asarray(delta_p_profile, dtype=float)
    o0 = np.asarray(omega_0_profile, dtype=float)
    if dp.shape != o0.shape:
        raise ValueError("profiles must share a grid")
    mask = o0 != 0.0
    if np.any(dp[~mask] != 0.0):
        return False
    if not np.any(mask):
        return True
    c = dp[mask] / o0[mask]
    scale = max(np.max(np.abs(c)), 1e-300)
    return bool(np.max(np.abs(c - c[0])) <= rel_tol * scale)


def generalized_detuning(drive: ComplexDrive) -> complex:
    """Half the complex detuning pulse for complex pump/Stokes drives.

    Assumes resonant pump (Delta_p = 0).  For the ladder geometry
    Omega_d/2 = (dWp*Ws - Wp*dWs) / (|Wp|^2 + |Ws|^2); the lambda geometry
    conjugates the Stokes factors.  With real drives this reduces to
    theta_dot.  Returns Omega_d/2.
    """
    n2 = abs(drive.omega_p) ** 2 + abs(drive.omega_s) ** 2
    if n2 == 0.0:
        raise ValueError("detuning pulse undefined for zero drive")
    if drive.geometry == "ladder":
        num = drive.domega_p * drive.omega_s - drive.omega_p * drive.domega_s
    else:
        num = drive.domega_p * np.conj(drive.omega_s) - drive.omega_p * np.conj(
            drive.domega_s
        )
    return num / n2


def adiabaticity_margin(frame: AdiabaticFrame, delta_p: float = 0.0,
                        omega_peak: float | None = None, tau: float | None = None):
    """Local and global adiabaticity measures.

    local_ratio = |theta_dot| / min(|lambda_-|, |lambda_+|) with the
    eigenvalue gaps written as (1/2)|Delta_p -+ sqrt(Delta_p^2 + Omega_0^2)|;
    adiabatic following requires local_ratio << 1.  global = Omega_peak * tau
    when both are supplied, else NaN.
    """
    o0 = 0.5 * (abs(frame.eigenvalues[1]) + abs(frame.eigenvalues[2]))
    gap = min(abs(frame.eigenvalues[1]), abs(frame.eigenvalues[2]))
    if gap == 0.0 and delta_p == 0.0 and o0 == 0.0:
        raise ZeroDivisionError("adiabaticity undefined at zero gap")
    local = abs(frame.theta_dot) / gap
    glob = float("nan")
    if omega_peak is not None and tau is not None:
        glob = omega_peak * tau
    return local, glob


def two_photon_mapping(omega_d: float, delta_1: float) -> tuple[float, float]:
    """Two-photon realization of the 1-3 coupling via a far-detuned level.

    Returns equal Rabi frequencies W1 = W2 = sqrt(2 * Delta_1 * Omega_d) so
    that W1*W2/(4*Delta_1) = Omega_d/2 exactly.
    """
    if omega_d < 0 or delta_1 <= 0:
        raise ValueError("omega_d must be >= 0 and delta_1 > 0")
    w = math.sqrt(2.0 * delta_1 * omega_d)
    return (w, w)
