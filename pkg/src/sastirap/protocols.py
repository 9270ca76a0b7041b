"""Catalog of eight pump/Stokes pulse protocols.

Each family provides the two envelopes with hand-derived analytic time
derivatives, a closed-form detuning pulse Omega_d(t) = 2*dtheta/dt, the exact
boundary deviations (eps1, eps2) of the mixing angle theta from 0 and pi/2,
and integration windows.  Envelopes are normalized so that the pump peak
equals Omega_peak = omega_T / T; the detuning pulse is invariant under that
joint rescale because theta depends only on the pump/Stokes ratio.

Conventions: theta(t) = atan(Omega_p/Omega_s) runs from eps1 at early times
to pi/2 - eps2 at late times; the counterintuitive ordering (Stokes before
pump) requires tau > 0 for the delay-bearing families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

FAMILIES = (
    "gaussian",
    "exponential",
    "sin4",
    "sincos_arctan",
    "sincos",
    "carroll_hioe_a",
    "carroll_hioe_b",
    "sech_pair",
)

# Families whose envelopes actually depend on the pump/Stokes delay tau.
# exponential, sincos_arctan, sincos and the carroll_hioe pair are written
# without a delay parameter; they accept tau_T in DriveParams but ignore it.
TAU_BEARING = frozenset({"gaussian", "sin4", "sech_pair"})

DEFAULT_EPS_CUT = 1e-4

# carroll_hioe_b pump envelope sqrt(1 - u) * sech, u = tanh(t/T), peaks at
# u = -1/3 with value 4*sqrt(2)/(3*sqrt(3)); both pulses are rescaled by the
# inverse of this so the pump peak equals Omega_peak.
_CHB_PEAK = 4.0 * math.sqrt(2.0) / (3.0 * math.sqrt(3.0))


class ProtocolError(ValueError):
    """Invalid protocol family or parameter combination."""


@dataclass(frozen=True)
class ProtocolSpec:
    """One catalog pulse family plus its shape parameters."""

    family: str
    alpha: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ProtocolError(f"unknown protocol family {self.family!r}")
        carroll = self.family in ("carroll_hioe_a", "carroll_hioe_b")
        if carroll:
            if self.alpha is None:
                raise ProtocolError(f"{self.family} requires alpha")
            if not 0.0 < self.alpha < 1.0:
                raise ProtocolError(f"alpha must lie in (0, 1), got {self.alpha}")
        elif self.alpha is not None:
            raise ProtocolError(f"alpha is only meaningful for carroll_hioe families")

    @property
    def uses_tau(self) -> bool:
        return self.family in TAU_BEARING


@dataclass(frozen=True)
class DriveParams:
    """Dimensionless drive parameters plus the reference pulse width T."""

    omega_T: float = 1.0
    tau_T: float = 0.5
    gamma_T: float = 0.0
    T: float = 1.0
    # Pump detuning profile: ("const", value) or ("proportional", C) meaning
    # Delta_p(t) = C * Omega_0(t).  Two-photon resonance Delta_3 = 0 is fixed.
    delta_p: tuple[str, float] = ("const", 0.0)

    def __post_init__(self):
        if self.omega_T < 0:
            raise ProtocolError("omega_T must be >= 0")
        if self.gamma_T < 0:
            raise ProtocolError("gamma_T must be >= 0")
        if self.T <= 0:
            raise ProtocolError("T must be > 0")
        if self.delta_p[0] not in ("const", "proportional"):
            raise ProtocolError(f"unknown delta_p profile kind {self.delta_p[0]!r}")

    @property
    def omega_peak(self) -> float:
        return self.omega_T / self.T

    @property
    def tau(self) -> float:
        return self.tau_T * self.T

    @property
    def gamma_2(self) -> float:
        return self.gamma_T / self.T


def validate(spec: ProtocolSpec, params: DriveParams) -> None:
    """Check delay constraints that depend on the family."""
    if spec.uses_tau and params.tau_T <= 0:
        raise ProtocolError(
            f"{spec.family} requires tau_T > 0 (counterintuitive ordering: "
            "Stokes pulse must precede the pump)"
        )
    if spec.family == "sin4" and params.tau_T >= 0.5:
        raise ProtocolError(
            "sin4 requires tau_T < 0.5 so the compact pulse supports overlap"
        )


@dataclass(frozen=True)
class PulseSample:
    """Instantaneous drive values at one time."""

    t: float
    omega_p: float
    omega_s: float
    domega_p: float
    domega_s: float
    omega_0: float
    omega_d: float


def _raw_envelopes(spec, params, t):
    """Unit-peak pump/Stokes envelopes and their derivatives at time t."""
    T = params.T
    tau = params.tau
    fam = spec.family
    if fam == "gaussian":
        xp = (t - tau) / T
        xs = (t + tau) / T
        fp = math.exp(-xp * xp)
        fs = math.exp(-xs * xs)
        return fp, fs, -2.0 * xp * fp / T, -2.0 * xs * fs / T
    if fam == "exponential":
        # written without a delay parameter; the crossing sits at t = 0
        em = math.exp(-t / T)
        ep = math.exp(t / T)
        fp = 1.0 / math.sqrt(1.0 + em)
        fs = 1.0 / math.sqrt(1.0 + ep)
        dfp = 0.5 * em / (T * (1.0 + em) ** 1.5)
        dfs = -0.5 * ep / (T * (1.0 + ep) ** 1.5)
        return fp, fs, dfp, dfs
    if fam == "sin4":
        fp = dfp = fs = dfs = 0.0
        if tau < t < tau + T:
            x = math.pi * (t - tau) / T
            s, c = math.sin(x), math.cos(x)
            fp = s**4
            dfp = 4.0 * s**3 * c * math.pi / T
        if -tau < t < T - tau:
            x = math.pi * (t + tau) / T
            s, c = math.sin(x), math.cos(x)
            fs = s**4
            dfs = 4.0 * s**3 * c * math.pi / T
        return fp, fs, dfp, dfs
    if fam == "sincos_arctan":
        x = 0.5 * math.atan(t / T) + 0.25 * math.pi
        dx = 0.5 * T / (t * t + T * T)
        return math.sin(x), math.cos(x), math.cos(x) * dx, -math.sin(x) * dx
    if fam == "sincos":
        if not 0.0 < t < T:
            # compact support: both pulses vanish outside (0, T)
            if t <= 0.0:
                return 0.0, 1.0 if t == 0.0 else 0.0, 0.0, 0.0
            return (1.0 if t == T else 0.0), 0.0, 0.0, 0.0
        x = 0.5 * math.pi * t / T
        dx = 0.5 * math.pi / T
        return math.sin(x), math.cos(x), math.cos(x) * dx, -math.sin(x) * dx
    if fam == "carroll_hioe_a":
        a = spec.alpha
        u = math.tanh(t / T)
        du = (1.0 - u * u) / T
        fp = 1.0 / math.cosh(t / T)
        dfp = -fp * u / T
        sq = math.sqrt(1.0 - u)
        fs = a * sq
        dfs = -a * du / (2.0 * sq)
        return fp, fs, dfp, dfs
    if fam == "carroll_hioe_b":
        a = spec.alpha
        u = math.tanh(t / T)
        du = (1.0 - u * u) / T
        g = math.sqrt((1.0 - u) ** 2 * (1.0 + u))
        dg = (1.0 - u) * (-1.0 - 3.0 * u) / (2.0 * g) * du
        c = 1.0 / _CHB_PEAK
        return c * g, c * a * (1.0 - u), c * dg, -c * a * du
    if fam == "sech_pair":
        xp = (t - tau) / T
        xs = (t + tau) / T
        fp = 1.0 / math.cosh(xp)
        fs = 1.0 / math.cosh(xs)
        return fp, fs, -fp * math.tanh(xp) / T, -fs * math.tanh(xs) / T
    raise ProtocolError(f"unknown protocol family {fam!r}")


def envelope(spec: ProtocolSpec, params: DriveParams, t: float) -> PulseSample:
    """Pump/Stokes Rabi frequencies, derivatives, Omega_0 and Omega_d at t."""
    validate(spec, params)
    om = params.omega_peak
    fp, fs, dfp, dfs = _raw_envelopes(spec, params, t)
    op, os_, dop, dos = om * fp, om * fs, om * dfp, om * dfs
    o0 = math.hypot(op, os_)
    return PulseSample(
        t=t,
        omega_p=op,
        omega_s=os_,
        domega_p=dop,
        domega_s=dos,
        omega_0=o0,
        omega_d=detuning_closed_form(spec, params, t),
    )


def theta(spec: ProtocolSpec, params: DriveParams, t: float) -> float:
    """Mixing angle atan(Omega_p/Omega_s), scale-free in the envelopes."""
    fp, fs, _, _ = _raw_envelopes(spec, params, t)
    return math.atan2(fp, fs)


def theta_dot(spec: ProtocolSpec, params: DriveParams, t: float) -> float:
    """d(theta)/dt from the analytic envelope derivatives."""
    fp, fs, dfp, dfs = _raw_envelopes(spec, params, t)
    n2 = fp * fp + fs * fs
    if n2 == 0.0:
        raise ProtocolError(f"theta undefined at t={t}: both envelopes vanish")
    return (dfp * fs - fp * dfs) / n2


def detuning_closed_form(spec: ProtocolSpec, params: DriveParams, t: float) -> float:
    """Closed-form detuning pulse Omega_d(t) = 2*dtheta/dt for the family.

    For the compact-support families the closed form applies on the envelope
    overlap; outside it one envelope vanishes, theta is constant and
    Omega_d = 0.
    """
    T = params.T
    tau = params.tau
    fam = spec.family
    if fam == "gaussian":
        x = 4.0 * tau * t / (T * T)
        if abs(x) > 700.0:  # 1/cosh underflows; avoid the exp overflow
            return 0.0
        return 4.0 * tau / (T * T * math.cosh(x))
    if fam == "exponential":
        x = t / (2.0 * T)
        if abs(x) > 700.0:
            return 0.0
        return 1.0 / (2.0 * T * math.cosh(x))
    if fam == "sin4":
        if not tau < t < T - tau:
            return 0.0
        num = (
            math.pi
            / T
            * math.sin(2.0 * math.pi * tau / T)
            * (math.cos(2.0 * math.pi * tau / T) - math.cos(2.0 * math.pi * t / T)) ** 3
        )
        den = (
            math.sin(math.pi * (t - tau) / T) ** 8
            + math.sin(math.pi * (t + tau) / T) ** 8
        )
        return num / den
    if fam == "sincos_arctan":
        return T / (t * t + T * T)
    if fam == "sincos":
        return math.pi / T if 0.0 < t < T else 0.0
    if fam in ("carroll_hioe_a", "carroll_hioe_b"):
        a = spec.alpha
        # exp(2t/T) overflows for very large arguments; use the equivalent
        # form in u = tanh(t/T), which is bounded:
        #   Omega_d = alpha (1-u) sqrt(1+u) / (T (alpha^2 + 1 + u))
        u = math.tanh(t / T)
        return a * (1.0 - u) * math.sqrt(1.0 + u) / (T * (a * a + 1.0 + u))
    if fam == "sech_pair":
        x = 2.0 * t / T
        if abs(x) > 700.0:
            return 0.0
        return (
            2.0
            * math.sinh(2.0 * tau / T)
            / (T * (1.0 + math.cosh(x) * math.cosh(2.0 * tau / T)))
        )
    raise ProtocolError(f"unknown protocol family {fam!r}")


def epsilon_deviations(spec: ProtocolSpec, params: DriveParams) -> tuple[float, float]:
    """Exact angular deviations of theta from (0, pi/2) at the boundaries.

    eps1 = theta(t_i -> -inf), eps2 = pi/2 - theta(t_f -> +inf), both as
    exact angles so that the pulse-area identity
    integral(Omega_d) = pi - 2*(eps1 + eps2) holds identically.
    """
    fam = spec.family
    if fam in ("gaussian", "exponential", "sin4", "sincos_arctan", "sincos"):
        return (0.0, 0.0)
    if fam in ("carroll_hioe_a", "carroll_hioe_b"):
        # tan(theta) -> sqrt(2)/alpha as t -> +inf
        return (0.0, math.atan(spec.alpha / math.sqrt(2.0)))
    if fam == "sech_pair":
        eps = math.atan(math.exp(-2.0 * params.tau_T))
        return (eps, eps)
    raise ProtocolError(f"unknown protocol family {fam!r}")


def support_window(
    spec: ProtocolSpec, params: DriveParams, eps_cut: float = DEFAULT_EPS_CUT
) -> tuple[float, float]:
    """Integration window for the pulse envelopes.

    Compact-support families return their exact windows.  For the others the
    window is the smallest symmetric interval outside which each vanishing
    envelope has fallen below eps_cut * Omega_peak (envelopes that tend to a
    finite value, e.g. the rising exponential pump, cannot satisfy a joint
    cutoff and are excluded from the criterion).
    """
    validate(spec, params)
    if not 0.0 < eps_cut < 1.0:
        raise ProtocolError("eps_cut must lie in (0, 1)")
    T = params.T
    tau = params.tau
    fam = spec.family
    if fam == "sin4":
        return (-tau, T + tau)
    if fam == "sincos":
        return (0.0, T)
    if fam == "gaussian":
        half = tau + T * math.sqrt(math.log(1.0 / eps_cut))
        return (-half, half)
    if fam == "exponential":
        # the Stokes envelope (1+e^{t/T})^{-1/2} reaches eps_cut at
        # t = T ln(1/eps^2 - 1); the pump mirrors it at -t
        half = T * math.log(1.0 / (eps_cut * eps_cut) - 1.0)
        return (-half, half)
    if fam == "sincos_arctan":
        # pump = sin(atan(t/T)/2 + pi/4) = eps_cut at
        # atan(t/T) = 2 asin(eps_cut) - pi/2
        half = T * math.tan(0.5 * math.pi - 2.0 * math.asin(eps_cut))
        return (-half, half)
    if fam in ("carroll_hioe_a", "carroll_hioe_b"):
        # pump tails ~ 2 e^{-|t|/T} (row a) and ~ 2.6 e^{-|t|/T} (row b);
        # the Stokes tail at +inf is alpha*sqrt(2) e^{-t/T} or smaller
        half = T * math.log(3.0 / eps_cut)
        return (-half, half)
    if fam == "sech_pair":
        half = tau + T * math.acosh(1.0 / eps_cut)
        return (-half, half)
    raise ProtocolError(f"unknown protocol family {fam!r}")


def correction_window(
    spec: ProtocolSpec, params: DriveParams, eps_cut: float = DEFAULT_EPS_CUT
) -> tuple[float, float]:
    """Window covering both the envelopes and the detuning-pulse support.

    The mixing angle can keep rotating where the envelopes are already
    negligible (e.g. gaussian pulses at small delay), so runs that apply the
    counterdiabatic coupling integrate over the window where theta has
    converged to its limits within eps_cut radians, merged with the envelope
    window.
    """
    lo, hi = support_window(spec, params, eps_cut)
    T = params.T
    tau = params.tau
    fam = spec.family
    if fam == "gaussian":
        # theta deviates from its limits by ~ exp(-4 tau t / T^2)
        half = T * T * math.log(1.0 / eps_cut) / (4.0 * tau)
        return (min(lo, -half), max(hi, half))
    if fam in ("carroll_hioe_a", "carroll_hioe_b"):
        # tan(theta) ~ sqrt(2) e^{t/T} / alpha at early times
        half = T * math.log(math.sqrt(2.0) / (spec.alpha * eps_cut))
        return (min(lo, -half), max(hi, half))
    # exponential, sincos_arctan: the envelope window already tracks the
    # angle; sech_pair converges faster than its envelopes; compact rows
    # reach their limits exactly
    return (lo, hi)
