import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sastirap import (
    ComplexDrive,
    DriveParams,
    FAMILIES,
    ProtocolSpec,
    adiabatic_frame,
    adiabaticity_margin,
    envelope,
    generalized_detuning,
    h0,
    h1,
    two_photon_mapping,
    vanishing_condition_check,
)
from sastirap.protocols import PulseSample


def sample(op, os_, dop=0.0, dos=0.0, t=0.0):
    return PulseSample(
        t=t,
        omega_p=op,
        omega_s=os_,
        domega_p=dop,
        domega_s=dos,
        omega_0=math.hypot(op, os_),
        omega_d=0.0,
    )


# --- bare Hamiltonian --------------------------------------------------------

def test_h0_direct_substitution():
    m = h0(sample(2.0, 4.0), delta_p=1.0).matrix
    expected = 0.5 * np.array([[0, 2, 0], [2, 2, 4], [0, 4, 0]], dtype=complex)
    assert np.allclose(m, expected, atol=0)


def test_h0_zero_drive_is_diagonal():
    m = h0(sample(0.0, 0.0), delta_p=0.7, delta_3=0.2).matrix
    assert np.allclose(m, np.diag([0.0, 0.7, 0.2]).astype(complex))


@given(
    op=st.floats(0, 10),
    os_=st.floats(0, 10),
    dp=st.floats(-5, 5),
    d3=st.floats(-5, 5),
)
@settings(max_examples=50, deadline=None)
def test_h0_hermitian(op, os_, dp, d3):
    m = h0(sample(op, os_), delta_p=dp, delta_3=d3).matrix
    assert np.allclose(m, m.conj().T, atol=0)
    assert m[0, 2] == 0 and m[2, 0] == 0


# --- adiabatic frame ---------------------------------------------------------

def test_frame_symmetric_resonant_point():
    f = adiabatic_frame(sample(1.0, 1.0), delta_p=0.0)
    assert f.theta == pytest.approx(math.pi / 4)
    assert f.phi == pytest.approx(math.pi / 4)
    o0 = math.sqrt(2.0)
    assert f.eigenvalues[1] == pytest.approx(-o0 / 2)
    assert f.eigenvalues[2] == pytest.approx(o0 / 2)


def test_frame_dark_state_at_theta_zero():
    f = adiabatic_frame(sample(0.0, 1.0))
    assert f.theta == 0.0
    assert np.allclose(f.eigenvectors[:, 0], [1.0, 0.0, 0.0])


def test_frame_requires_drive():
    with pytest.raises(ValueError):
        adiabatic_frame(sample(0.0, 0.0))


def test_eigensystem_against_dense_solver():
    # 100 random samples, resonant and detuned, against numpy's Hermitian
    # eigensolver: eigenvalues to 1e-10, eigenvectors up to sign
    rng = np.random.default_rng(42)
    for k in range(100):
        op, os_ = rng.uniform(0.05, 10, size=2)
        dp = 0.0 if k % 2 == 0 else rng.uniform(-5, 5)
        s = sample(op, os_)
        f = adiabatic_frame(s, delta_p=dp)
        m = h0(s, delta_p=dp).matrix
        w, v = np.linalg.eigh(m.real)
        analytic = np.sort(f.eigenvalues)
        assert np.max(np.abs(np.sort(w) - analytic)) < 1e-10
        for i in range(3):
            col = f.eigenvectors[:, i]
            lam = f.eigenvalues[i]
            j = int(np.argmin(np.abs(w - lam)))
            assert abs(abs(np.dot(col, v[:, j])) - 1.0) < 1e-10
        # orthonormality and the dark-state residual H |a0> = 0
        g = f.eigenvectors.T @ f.eigenvectors
        assert np.max(np.abs(g - np.eye(3))) < 1e-12
        assert np.max(np.abs(m.real @ f.eigenvectors[:, 0])) < 1e-12
        assert f.eigenvectors[1, 0] == 0.0


def test_theta_dot_and_phi_dot_values():
    # gaussian protocol at t=0: theta_dot = Omega_d/2 = 1; resonant drive
    # keeps phi frozen
    spec = ProtocolSpec("gaussian")
    p = DriveParams(omega_T=1.0, tau_T=0.5)
    s = envelope(spec, p, 0.0)
    f = adiabatic_frame(s, delta_p=0.0)
    assert f.theta_dot == pytest.approx(1.0, rel=1e-12)
    assert f.phi_dot == 0.0


# --- counterdiabatic correction ----------------------------------------------

def test_h1_resonant_case():
    s = sample(1.0, 1.0, dop=1.0, dos=-1.0)  # theta_dot = 1 at theta = pi/4
    f = adiabatic_frame(s, delta_p=0.0)
    m = h1(f).matrix
    expected = np.array([[0, 0, 1j], [0, 0, 0], [-1j, 0, 0]])
    assert np.allclose(m, expected, atol=1e-14)


def test_h1_static_frame_vanishes():
    f = adiabatic_frame(sample(1.0, 2.0))
    assert np.allclose(h1(f).matrix, 0.0)


def test_h1_gaussian_element():
    spec = ProtocolSpec("gaussian")
    p = DriveParams(omega_T=1.0, tau_T=0.5)
    f = adiabatic_frame(envelope(spec, p, 0.0))
    assert h1(f).matrix[0, 2] == pytest.approx(1j * 1.0, abs=1e-12)


def test_h1_hermitian_imaginary_antisymmetric():
    rng = np.random.default_rng(3)
    for _ in range(20):
        op, os_, dop, dos = rng.uniform(-2, 2, size=4)
        s = sample(abs(op) + 0.1, abs(os_) + 0.1, dop, dos)
        f = adiabatic_frame(s, delta_p=rng.uniform(-1, 1), ddelta_p=rng.uniform(-1, 1))
        m = h1(f).matrix
        assert np.allclose(m, m.conj().T, atol=1e-14)
        assert np.max(np.abs(m.real)) == 0.0
        assert np.allclose(m.imag, -m.imag.T, atol=0)


# --- vanishing condition -----------------------------------------------------

def test_vanishing_condition():
    t = np.linspace(-3, 3, 200)
    o0 = np.exp(-(t**2)) + 0.1
    assert vanishing_condition_check(np.zeros_like(o0), o0)
    assert vanishing_condition_check(0.3 * o0, o0)
    assert not vanishing_condition_check(np.full_like(o0, 0.5), o0)


def test_proportional_detuning_kills_offdiagonal_correction():
    spec = ProtocolSpec("gaussian")
    p = DriveParams(omega_T=2.0, tau_T=0.5)
    for t in np.linspace(-2, 2, 21):
        s = envelope(spec, p, float(t))
        c = 0.3
        do0 = (s.omega_p * s.domega_p + s.omega_s * s.domega_s) / s.omega_0
        f = adiabatic_frame(s, delta_p=c * s.omega_0, ddelta_p=c * do0)
        m = h1(f).matrix
        assert abs(m[0, 1]) < 1e-10 and abs(m[1, 2]) < 1e-10


# --- generalized complex-drive detuning --------------------------------------

def test_generalized_detuning_reduces_to_theta_dot():
    spec = ProtocolSpec("gaussian")
    p = DriveParams(omega_T=1.0, tau_T=0.5)
    s = envelope(spec, p, 0.3)
    d = ComplexDrive(s.omega_p, s.omega_s, s.domega_p, s.domega_s, "ladder")
    val = generalized_detuning(d)
    f = adiabatic_frame(s)
    assert val.imag == 0.0
    assert val.real == pytest.approx(f.theta_dot, rel=1e-12)


def test_generalized_detuning_equal_phase_rates():
    # ladder with phi_p = phi_s = w*t: the bracketed imaginary part cancels
    # and Omega_d/2 = theta_dot * exp(i*(phi_p + phi_s))
    spec = ProtocolSpec("gaussian")
    p = DriveParams(omega_T=1.0, tau_T=0.5)
    w, t = 0.8, 0.4
    s = envelope(spec, p, t)
    ph = cmath.exp(1j * w * t)
    d = ComplexDrive(
        s.omega_p * ph,
        s.omega_s * ph,
        (s.domega_p + 1j * w * s.omega_p) * ph,
        (s.domega_s + 1j * w * s.omega_s) * ph,
        "ladder",
    )
    f = adiabatic_frame(s)
    expected = f.theta_dot * cmath.exp(2j * w * t)
    assert generalized_detuning(d) == pytest.approx(expected, rel=1e-12)


def test_generalized_detuning_lambda_opposite_phase_rates():
    # lambda geometry cancels the phase term when phi_s = -phi_p
    spec = ProtocolSpec("gaussian")
    p = DriveParams(omega_T=1.0, tau_T=0.5)
    w, t = 0.8, 0.4
    s = envelope(spec, p, t)
    php = cmath.exp(1j * w * t)
    phs = cmath.exp(-1j * w * t)
    d = ComplexDrive(
        s.omega_p * php,
        s.omega_s * phs,
        (s.domega_p + 1j * w * s.omega_p) * php,
        (s.domega_s - 1j * w * s.omega_s) * phs,
        "lambda",
    )
    f = adiabatic_frame(s)
    val = generalized_detuning(d)
    assert abs(val) == pytest.approx(abs(f.theta_dot), rel=1e-12)


def test_detuning_zero_iff_proportional_drives():
    # proportional pump/Stokes give an identically zero detuning pulse;
    # every catalog protocol is non-proportional somewhere
    d = ComplexDrive(0.6, 1.2, 0.25, 0.5, "ladder")
    assert generalized_detuning(d) == 0.0
    for family in FAMILIES:
        spec = ProtocolSpec(family, 0.1 if family.startswith("carroll") else None)
        p = DriveParams(tau_T=0.3 if family == "sin4" else 0.5)
        s = envelope(spec, p, 0.5)
        d = ComplexDrive(s.omega_p, s.omega_s, s.domega_p, s.domega_s, "ladder")
        assert abs(generalized_detuning(d)) > 0.0, family


def test_generalized_detuning_zero_drive_error():
    with pytest.raises(ValueError):
        generalized_detuning(ComplexDrive(0.0, 0.0, 1.0, 1.0))


# --- diagnostics and the two-photon mapping ----------------------------------

def test_adiabaticity_resonant():
    s = sample(1.0, 1.0, dop=1.0, dos=-1.0)
    f = adiabatic_frame(s)
    local, glob = adiabaticity_margin(f, omega_peak=20.0, tau=0.5)
    assert local == pytest.approx(2.0 * abs(f.theta_dot) / s.omega_0)
    assert glob == 10.0


def test_adiabaticity_sincos_constant():
    spec = ProtocolSpec("sincos")
    p = DriveParams(omega_T=4.0)
    vals = []
    for t in (0.2, 0.5, 0.8):
        f = adiabatic_frame(envelope(spec, p, t))
        local, _ = adiabaticity_margin(f)
        vals.append(local)
    assert all(v == pytest.approx((math.pi / 1.0) / 4.0, rel=1e-12) for v in vals)


def test_two_photon_mapping():
    w1, w2 = two_photon_mapping(2.0, 1.0)
    assert w1 == w2 == pytest.approx(2.0)
    assert w1 * w2 / (4.0 * 1.0) == pytest.approx(2.0 / 2.0)
    assert two_photon_mapping(0.0, 5.0) == (0.0, 0.0)
    w1, _ = two_photon_mapping(math.pi, 50.0)
    assert w1 == pytest.approx(math.sqrt(100.0 * math.pi))
    with pytest.raises(ValueError):
        two_photon_mapping(-1.0, 1.0)
    with pytest.raises(ValueError):
        two_photon_mapping(1.0, 0.0)
