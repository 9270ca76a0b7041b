"""Numerical laboratory for three-level STIRAP and superadiabatic STIRAP.

Builds the rotating-wave Hamiltonian of a three-level ladder/lambda system
driven by delayed pump and Stokes pulses, adds the counterdiabatic
(detuning-pulse) correction, propagates the Schrodinger dynamics with
non-Hermitian intermediate-state loss, and evaluates fidelity, loss,
transfer-time and robustness figures of merit over parameter grids.
"""

from .protocols import (
    FAMILIES,
    ProtocolSpec,
    DriveParams,
    PulseSample,
    envelope,
    detuning_closed_form,
    epsilon_deviations,
    support_window,
    correction_window,
)
from .hamiltonian import (
    HamiltonianSample,
    AdiabaticFrame,
    ComplexDrive,
    h0,
    h1,
    adiabatic_frame,
    vanishing_condition_check,
    generalized_detuning,
    adiabaticity_margin,
    two_photon_mapping,
)
from .dynamics import RunConfig, Trajectory, propagate, dark_state_overlap, timescale_rescale_check
from .metrics import (
    MetricsReport,
    QSL_CONSTANT,
    QSL_CONSTANT_EXACT,
    fidelity,
    loss,
    transfer_time,
    qsl_time,
    sa_transfer_estimate,
    chen_muga_fidelity,
    detuning_area,
    metrics_report,
)
from .sweeps import (
    Axis,
    GridSpec,
    SweepTable,
    run_grid,
    robustness_region,
    figure_job,
    optimize_transfer_time,
    phase_halfwidth,
)

__all__ = [
    "FAMILIES",
    "ProtocolSpec",
    "DriveParams",
    "PulseSample",
    "envelope",
    "detuning_closed_form",
    "epsilon_deviations",
    "support_window",
    "correction_window",
    "HamiltonianSample",
    "AdiabaticFrame",
    "ComplexDrive",
    "h0",
    "h1",
    "adiabatic_frame",
    "vanishing_condition_check",
    "generalized_detuning",
    "adiabaticity_margin",
    "two_photon_mapping",
    "RunConfig",
    "Trajectory",
    "propagate",
    "dark_state_overlap",
    "timescale_rescale_check",
    "MetricsReport",
    "QSL_CONSTANT",
    "QSL_CONSTANT_EXACT",
    "fidelity",
    "loss",
    "transfer_time",
    "qsl_time",
    "sa_transfer_estimate",
    "chen_muga_fidelity",
    "detuning_area",
    "metrics_report",
    "Axis",
    "GridSpec",
    "SweepTable",
    "run_grid",
    "robustness_region",
    "figure_job",
    "optimize_transfer_time",
    "phase_halfwidth",
]
