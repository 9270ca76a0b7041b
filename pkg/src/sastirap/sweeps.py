"""Parameter-grid execution engine and named figure-reproduction jobs.

Grid points are independent simulations; the engine evaluates them serially
or on a process pool and assembles a deterministic table whose CSV bytes do
not depend on the worker count.  Failed points carry an ERROR token and do
not abort the sweep.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from . import metrics as _metrics
from .dynamics import RunConfig, propagate
from .protocols import DriveParams, ProtocolSpec

# Axis names map either onto the drive parameters or onto correction options.
_DRIVE_AXES = ("omega_T", "tau_T", "gamma_T")
_CONFIG_AXES = ("area_scale", "phase_offset", "lock_tau_T")
AXIS_NAMES = _DRIVE_AXES + _CONFIG_AXES

METRIC_FIELDS = (
    "fidelity",
    "loss",
    "transfer_time",
    "qsl_time",
    "qsl_ratio",
    "detuning_area",
    "global_adiabaticity",
)

ERROR_TOKEN = "ERROR"


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    n: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"unknown axis parameter {self.name!r}")
        if self.n < 1:
            raise ValueError("axes need at least 1 point")
        if self.spacing not in ("linear", "log"):
            raise ValueError(f"unknown spacing {self.spacing!r}")
        if self.spacing == "log" and (self.lo <= 0 or self.hi <= 0):
            raise ValueError("log spacing requires positive bounds")

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.n)
        return np.linspace(self.lo, self.hi, self.n)


@dataclass(frozen=True)
class GridSpec:
    axes: tuple[Axis, ...]
    base: RunConfig
    metrics: tuple[str, ...] = ("fidelity", "loss")

    def __post_init__(self):
        for m in self.metrics:
            if m not in METRIC_FIELDS:
                raise ValueError(f"unknown metric {m!r}")
        if not self.axes:
            raise ValueError("at least one axis required")


@dataclass(frozen=True)
class SweepTable:
    axes: tuple[Axis, ...]
    metrics: tuple[str, ...]
    params: np.ndarray  # (n_rows, n_axes) parameter values, lexicographic
    rows: tuple  # per row: tuple of floats, or None for a failed point
    nominal: dict  # axis name -> value of the base config

    def shape(self) -> tuple[int, ...]:
        return tuple(ax.n for ax in self.axes)

    def metric_grid(self, name: str) -> np.ndarray:
        """One metric reshaped to the grid; failed points become NaN."""
        j = self.metrics.index(name)
        flat = np.array(
            [np.nan if r is None or r[j] is None else r[j] for r in self.rows]
        )
        return flat.reshape(self.shape())

    def axis_values(self, name: str) -> np.ndarray:
        for ax in self.axes:
            if ax.name == name:
                return ax.values()
        raise KeyError(name)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(",".join([ax.name for ax in self.axes] + list(self.metrics)) + "\n")
            for p, r in zip(self.params, self.rows):
                cells = ["%.17g" % v for v in p]
                if r is None:
                    cells += [ERROR_TOKEN] * len(self.metrics)
                else:
                    cells += ["" if v is None else "%.17g" % v for v in r]
                fh.write(",".join(cells) + "\n")


def apply_point(base: RunConfig, names, values) -> RunConfig:
    drive_updates = {}
    config_updates = {}
    for name, value in zip(names, values):
        if name in _DRIVE_AXES:
            drive_updates[name] = float(value)
        else:
            config_updates[name] = float(value)
    cfg = base
    if drive_updates:
        cfg = replace(cfg, drive=replace(cfg.drive, **drive_updates))
    if config_updates:
        cfg = replace(cfg, **config_updates)
    return cfg


def _eval_point(task):
    base, names, values, wanted = task
    try:
        cfg = apply_point(base, names, values)
        report = _metrics.metrics_report(propagate(cfg))
        return tuple(getattr(report, m) for m in wanted)
    except Exception:
        return None


def run_grid(spec: GridSpec, workers: int = 1) -> SweepTable:
    names = [ax.name for ax in spec.axes]
    grids = [ax.values() for ax in spec.axes]
    points = list(itertools.product(*grids))
    tasks = [(spec.base, names, p, spec.metrics) for p in points]
    if workers > 1:
        chunk = max(1, len(tasks) // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_eval_point, tasks, chunksize=chunk))
    else:
        rows = [_eval_point(t) for t in tasks]
    nominal = {}
    for name in names:
        if name in _DRIVE_AXES:
            nominal[name] = getattr(spec.base.drive, name)
        else:
            v = getattr(spec.base, name)
            nominal[name] = float("nan") if v is None else v
    return SweepTable(
        axes=spec.axes,
        metrics=spec.metrics,
        params=np.array(points),
        rows=tuple(rows),
        nominal=nominal,
    )


class EmptyRegionError(ValueError):
    pass


def robustness_region(table: SweepTable, threshold: float) -> dict:
    """Extent of the connected above-threshold fidelity region.

    Finds the 4-connected component of grid cells with F > threshold that
    contains the nominal parameter point, and reports per-axis extents plus
    the derived quantities the robustness studies quote: the maximal
    fractional delay excursion delta_tau/tau and the lower edge of the
    omega_T range.
    """
    fgrid = table.metric_grid("fidelity")
    if threshold <= 0:
        # fidelity is non-negative, so a non-positive threshold admits the
        # whole grid (failed points excluded)
        mask = np.isfinite(fgrid)
    else:
        mask = fgrid > threshold
    if not mask.any():
        raise EmptyRegionError("no grid point exceeds the fidelity threshold")
    # seed: grid cell nearest to the nominal values
    idx = []
    for ax in table.axes:
        nom = table.nominal[ax.name]
        vals = ax.values()
        idx.append(int(np.argmin(np.abs(vals - nom))))
    seed = tuple(idx)
    if not mask[seed]:
        raise EmptyRegionError("nominal point lies below the fidelity threshold")
    component = np.zeros_like(mask, dtype=bool)
    stack = [seed]
    component[seed] = True
    shape = mask.shape
    while stack:
        cell = stack.pop()
        for d in range(len(shape)):
            for step in (-1, 1):
                nb = list(cell)
                nb[d] += step
                if 0 <= nb[d] < shape[d]:
                    nb = tuple(nb)
                    if mask[nb] and not component[nb]:
                        component[nb] = True
                        stack.append(nb)
    out = {"cells": int(component.sum())}
    where = np.nonzero(component)
    for d, ax in enumerate(table.axes):
        vals = ax.values()[where[d]]
        out[ax.name] = (float(vals.min()), float(vals.max()))
        if ax.name == "tau_T":
            tau_nom = table.nominal["tau_T"]
            out["delta_tau_over_tau"] = float(
                np.max(np.abs(vals - tau_nom)) / tau_nom
            )
        if ax.name == "omega_T":
            out["omega_T_lower_edge"] = float(vals.min())
    return out


@dataclass(frozen=True)
class FigureJob:
    name: str
    kind: str  # "series", "trajectories" or "grid"
    grid: GridSpec | None = None
    runs: tuple[RunConfig, ...] = ()


FIGURE_NAMES = ("fig1", "fig3a", "fig3b", "fig4", "fig5a", "fig5b", "fig5d", "fig6", "fig7")

# Frozen grid for the loss / robustness maps; overridable via config files.
MAP_TAU = Axis("tau_T", 0.1, 1.5, 60, "linear")
MAP_OMEGA = Axis("omega_T", 0.5, 20.0, 60, "linear")


def figure_job(name: str) -> FigureJob:
    """Pre-registered configuration reproducing one figure's data."""
    if name not in FIGURE_NAMES:
        raise ValueError(f"unknown figure job {name!r}")
    exp = ProtocolSpec("exponential")
    gauss = ProtocolSpec("gaussian")
    if name == "fig1":
        # pulse and detuning-pulse time series for the exponential protocol
        return FigureJob(
            name,
            "series",
            runs=(RunConfig(exp, DriveParams(omega_T=1.0, tau_T=1.0)),),
        )
    if name in ("fig3a", "fig3b"):
        mode = "stirap" if name == "fig3a" else "sa_stirap"
        return FigureJob(
            name,
            "trajectories",
            runs=(RunConfig(exp, DriveParams(omega_T=1.0, tau_T=1.0), mode=mode),),
        )
    if name in ("fig4", "fig5a"):
        base = RunConfig(gauss, DriveParams(gamma_T=10.0), mode="stirap", rel_tol=1e-9)
        return FigureJob(
            name,
            "grid",
            grid=GridSpec((MAP_TAU, MAP_OMEGA), base, ("fidelity", "loss")),
        )
    if name in ("fig5b", "fig5d"):
        base = RunConfig(
            gauss,
            DriveParams(gamma_T=10.0),
            mode="sa_stirap",
            lock_tau_T=0.5,
            rel_tol=1e-9,
        )
        return FigureJob(
            name,
            "grid",
            grid=GridSpec((MAP_TAU, MAP_OMEGA), base, ("fidelity", "loss")),
        )
    if name == "fig6":
        base = RunConfig(
            gauss, DriveParams(tau_T=0.5, gamma_T=1.0), mode="sa_stirap", rel_tol=1e-9
        )
        return FigureJob(
            name,
            "grid",
            grid=GridSpec(
                (
                    Axis("area_scale", 0.5, 1.5, 60, "linear"),
                    Axis("omega_T", 0.1, 10.0, 60, "linear"),
                ),
                base,
                ("fidelity", "loss"),
            ),
        )
    # fig7: transfer-time-versus-coupling table, assembled by fig7_table
    return FigureJob(name, "series")


FIG7_OMEGAS = (1.0, 2.0, 5.0, 10.0, 20.0)


def fig7_table() -> list[tuple]:
    """Transfer times vs characteristic coupling for several drivers.

    Rows: (series, omega_char, transfer_time, qsl_time, ratio).  The
    characteristic coupling is the pump peak for optimized bare STIRAP and
    the detuning-pulse peak for the corrected runs; the bare speed-limit line
    is included for reference.
    """
    rows = []
    for om in FIG7_OMEGAS:
        rows.append(("qsl_line", om, _metrics.qsl_time(om), _metrics.qsl_time(om), 1.0))
    for om in FIG7_OMEGAS:
        best_T, best_tau, t09 = optimize_transfer_time(om, ProtocolSpec("gaussian"))
        rows.append(
            ("stirap_gaussian_optimized", om, t09, _metrics.qsl_time(om), t09 / _metrics.qsl_time(om))
        )
    series = (
        ("sa_gaussian", ProtocolSpec("gaussian"), 0.5),
        ("sa_exponential", ProtocolSpec("exponential"), 0.5),
        ("sa_sincos", ProtocolSpec("sincos"), 0.5),
    )
    for label, spec, tau_T in series:
        for om in FIG7_OMEGAS:
            cfg = RunConfig(spec, DriveParams(omega_T=om, tau_T=tau_T), mode="sa_stirap")
            rep = _metrics.metrics_report(propagate(cfg))
            rows.append((label, _metrics.QSL_CONSTANT / rep.qsl_time, rep.transfer_time, rep.qsl_time, rep.qsl_ratio))
    return rows


def optimize_transfer_time(omega_peak: float, protocol: ProtocolSpec):
    """Coarse-to-fine grid search minimizing the bare-STIRAP transfer time.

    12x12 coarse grid over (T, tau_T), then two 6x6 refinements around the
    incumbent; lossless STIRAP mode.  Returns (T, tau_T, T09).
    """
    if omega_peak <= 0:
        raise ValueError("omega_peak must be > 0")
    tau_hi = 0.45 if protocol.family == "sin4" else 1.4

    def objective(T, tau_T):
        try:
            cfg = RunConfig(
                protocol,
                DriveParams(omega_T=omega_peak * T, tau_T=tau_T, T=T),
                mode="stirap",
                rel_tol=1e-9,
            )
            t09 = _metrics.transfer_time(propagate(cfg))
        except Exception:
            return math.inf
        return math.inf if t09 is None else t09

    T_grid = np.geomspace(0.5 / omega_peak, 60.0 / omega_peak, 12)
    tau_grid = np.linspace(0.05, tau_hi, 12)
    best = (math.inf, None, None)
    for T in T_grid:
        for tau_T in tau_grid:
            v = objective(T, tau_T)
            if v < best[0]:
                best = (v, T, tau_T)
    if best[1] is None:
        raise ValueError("no feasible point: thresholds never crossed")
    for _ in range(2):
        v0, T0, tau0 = best
        T_grid = np.geomspace(T0 / 1.6, T0 * 1.6, 6)
        lo = max(0.02, tau0 * 0.6)
        hi = min(tau_hi, tau0 * 1.6)
        tau_grid = np.linspace(lo, hi, 6)
        for T in T_grid:
            for tau_T in tau_grid:
                v = objective(T, tau_T)
                if v < best[0]:
                    best = (v, T, tau_T)
    return best[1], best[2], best[0]


def phase_halfwidth(
    omega_T: float,
    tau_T: float = 0.5,
    gamma_T: float = 1.0,
    protocol: ProtocolSpec = ProtocolSpec("gaussian"),
    threshold: float = 0.999,
    rel_tol: float = 1e-9,
) -> float:
    """Half-width in detuning-pulse phase offset of the F > threshold region.

    Scans the offset upward from zero and root-solves the threshold crossing;
    returns pi if the fidelity stays above threshold for all offsets.
    """

    def fid(offset):
        cfg = RunConfig(
            protocol,
            DriveParams(omega_T=omega_T, tau_T=tau_T, gamma_T=gamma_T),
            mode="sa_stirap",
            phase_offset=offset,
            rel_tol=rel_tol,
        )
        return _metrics.fidelity(propagate(cfg))

    if fid(0.0) <= threshold:
        return 0.0
    hi = math.pi - 1e-9
    if fid(hi) > threshold:
        return math.pi
    return brentq(lambda d: fid(d) - threshold, 1e-6, hi, xtol=1e-5)
