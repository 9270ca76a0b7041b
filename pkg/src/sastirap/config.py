"""Flat TOML run configuration.

One human-editable document with flat keys describes a single run plus
optional sweep axes and output settings.  Unknown keys are hard errors so
typos cannot silently fall back to defaults.  CLI flags override file keys.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .dynamics import RunConfig
from .protocols import DriveParams, ProtocolSpec
from .sweeps import Axis, GridSpec


class ConfigError(ValueError):
    pass


@dataclass
class CliConfig:
    protocol: str = "gaussian"
    alpha: float | None = None
    omega_T: float = 1.0
    tau_T: float = 0.5
    gamma_T: float = 0.0
    T: float = 1.0
    mode: str = "stirap"
    lock_tau_T: float | None = None
    area_scale: float = 1.0
    phase_offset: float = 0.0
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float | None = None
    n_samples: int = 1001
    eps_cut: float = 1e-4
    out: str = "."
    workers: int = 1
    axes: list = field(default_factory=list)  # "name,lo,hi,n[,spacing]" strings
    metrics: list = field(default_factory=lambda: ["fidelity", "loss"])
    figure: str | None = None

    def to_run_config(self) -> RunConfig:
        try:
            spec = ProtocolSpec(self.protocol, self.alpha)
            drive = DriveParams(
                omega_T=self.omega_T,
                tau_T=self.tau_T,
                gamma_T=self.gamma_T,
                T=self.T,
            )
            return RunConfig(
                protocol=spec,
                drive=drive,
                mode=self.mode,
                lock_tau_T=self.lock_tau_T,
                area_scale=self.area_scale,
                phase_offset=self.phase_offset,
                rel_tol=self.rel_tol,
                abs_tol=self.abs_tol,
                max_step=self.max_step,
                n_samples=self.n_samples,
                eps_cut=self.eps_cut,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def to_grid_spec(self) -> GridSpec:
        if not self.axes:
            raise ConfigError("sweep requires at least one 'axes' entry")
        axes = tuple(parse_axis(a) for a in self.axes)
        return GridSpec(axes=axes, base=self.to_run_config(), metrics=tuple(self.metrics))


def parse_axis(text: str) -> Axis:
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) not in (4, 5):
        raise ConfigError(
            f"axis {text!r} must be 'name,lo,hi,points[,spacing]'"
        )
    name, lo, hi, n = parts[0], parts[1], parts[2], parts[3]
    spacing = parts[4] if len(parts) == 5 else "linear"
    try:
        return Axis(name, float(lo), float(hi), int(n), spacing)
    except ValueError as exc:
        raise ConfigError(f"bad axis {text!r}: {exc}") from exc


_FIELD_TYPES = {f.name: f for f in fields(CliConfig)}
_FLOAT_KEYS = {
    "alpha", "omega_T", "tau_T", "gamma_T", "T", "lock_tau_T", "area_scale",
    "phase_offset", "rel_tol", "abs_tol", "max_step", "eps_cut",
}
_INT_KEYS = {"n_samples", "workers"}
_STR_KEYS = {"protocol", "mode", "out", "figure"}
_LIST_KEYS = {"axes", "metrics"}


def parse_config(text: str) -> CliConfig:
    """Parse and validate a flat TOML document into a CliConfig."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    cfg = CliConfig()
    for key, value in doc.items():
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        if key in _FLOAT_KEYS:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"key {key!r} must be a number")
            value = float(value)
        elif key in _INT_KEYS:
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"key {key!r} must be an integer")
        elif key in _STR_KEYS:
            if not isinstance(value, str):
                raise ConfigError(f"key {key!r} must be a string")
        elif key in _LIST_KEYS:
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                raise ConfigError(f"key {key!r} must be a list of strings")
        setattr(cfg, key, value)
    # fail fast on domain violations so errors name the offending constraint
    cfg.to_run_config()
    for a in cfg.axes:
        parse_axis(a)
    return cfg


def _format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int,)):
        return str(value)
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            raise ConfigError("cannot emit non-finite numbers")
        return repr(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, list):
        return "[" + ", ".join(_format_value(v) for v in value) + "]"
    raise ConfigError(f"cannot emit value {value!r}")


def emit(cfg: CliConfig) -> str:
    """Serialize a CliConfig back to flat TOML; parse_config(emit(c)) == c."""
    lines = []
    for f in fields(CliConfig):
        value = getattr(cfg, f.name)
        if value is None:
            continue  # optional keys are omitted rather than written as null
        lines.append(f"{f.name} = {_format_value(value)}")
    return "\n".join(lines) + "\n"
