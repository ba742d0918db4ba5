"""Flat ``key = value`` run configuration with strict validation."""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .grid import RadialGrid
from .model import ModelParams

MODES = ("evolve", "stationary", "mass-invert", "sweep", "verify")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Preset:
    """Initial-profile recipe: constant(c), gaussian-bump(center,width,amplitude) or from-file(path)."""

    kind: str
    args: tuple

    def sample(self, grid: RadialGrid, default_constant: float | None = None) -> np.ndarray:
        r = grid.cell_centers
        if self.kind == "constant":
            c = self.args[0] if self.args else default_constant
            return np.full(grid.M, float(c))
        if self.kind == "gaussian-bump":
            c, w, a = self.args
            return a * np.exp(-(((r - c) / w) ** 2))
        if self.kind == "from-file":
            data = np.loadtxt(self.args[0], delimiter=",", comments="#", ndmin=2)
            if data.shape[1] == 1:
                vals = data[:, 0]
            else:
                vals = np.interp(r, data[:, 0], data[:, 1])
            return grid.check(vals, f"profile from {self.args[0]}")
        raise ConfigError(f"unknown preset {self.kind!r}")

    def __str__(self):
        if self.kind == "constant" and not self.args:
            return "constant"
        return f"{self.kind}({','.join(str(a) for a in self.args)})"


_PRESET = re.compile(r"^\s*([a-z-]+)\s*(?:\((.*)\))?\s*$")


def parse_preset(text: str) -> Preset:
    m = _PRESET.match(text)
    if not m:
        raise ValueError(f"malformed profile preset {text!r}")
    kind, inner = m.group(1), m.group(2)
    args = [a.strip() for a in inner.split(",")] if inner not in (None, "") else []
    if kind == "constant":
        if len(args) > 1:
            raise ValueError("constant takes at most one argument")
        return Preset(kind, tuple(float(a) for a in args))
    if kind == "gaussian-bump":
        if len(args) != 3:
            raise ValueError("gaussian-bump takes (center, width, amplitude)")
        c, w, a = (float(x) for x in args)
        if not (w > 0 and a >= 0):
            raise ValueError("gaussian-bump needs width > 0 and amplitude >= 0")
        return Preset(kind, (c, w, a))
    if kind == "from-file":
        if len(args) != 1:
            raise ValueError("from-file takes one path")
        return Preset(kind, (args[0],))
    raise ValueError(f"unknown preset {kind!r}")


@dataclass
class RunConfig:
    mode: str = "evolve"
    n: int = 2
    R: float = 1.0
    v_star: float = 1.0
    eps: float = 0.0
    M: int = 256
    dt_max: float = 0.01
    cfl: float = 0.5
    t_end: float = 10.0
    output_every: float = 1.0
    taxis: str = "fitted"
    u0: Preset = Preset("gaussian-bump", (0.0, 0.2, 5.0))
    v0: Preset = Preset("constant", ())
    alpha: float = 1.0
    mass: float = math.nan
    tol: float = 1e-12
    max_iter: int = 1000
    sweep_mode: str = "stationary"
    sweep_key: str = ""
    sweep_values: tuple = ()
    verify_M: int = 512
    verify_profiles: int = 100
    out: str = "out"

    def params(self) -> ModelParams:
        return ModelParams(self.n, self.R, self.v_star, self.eps)

    def grid(self) -> RadialGrid:
        return RadialGrid(self.n, self.R, self.M)

    def effective(self) -> str:
        lines = []
        for f in fields(self):
            val = getattr(self, f.name)
            if isinstance(val, tuple):
                val = ",".join(str(x) for x in val)
            lines.append(f"{f.name} = {val}")
        return "\n".join(lines) + "\n"


_INT_KEYS = {"n", "M", "max_iter", "verify_M", "verify_profiles"}
_STR_KEYS = {"mode", "taxis", "sweep_mode", "sweep_key", "out"}
_PRESET_KEYS = {"u0", "v0"}
KEYS = tuple(f.name for f in fields(RunConfig))


def _convert(key: str, raw: str):
    if key in _INT_KEYS:
        return int(raw)
    if key in _STR_KEYS:
        return raw
    if key in _PRESET_KEYS:
        return parse_preset(raw)
    if key == "sweep_values":
        return tuple(float(x) for x in raw.split(",") if x.strip())
    return float(raw)


def validate(cfg: RunConfig) -> RunConfig:
    def need(ok, key, msg):
        if not ok:
            raise ConfigError(f"{key}: {msg}")

    need(cfg.mode in MODES, "mode", f"must be one of {', '.join(MODES)}")
    need(cfg.n >= 2, "n", "must be an integer >= 2")
    need(cfg.R > 0, "R", "must be positive")
    need(cfg.v_star >= 0, "v_star", "must be >= 0")
    need(0 <= cfg.eps < 1, "eps", "eps must lie in [0,1)")
    need(cfg.M >= 8, "M", "must be >= 8")
    need(cfg.dt_max > 0, "dt_max", "must be positive")
    need(0 < cfg.cfl <= 1, "cfl", "must lie in (0,1]")
    need(cfg.t_end >= 0, "t_end", "must be >= 0")
    need(cfg.output_every >= 0, "output_every", "must be >= 0")
    need(cfg.taxis in ("fitted", "upwind"), "taxis", "must be fitted or upwind")
    need(cfg.alpha >= 0, "alpha", "must be >= 0")
    need(cfg.tol > 0, "tol", "must be positive")
    need(cfg.max_iter >= 1, "max_iter", "must be >= 1")
    need(cfg.verify_M >= 8, "verify_M", "must be >= 8")
    need(cfg.verify_profiles >= 1, "verify_profiles", "must be >= 1")
    if cfg.mode == "mass-invert":
        need(cfg.mass >= 0, "mass", "mass-invert needs mass >= 0")
    if cfg.mode == "sweep":
        need(cfg.sweep_mode in ("evolve", "stationary", "mass-invert"), "sweep_mode",
             "must be evolve, stationary or mass-invert")
        need(cfg.sweep_key in KEYS and cfg.sweep_key not in _STR_KEYS | _PRESET_KEYS | {"sweep_values"},
             "sweep_key", "must name a numeric key")
        need(len(cfg.sweep_values) > 0, "sweep_values", "must list at least one value")
        for val in cfg.sweep_values:
            try:
                validate(sweep_member(cfg, val))
            except ConfigError as exc:
                raise ConfigError(f"sweep_values: {val}: {exc}") from None
    return cfg


def sweep_member(cfg: RunConfig, value: float) -> RunConfig:
    from dataclasses import replace

    v = int(value) if cfg.sweep_key in _INT_KEYS else float(value)
    return replace(cfg, mode=cfg.sweep_mode, **{cfg.sweep_key: v},
                   out=str(Path(cfg.out) / f"{cfg.sweep_key}={value:g}"))


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` lines ('#' comments) into a validated RunConfig."""
    cp = configparser.ConfigParser(
        delimiters=("=",), comment_prefixes=("#",), inline_comment_prefixes=("#",),
        interpolation=None, strict=True, empty_lines_in_values=False,
    )
    cp.optionxform = str
    try:
        cp.read_string("[run]\n" + text)
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"line {exc.lineno - 1}: duplicate key {exc.option!r}") from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"line {lineno - 1}, column 1: cannot parse {line.strip()!r} (expected 'key = value')") from None
    except configparser.Error as exc:
        raise ConfigError(f"syntax error: {exc}") from None
    values = {}
    for key, raw in cp["run"].items():
        if key not in KEYS:
            raise ConfigError(f"{key}: unknown key")
        try:
            values[key] = _convert(key, raw.strip())
        except ValueError as exc:
            raise ConfigError(f"{key}: invalid value {raw.strip()!r} ({exc})") from None
    if "mode" not in values:
        raise ConfigError("mode: required key missing")
    return validate(RunConfig(**values))


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))
