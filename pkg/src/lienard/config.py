"""Run configuration: a JSON document validated into :class:`RunConfig`."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Tuple

from .conditions import Grid
from .errors import ConfigError
from .integrate import StepperConfig
from .perturb import TABLE_EPSILONS, Perturbation, sin2t_perturbation
from .svg import PlotSpec
from .systems import (
    GeneralizedLienard,
    PolynomialLienard,
    builtin_system,
    example_equation,
    poly_to_generalized,
    polynomial_from_lists,
)

__all__ = ["RunConfig", "load_config", "config_from_dict"]

TOP_KEYS = {
    "system", "stepper", "a_guess", "orbit_tol", "epsilons", "perturbation",
    "periodicity_tol", "n_returns", "settle", "out", "plot", "grid",
}
STEPPER_KEYS = {"method", "step", "rtol", "atol", "t_max"}
PERTURBATION_KEYS = {"label", "time_scale"}
PLOT_KEYS = {"zoom", "x_range", "y_range", "width_px", "height_px", "max_points"}
GRID_KEYS = {"x_range", "y_range", "resolution"}


@dataclass(frozen=True)
class RunConfig:
    system: object = "example6"  # builtin name or {"poly": [[...], ...]}
    stepper: StepperConfig = field(default_factory=StepperConfig)
    a_guess: float = -0.5
    orbit_tol: float = 1e-10
    epsilons: Tuple[float, ...] = tuple(TABLE_EPSILONS) + (0.01,)
    perturbation: str = "sin2t"
    time_scale: Optional[float] = None
    periodicity_tol: float = 1e-3
    n_returns: int = 10
    settle: int = 0
    out: str = "out"
    plot: PlotSpec = field(default_factory=lambda: PlotSpec(zoom=20.0))
    grid: Grid = field(default_factory=Grid)

    def build_system(self) -> GeneralizedLienard:
        poly = self.polynomial()
        if poly is not None:
            return poly_to_generalized(poly)
        return builtin_system(self.system)

    def polynomial(self) -> Optional[PolynomialLienard]:
        if isinstance(self.system, dict):
            return polynomial_from_lists(self.system["poly"])
        if self.system.split()[0].lower() == "example6":
            return example_equation()
        return None

    @property
    def is_example(self) -> bool:
        return isinstance(self.system, str) and self.system.strip().lower() == "example6"

    def perturbation_for(self, eps: float) -> Perturbation:
        pert = sin2t_perturbation(eps)
        return pert.rescaled(self.time_scale) if self.time_scale else pert


def _unknown(d: dict, allowed: set, where: str):
    for key in d:
        if key not in allowed:
            raise ConfigError(f"unknown config key {where}{key!r}")


def _num(d, key, where, positive=False, integer=False):
    val = d[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"config key {where}{key!r} must be a number")
    if integer and int(val) != val:
        raise ConfigError(f"config key {where}{key!r} must be an integer")
    if not math.isfinite(val) or (positive and val <= 0):
        raise ConfigError(f"config key {where}{key!r} must be {'positive and ' if positive else ''}finite")
    return int(val) if integer else float(val)


def _pair(d, key, where, allow_none=True):
    val = d[key]
    if val is None and allow_none:
        return None
    if not (isinstance(val, (list, tuple)) and len(val) == 2):
        raise ConfigError(f"config key {where}{key!r} must be a [lo, hi] pair")
    lo, hi = (float(v) for v in val)
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ConfigError(f"config key {where}{key!r} must satisfy lo < hi")
    return (lo, hi)


def _check_system(spec):
    if isinstance(spec, dict):
        _unknown(spec, {"poly"}, "system.")
        coeffs = spec.get("poly")
        if not (isinstance(coeffs, list) and all(isinstance(c, list) for c in coeffs)):
            raise ConfigError("system.poly must be a list of coefficient lists")
        try:
            polynomial_from_lists(coeffs)
        except ValueError as exc:
            raise ConfigError(f"system.poly: {exc}") from None
        return {"poly": [list(map(float, c)) for c in coeffs]}
    if isinstance(spec, str):
        try:
            builtin_system(spec)
        except ValueError as exc:
            raise ConfigError(f"system: {exc}") from None
        return spec
    raise ConfigError("system must be a builtin name or {'poly': [...]}")


def config_from_dict(d: dict) -> RunConfig:
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    _unknown(d, TOP_KEYS, "")
    cfg = RunConfig()
    kw = {}
    if "system" in d:
        kw["system"] = _check_system(d["system"])
    if "stepper" in d:
        s = d["stepper"]
        if not isinstance(s, dict):
            raise ConfigError("stepper must be an object")
        _unknown(s, STEPPER_KEYS, "stepper.")
        opts = {k: (s[k] if k == "method" else _num(s, k, "stepper.", positive=True)) for k in s}
        try:
            kw["stepper"] = StepperConfig(**opts)
        except ValueError as exc:
            raise ConfigError(f"stepper: {exc}") from None
    for key in ("a_guess", "orbit_tol", "periodicity_tol"):
        if key in d:
            kw[key] = _num(d, key, "", positive=(key != "a_guess"))
    if "a_guess" in kw and not kw["a_guess"] < 0:
        raise ConfigError("a_guess must be negative")
    for key in ("n_returns", "settle"):
        if key in d:
            kw[key] = _num(d, key, "", integer=True)
    if kw.get("n_returns", 1) < 1 or kw.get("settle", 0) < 0:
        raise ConfigError("n_returns must be >= 1 and settle >= 0")
    if "epsilons" in d:
        eps = d["epsilons"]
        if not isinstance(eps, list):
            raise ConfigError("epsilons must be a list")
        vals = []
        for e in eps:
            if isinstance(e, bool) or not isinstance(e, (int, float)) or not abs(e) < 1:
                raise ConfigError(f"epsilon {e!r} must be a number with |eps| < 1")
            vals.append(float(e))
        kw["epsilons"] = tuple(vals)
    if "perturbation" in d:
        p = d["perturbation"]
        if not isinstance(p, dict):
            raise ConfigError("perturbation must be an object")
        _unknown(p, PERTURBATION_KEYS, "perturbation.")
        if p.get("label", "sin2t") != "sin2t":
            raise ConfigError(f"unknown perturbation label {p['label']!r}")
        if p.get("time_scale") is not None:
            kw["time_scale"] = _num(p, "time_scale", "perturbation.", positive=True)
    if "out" in d:
        if not isinstance(d["out"], str):
            raise ConfigError("out must be a path string")
        kw["out"] = d["out"]
    if "plot" in d:
        p = d["plot"]
        if not isinstance(p, dict):
            raise ConfigError("plot must be an object")
        _unknown(p, PLOT_KEYS, "plot.")
        opts = {}
        for k in p:
            if k in ("x_range", "y_range"):
                opts[k] = _pair(p, k, "plot.")
            else:
                opts[k] = _num(p, k, "plot.", positive=True, integer=(k != "zoom"))
        kw["plot"] = replace(cfg.plot, **opts)
    if "grid" in d:
        g = d["grid"]
        if not isinstance(g, dict):
            raise ConfigError("grid must be an object")
        _unknown(g, GRID_KEYS, "grid.")
        opts = {}
        for k in g:
            opts[k] = _num(g, k, "grid.", positive=True) if k == "resolution" else _pair(g, k, "grid.", allow_none=False)
        try:
            kw["grid"] = replace(cfg.grid, **opts)
        except ValueError as exc:
            raise ConfigError(f"grid: {exc}") from None
    return replace(cfg, **kw)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return config_from_dict(data)
