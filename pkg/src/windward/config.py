"""Strict JSON scenario configs.

Every section rejects unknown keys so typos fail loudly instead of silently
falling back to defaults. Bundled scenario files ship inside the package and
can be referenced by bare name (``fig6`` or ``fig6.json``).
"""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

from .dynamics import IntegratorConfig, VehicleState
from .geometry import Vec2
from .guidance import GuidanceParams
from .paths import ArcChain, ArcSegment, Circle, Line, LineSegment, SinglePoint
from .sim import Scenario, default_grid
from .wind import ConstantWind, PiecewiseConstantWind, SinusoidalWind


class ConfigError(Exception):
    pass


def bundled_names() -> list[str]:
    root = resources.files("windward").joinpath("configs")
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def load_config(spec: str | Path) -> dict:
    """Read a config from a file path or a bundled config name."""
    p = Path(spec)
    if p.exists():
        text = p.read_text()
    else:
        name = p.name if p.name.endswith(".json") else p.name + ".json"
        res = resources.files("windward").joinpath("configs", name)
        if not res.is_file():
            raise ConfigError(f"config {spec!r} is neither a file nor a bundled name")
        text = res.read_text()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {spec}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("top-level config must be a JSON object")
    return cfg


def _check_keys(obj: dict, where: str, required: tuple, optional: tuple = ()):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be an object")
    unknown = set(obj) - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    missing = set(required) - set(obj)
    if missing:
        raise ConfigError(f"missing keys in {where}: {sorted(missing)}")


def _num(obj, key, where, positive=False):
    v = obj[key]
    if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
        raise ConfigError(f"{where}.{key} must be a finite number")
    if positive and v <= 0:
        raise ConfigError(f"{where}.{key} must be positive")
    return float(v)


def _vec(obj, key, where) -> Vec2:
    v = obj[key]
    if (not isinstance(v, list) or len(v) != 2
            or not all(isinstance(c, (int, float)) and not isinstance(c, bool)
                       and math.isfinite(c) for c in v)):
        raise ConfigError(f"{where}.{key} must be a [x, y] pair of finite numbers")
    return Vec2(float(v[0]), float(v[1]))


def _path_from(cfg: dict):
    _check_keys(cfg, "path", ("type",), ("anchor", "direction", "length",
                                         "center", "radius", "orientation",
                                         "point", "segments", "closed"))
    kind = cfg.get("type")
    if kind == "line":
        _check_keys(cfg, "path", ("type", "anchor", "direction"), ("length",))
        length = _num(cfg, "length", "path", positive=True) if "length" in cfg else None
        return Line(_vec(cfg, "anchor", "path"), _vec(cfg, "direction", "path"), length)
    if kind == "circle":
        _check_keys(cfg, "path", ("type", "center", "radius"), ("orientation",))
        orientation = cfg.get("orientation", "ccw")
        if orientation not in ("ccw", "cw"):
            raise ConfigError("path.orientation must be 'ccw' or 'cw'")
        return Circle(_vec(cfg, "center", "path"), _num(cfg, "radius", "path", True),
                      ccw=orientation == "ccw")
    if kind == "single_point":
        _check_keys(cfg, "path", ("type", "point"))
        return SinglePoint(_vec(cfg, "point", "path"))
    if kind == "arc_chain":
        _check_keys(cfg, "path", ("type", "segments"), ("closed",))
        segs = []
        for i, s in enumerate(cfg["segments"]):
            where = f"path.segments[{i}]"
            if not isinstance(s, dict) or "type" not in s:
                raise ConfigError(f"{where} must be an object with a type")
            if s["type"] == "line":
                _check_keys(s, where, ("type", "start", "end"))
                segs.append(LineSegment(_vec(s, "start", where), _vec(s, "end", where)))
            elif s["type"] == "arc":
                _check_keys(s, where, ("type", "center", "radius", "start_angle",
                                       "sweep_angle"), ("orientation",))
                orientation = s.get("orientation", "ccw")
                if orientation not in ("ccw", "cw"):
                    raise ConfigError(f"{where}.orientation must be 'ccw' or 'cw'")
                segs.append(ArcSegment(_vec(s, "center", where),
                                       _num(s, "radius", where, True),
                                       _num(s, "start_angle", where),
                                       _num(s, "sweep_angle", where, True),
                                       ccw=orientation == "ccw"))
            else:
                raise ConfigError(f"{where}.type must be 'line' or 'arc'")
        try:
            return ArcChain(segs, closed=bool(cfg.get("closed", False)))
        except ValueError as exc:
            raise ConfigError(f"invalid arc chain: {exc}") from exc
    raise ConfigError(f"unknown path type {kind!r}")


def _wind_from(cfg: dict):
    _check_keys(cfg, "wind", ("type",), ("vector", "amplitude", "pulsation",
                                         "direction", "breakpoints"))
    kind = cfg.get("type")
    if kind == "constant":
        _check_keys(cfg, "wind", ("type", "vector"))
        return ConstantWind(_vec(cfg, "vector", "wind"))
    if kind == "sinusoidal":
        _check_keys(cfg, "wind", ("type", "amplitude", "pulsation", "direction"))
        try:
            return SinusoidalWind(_num(cfg, "amplitude", "wind"),
                                  _num(cfg, "pulsation", "wind"),
                                  _vec(cfg, "direction", "wind"))
        except ValueError as exc:
            raise ConfigError(f"invalid wind: {exc}") from exc
    if kind == "piecewise":
        _check_keys(cfg, "wind", ("type", "breakpoints"))
        bps = cfg["breakpoints"]
        if not isinstance(bps, list) or not bps:
            raise ConfigError("wind.breakpoints must be a non-empty list")
        parsed = []
        for i, bp in enumerate(bps):
            if (not isinstance(bp, list) or len(bp) != 2
                    or not isinstance(bp[0], (int, float))):
                raise ConfigError(f"wind.breakpoints[{i}] must be [time, [x, y]]")
            parsed.append((float(bp[0]), _vec({"v": bp[1]}, "v", f"wind.breakpoints[{i}]")))
        try:
            return PiecewiseConstantWind(parsed)
        except ValueError as exc:
            raise ConfigError(f"invalid wind: {exc}") from exc
    raise ConfigError(f"unknown wind type {kind!r}")


def scenario_from_config(cfg: dict) -> Scenario:
    _check_keys(cfg, "config", ("path", "wind", "initial", "params",
                                "integrator", "duration"),
                ("seed", "geometric_idealization", "grid", "name"))
    path = _path_from(cfg["path"])
    windm = _wind_from(cfg["wind"])

    ini = cfg["initial"]
    _check_keys(ini, "initial", ("position", "heading", "airspeed"))
    heading = _vec(ini, "heading", "initial")
    if heading.norm() < 1e-12:
        raise ConfigError("initial.heading must be a nonzero vector")
    initial = VehicleState(_vec(ini, "position", "initial"),
                           heading.normalized(),
                           _num(ini, "airspeed", "initial", positive=True))

    par = cfg["params"]
    _check_keys(par, "params", ("gain", "boundary_layer"),
                ("eps_speed", "eps_singularity"))
    params = GuidanceParams(
        gain=_num(par, "gain", "params", positive=True),
        boundary_layer=_num(par, "boundary_layer", "params", positive=True),
        eps_speed=_num(par, "eps_speed", "params") if "eps_speed" in par else 0.0,
        eps_singularity=(_num(par, "eps_singularity", "params")
                         if "eps_singularity" in par else 1e-9))

    integ = cfg["integrator"]
    _check_keys(integ, "integrator", ("dt",), ("method",))
    method = integ.get("method", "rk4")
    if method not in ("rk4", "euler"):
        raise ConfigError("integrator.method must be 'rk4' or 'euler'")
    integrator = IntegratorConfig(dt=_num(integ, "dt", "integrator", True),
                                  method=method)

    duration = _num(cfg, "duration", "config", positive=True)
    seed = cfg.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError("seed must be a non-negative integer")
    return Scenario(path=path, wind=windm, initial=initial, params=params,
                    integrator=integrator, duration=duration, seed=seed,
                    geometric_idealization=bool(cfg.get("geometric_idealization", False)))


def grid_from_config(cfg: dict) -> list[tuple[float, float]]:
    """The (eta, e*) initial-condition grid for phase portraits."""
    g = cfg.get("grid")
    if g is None:
        return default_grid()
    _check_keys(g, "grid", (), ("n_eta", "n_e_star", "eta_range", "e_star_range"))
    n_eta = g.get("n_eta", 13)
    n_estar = g.get("n_e_star", 9)
    if not all(isinstance(n, int) and n >= 1 for n in (n_eta, n_estar)):
        raise ConfigError("grid sizes must be integers >= 1")
    eta_range = tuple(g.get("eta_range", (-math.pi, math.pi)))
    e_star_range = tuple(g.get("e_star_range", (-200.0, 200.0)))
    if len(eta_range) != 2 or len(e_star_range) != 2:
        raise ConfigError("grid ranges must be [lo, hi] pairs")
    return default_grid(n_eta, n_estar, eta_range, e_star_range)


def continuity_from_config(cfg: dict) -> dict:
    """Settings for the continuity sweep (airspeed, params, course angles,
    wind range and direction)."""
    _check_keys(cfg, "config", ("airspeed", "params"),
                ("wind_direction", "nu", "wind_range", "name"))
    par = cfg["params"]
    _check_keys(par, "params", ("gain", "boundary_layer"),
                ("eps_speed", "eps_singularity"))
    out = {
        "airspeed": _num(cfg, "airspeed", "config", positive=True),
        "params": GuidanceParams(gain=_num(par, "gain", "params", True),
                                 boundary_layer=_num(par, "boundary_layer", "params", True)),
        "wind_direction": (_vec(cfg, "wind_direction", "config")
                           if "wind_direction" in cfg else Vec2(1.0, 0.0)),
        "nu": [float(v) for v in cfg.get("nu", [0.3, 0.7, 1.1, 1.5, 1.9, 2.4])],
        "wind_range": [float(v) for v in cfg.get("wind_range", [0.0, 30.0, 0.1])],
    }
    if len(out["wind_range"]) != 3:
        raise ConfigError("wind_range must be [min, max, step]")
    return out
