"""Command-line front end.

Subcommands: ``simulate`` (one scenario to a trajectory CSV plus a metrics
JSON on stdout), ``phase-portrait`` (initial-condition grids per wind value),
``continuity`` (command-angle sweep across the wind-speed boundary) and
``validate`` (error-coordinate cross-check and gain-condition audit).

stdout carries machine-readable JSON/CSV only; human diagnostics go to
stderr. Exit codes: 0 success, 2 config error, 3 simulation abort,
4 validation failure. Report files get a rendered PNG next to each CSV
unless ``--no-plot`` is given. ``WINDWARD_THREADS`` caps batch parallelism.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import csvio, plots
from .config import (ConfigError, continuity_from_config, grid_from_config,
                     load_config, scenario_from_config)
from .guidance import GainTooSmall, gain_lower_bound
from .paths import DegenerateProjection, FrenetSingularity
from .sim import (Scenario, SimulationAborted, continuity_sweep, metrics,
                  phase_portrait, run, run_error_dynamics)
from .wind import ConstantWind

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ABORT = 3
EXIT_VALIDATION = 4

_SIM_ERRORS = (SimulationAborted, GainTooSmall, DegenerateProjection,
               FrenetSingularity)


def _workers() -> int:
    cap = os.cpu_count() or 1
    env = os.environ.get("WINDWARD_THREADS")
    if env:
        try:
            cap = min(cap, max(1, int(env)))
        except ValueError:
            print(f"ignoring invalid WINDWARD_THREADS={env!r}", file=sys.stderr)
    return cap


def _fail(code: int, message: str) -> int:
    print(message, file=sys.stderr)
    return code


def cmd_simulate(args) -> int:
    try:
        scenario = scenario_from_config(load_config(args.config))
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, f"config error: {exc}")
    try:
        log = run(scenario)
    except _SIM_ERRORS as exc:
        return _fail(EXIT_ABORT, f"simulation aborted: {exc}")
    csvio.write_trajectory(log, args.out)
    for warning in log.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if not args.no_plot:
        plots.render_trajectory(log, scenario.path, Path(args.out).with_suffix(".png"))
    print(json.dumps(metrics(log), indent=2))
    return EXIT_OK


def cmd_phase_portrait(args) -> int:
    try:
        cfg = load_config(args.config)
        scenario = scenario_from_config(cfg)
        grid = grid_from_config(cfg)
        if not isinstance(scenario.wind, ConstantWind):
            raise ConfigError("phase portraits need a constant-wind scenario")
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, f"config error: {exc}")
    if args.winds is not None and not args.winds:
        return _fail(EXIT_CONFIG, "config error: empty wind list")
    if args.winds is None:
        winds = [0.0, 7.0, 13.5]
    else:
        winds = args.winds
    airspeed = scenario.initial.airspeed
    if any(w >= airspeed for w in winds):
        return _fail(EXIT_CONFIG,
                     "config error: portrait winds must stay below the airspeed")
    base_dir = scenario.wind.w.normalized() if scenario.wind.w.norm() > 1e-12 \
        else ConstantWind((1.0, 0.0)).w
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = {}
    for w_star in winds:
        windm = ConstantWind(base_dir * w_star)
        traces = phase_portrait(scenario.path, windm, scenario.params, grid,
                                airspeed, scenario.integrator,
                                scenario.duration, workers=_workers())
        name = f"portrait_w{w_star:g}"
        csvio.write_portrait(traces, out_dir / f"{name}.csv")
        if not args.no_plot:
            plots.render_portrait(traces, out_dir / f"{name}.png",
                                  title=f"w* = {w_star:g} m/s")
        summary[f"{w_star:g}"] = {
            "traces": len(traces),
            "converged": sum(tr.converged_at is not None for tr in traces),
        }
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def cmd_continuity(args) -> int:
    try:
        cfg = continuity_from_config(load_config(args.config))
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, f"config error: {exc}")
    nus = args.nu if args.nu else cfg["nu"]
    lo, hi, step = args.wind_range if args.wind_range else cfg["wind_range"]
    if step <= 0 or hi < lo:
        return _fail(EXIT_CONFIG, "config error: empty wind range")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    w_values = [lo + i * step for i in range(n)]
    if not w_values or not nus:
        return _fail(EXIT_CONFIG, "config error: empty sweep")
    rows = continuity_sweep(nus, w_values, cfg["params"], cfg["airspeed"],
                            cfg["wind_direction"])
    csvio.write_continuity(rows, args.out)
    if not args.no_plot:
        plots.render_continuity(rows, Path(args.out).with_suffix(".png"))
    regimes = sorted({r[3] for r in rows})
    print(json.dumps({"rows": len(rows), "regimes": regimes}, indent=2))
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        scenario = scenario_from_config(load_config(args.config))
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, f"config error: {exc}")
    horizon = min(scenario.duration, 60.0)
    try:
        log = run(Scenario(path=scenario.path, wind=scenario.wind,
                           initial=scenario.initial, params=scenario.params,
                           integrator=scenario.integrator, duration=horizon,
                           seed=scenario.seed,
                           geometric_idealization=scenario.geometric_idealization))
        _, oracle_enorm = run_error_dynamics(scenario, duration=horizon)
    except _SIM_ERRORS as exc:
        return _fail(EXIT_ABORT, f"simulation aborted: {exc}")
    kin_enorm = [math.hypot(ex, ey)
                 for ex, ey in zip(log.column("ex"), log.column("ey"))]
    discrepancy = max(abs(a - b) for a, b in zip(kin_enorm, oracle_enorm))
    bound = gain_lower_bound(scenario.path.max_abs_curvature(),
                             scenario.wind.max_speed(),
                             scenario.initial.airspeed)
    report = {
        "oracle_max_discrepancy_m": discrepancy,
        "oracle_tolerance_m": 0.05,
        "gain": scenario.params.gain,
        "gain_lower_bound": bound,
        "gain_ok": scenario.params.gain > bound,
        "oracle_ok": discrepancy <= 0.05,
    }
    report["ok"] = report["gain_ok"] and report["oracle_ok"]
    print(json.dumps(report, indent=2))
    if not report["ok"]:
        if not report["gain_ok"]:
            print(f"gain {scenario.params.gain:.6g} does not exceed the "
                  f"required bound {bound:.6g}", file=sys.stderr)
        if not report["oracle_ok"]:
            print(f"error-dynamics cross-check discrepancy {discrepancy:.4g} m "
                  f"exceeds 0.05 m", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="windward",
        description="Path-following guidance simulation harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario to a trajectory CSV")
    p.add_argument("config", help="scenario config file or bundled name")
    p.add_argument("--out", required=True, help="trajectory CSV path")
    p.add_argument("--no-plot", action="store_true", help="skip the PNG figure")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("phase-portrait",
                       help="initial-condition grid runs per wind value")
    p.add_argument("config", help="scenario config file or bundled name")
    p.add_argument("--winds", type=float, nargs="*", default=None,
                   help="wind magnitudes m/s (default: 0 7 13.5)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_phase_portrait)

    p = sub.add_parser("continuity",
                       help="command-angle sweep across the wind boundary")
    p.add_argument("--config", default="fig10",
                   help="continuity config (default: bundled fig10)")
    p.add_argument("--nu", type=float, nargs="*", default=None,
                   help="course angles from anti-wind, rad")
    p.add_argument("--wind-range", type=float, nargs=3, default=None,
                   metavar=("MIN", "MAX", "STEP"))
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_continuity)

    p = sub.add_parser("validate",
                       help="error-dynamics cross-check and gain audit")
    p.add_argument("config", help="scenario config file or bundled name")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
