"""Closed-loop simulation: scenario runner, error-coordinate cross-check,
phase portraits, continuity sweeps and trajectory metrics.

The runner integrates the coupled vehicle-plus-guidance system, evaluating
the command inside every Runge-Kutta stage so the discretization keeps the
integrator's order on the smooth closed loop. Runs are deterministic: a given
scenario always produces the identical log on one platform.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .dynamics import IntegratorConfig, VehicleState
from .geometry import Vec2, angle_between, clamp, cross_k
from .guidance import (GuidanceParams, command_scalars, gain_lower_bound,
                       solve_wind_triangle)
from .paths import (Circle, DegenerateProjection, FrenetSingularity,
                    PathModel, s_dot)
from .wind import ConstantWind, WindModel

TWO_PI = 2.0 * math.pi
NAN = float("nan")
_LABELS = ("slow", "fast1", "fast2")


class SimulationAborted(Exception):
    """The run could not continue (persistent projection singularity)."""


@dataclass(frozen=True)
class Scenario:
    path: PathModel
    wind: WindModel
    initial: VehicleState
    params: GuidanceParams
    integrator: IntegratorConfig
    duration: float
    seed: int = 0
    geometric_idealization: bool = False

    def __post_init__(self):
        if self.duration <= 0.0:
            raise ValueError("duration must be positive")


@dataclass
class TrajectoryLog:
    """Per-step records (one row per control instant, duration/dt + 1 rows).

    Row layout matches ``columns``; regime is one of slow/fast1/fast2 and
    diagnostics that are undefined at a given instant hold NaN.
    """

    columns = ("t", "x", "y", "heading_x", "heading_y", "vgx", "vgy", "wx",
               "wy", "regime", "ux", "uy", "ax", "ay", "ex", "ey", "e_star",
               "eta", "lambda", "beta", "theta_shift", "alpha_out",
               "sigma_safe")

    rows: list[tuple] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    dt: float = 0.0
    boundary_layer: float = 0.0
    airspeed: float = 0.0

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def __len__(self) -> int:
        return len(self.rows)


def _wrap_pi(a: float) -> float:
    return (a + math.pi) % TWO_PI - math.pi


def _eval(path, params, v, x, y, hx, hy, wx, wy, fallback):
    """Project (with degenerate fallback) and run the guidance kernel."""
    try:
        fp = path.project_scalars(x, y)
        fell_back = False
    except DegenerateProjection:
        if fallback is None:
            raise
        fp = fallback
        fell_back = True
    raw = command_scalars(fp[2], fp[3], fp[4], fp[5], fp[6], fp[7], fp[8],
                          hx, hy, wx, wy, v, params)
    return raw, fp, fell_back


def _advance(path, params, v, x, y, hx, hy, t, dt, windm, method, raw1, fp1,
             geometric):
    """One integration step of the closed loop from the step-start evaluation."""
    k = params.gain
    if geometric:
        # heading slaved to the command direction; only the position is a state
        if method == "euler":
            w = windm.sample(t)
            gx, gy = raw1[0] / k, raw1[1] / k
            return x + dt * (v * gx + w.x), y + dt * (v * gy + w.y), gx, gy
        wm = windm.sample(t + 0.5 * dt)
        w1 = windm.sample(t + dt)
        w0 = windm.sample(t)
        g1x, g1y = raw1[0] / k, raw1[1] / k
        r1x, r1y = v * g1x + w0.x, v * g1y + w0.y
        raw2, _, _ = _eval(path, params, v, x + 0.5 * dt * r1x,
                           y + 0.5 * dt * r1y, hx, hy, wm.x, wm.y, fp1)
        r2x, r2y = v * raw2[0] / k + wm.x, v * raw2[1] / k + wm.y
        raw3, _, _ = _eval(path, params, v, x + 0.5 * dt * r2x,
                           y + 0.5 * dt * r2y, hx, hy, wm.x, wm.y, fp1)
        r3x, r3y = v * raw3[0] / k + wm.x, v * raw3[1] / k + wm.y
        raw4, _, _ = _eval(path, params, v, x + dt * r3x, y + dt * r3y,
                           hx, hy, w1.x, w1.y, fp1)
        r4x, r4y = v * raw4[0] / k + w1.x, v * raw4[1] / k + w1.y
        x += dt / 6.0 * (r1x + 2.0 * (r2x + r3x) + r4x)
        y += dt / 6.0 * (r1y + 2.0 * (r2y + r3y) + r4y)
        raw_end, _, _ = _eval(path, params, v, x, y, hx, hy, w1.x, w1.y, fp1)
        return x, y, raw_end[0] / k, raw_end[1] / k

    if method == "euler":
        w = windm.sample(t)
        x += dt * (v * hx + w.x)
        y += dt * (v * hy + w.y)
        hx += dt * raw1[2] / v
        hy += dt * raw1[3] / v
    else:
        w0 = windm.sample(t)
        wm = windm.sample(t + 0.5 * dt)
        w1 = windm.sample(t + dt)
        k1 = (v * hx + w0.x, v * hy + w0.y, raw1[2] / v, raw1[3] / v)
        h2x, h2y = hx + 0.5 * dt * k1[2], hy + 0.5 * dt * k1[3]
        raw2, _, _ = _eval(path, params, v, x + 0.5 * dt * k1[0],
                           y + 0.5 * dt * k1[1], h2x, h2y, wm.x, wm.y, fp1)
        k2 = (v * h2x + wm.x, v * h2y + wm.y, raw2[2] / v, raw2[3] / v)
        h3x, h3y = hx + 0.5 * dt * k2[2], hy + 0.5 * dt * k2[3]
        raw3, _, _ = _eval(path, params, v, x + 0.5 * dt * k2[0],
                           y + 0.5 * dt * k2[1], h3x, h3y, wm.x, wm.y, fp1)
        k3 = (v * h3x + wm.x, v * h3y + wm.y, raw3[2] / v, raw3[3] / v)
        h4x, h4y = hx + dt * k3[2], hy + dt * k3[3]
        raw4, _, _ = _eval(path, params, v, x + dt * k3[0], y + dt * k3[1],
                           h4x, h4y, w1.x, w1.y, fp1)
        k4 = (v * h4x + w1.x, v * h4y + w1.y, raw4[2] / v, raw4[3] / v)
        x += dt / 6.0 * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0])
        y += dt / 6.0 * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1])
        hx += dt / 6.0 * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2])
        hy += dt / 6.0 * (k1[3] + 2.0 * (k2[3] + k3[3]) + k4[3])
    n = math.hypot(hx, hy)
    return x, y, hx / n, hy / n


def run(scenario: Scenario) -> TrajectoryLog:
    """Integrate the scenario and log every control instant."""
    path = scenario.path
    windm = scenario.wind
    params = scenario.params
    v = scenario.initial.airspeed
    dt = scenario.integrator.dt
    method = scenario.integrator.method
    geometric = scenario.geometric_idealization
    n_steps = round(scenario.duration / dt)

    log = TrajectoryLog(dt=dt, boundary_layer=params.boundary_layer, airspeed=v)
    bound = gain_lower_bound(path.max_abs_curvature(), windm.max_speed(), v)
    if params.gain <= bound:
        log.warnings.append(
            f"gain {params.gain:.6g} is below the exact-tracking bound "
            f"{bound:.6g} for this path and wind")

    x, y = scenario.initial.r
    hx, hy = scenario.initial.heading
    fp = None
    degenerate_streak = 0
    for i in range(n_steps + 1):
        t = i * dt
        w = windm.sample(t)
        raw, fp, fell_back = _eval(path, params, v, x, y, hx, hy, w.x, w.y, fp)
        degenerate_streak = degenerate_streak + 1 if fell_back else 0
        if degenerate_streak > 10:
            raise SimulationAborted(
                f"projection degenerate for {degenerate_streak} consecutive "
                f"steps near t={t:.3f} s (vehicle at the path's center of curvature)")
        if geometric:
            hx, hy = raw[0] / params.gain, raw[1] / params.gain
            raw = raw[:2] + (0.0, 0.0) + raw[4:]
        ex, ey = fp[2], fp[3]
        vgx, vgy = v * hx + w.x, v * hy + w.y
        rn = math.hypot(x, y)
        e_star = (ex * x + ey * y) / rn if rn > 1e-12 else NAN
        eta = _wrap_pi(math.atan2(fp[5], fp[4]) - math.atan2(vgy, vgx))
        log.rows.append((t, x, y, hx, hy, vgx, vgy, w.x, w.y, _LABELS[raw[4]],
                         raw[0], raw[1], raw[2], raw[3], ex, ey, e_star, eta,
                         raw[6], raw[5], raw[11], raw[12], raw[13]))
        if i == n_steps:
            break
        x, y, hx, hy = _advance(path, params, v, x, y, hx, hy, t, dt, windm,
                                method, raw, fp, geometric)
    return log


# --- error-coordinate formulation (cross-validation oracle)


@dataclass(frozen=True)
class ErrorDynamicsState:
    e: Vec2
    t_p: Vec2
    n_p: Vec2
    t_m: Vec2


def error_dynamics_rhs(s: ErrorDynamicsState, kappa: float, w: Vec2,
                       airspeed: float, accel: Vec2):
    """Time derivatives of the error-coordinate state (planar, zero torsion).

    The error moves with the footprint minus the vehicle; the path frame
    rotates at the footprint's arc-length speed times |curvature|; the heading
    rotates at accel / airspeed.
    """
    vg = Vec2(airspeed * s.t_m.x + w.x, airspeed * s.t_m.y + w.y)
    ak = abs(kappa)
    denom = 1.0 + ak * s.e.dot(s.n_p)
    if abs(denom) <= 1e-9:
        raise FrenetSingularity("vehicle at the path's center of curvature")
    sdot = vg.dot(s.t_p) / denom
    de = Vec2(sdot * s.t_p.x - vg.x, sdot * s.t_p.y - vg.y)
    dtp = Vec2(sdot * ak * s.n_p.x, sdot * ak * s.n_p.y)
    dnp = Vec2(-sdot * ak * s.t_p.x, -sdot * ak * s.t_p.y)
    dtm = Vec2(accel.x / airspeed, accel.y / airspeed)
    return de, dtp, dnp, dtm


def run_error_dynamics(scenario: Scenario,
                       duration: float | None = None) -> tuple[list, list]:
    """Integrate the error-coordinate system under the same guidance law.

    Returns (times, error norms) on the scenario's own grid; used to
    cross-validate the kinematic runner. The footprint parameter is carried
    along to evaluate the local curvature on non-constant-curvature paths.
    """
    path = scenario.path
    windm = scenario.wind
    params = scenario.params
    v = scenario.initial.airspeed
    dt = scenario.integrator.dt
    if duration is None:
        duration = scenario.duration
    n_steps = round(duration / dt)

    fp0 = path.project(scenario.initial.r)
    state = ErrorDynamicsState(fp0.error, fp0.frame.tangent, fp0.frame.normal,
                               scenario.initial.heading)
    l = fp0.param

    def rhs(s: ErrorDynamicsState, l_now: float, w: Vec2):
        frame_now = path.frame_at(l_now)
        kappa = frame_now.curvature
        raw = command_scalars(s.e.x, s.e.y, s.t_p.x, s.t_p.y, s.n_p.x,
                              s.n_p.y, kappa, s.t_m.x, s.t_m.y, w.x, w.y, v,
                              params)
        de, dtp, dnp, dtm = error_dynamics_rhs(s, kappa, w, v,
                                               Vec2(raw[2], raw[3]))
        vg = Vec2(v * s.t_m.x + w.x, v * s.t_m.y + w.y)
        dl = s_dot(frame_now, s.e, vg)
        return de, dtp, dnp, dtm, dl

    ts = [0.0]
    enorms = [state.e.norm()]
    for i in range(n_steps):
        t = i * dt
        w0 = windm.sample(t)
        wm = windm.sample(t + 0.5 * dt)
        w1 = windm.sample(t + dt)
        k1 = rhs(state, l, w0)
        s2 = _err_shift(state, k1, 0.5 * dt)
        k2 = rhs(s2, l + 0.5 * dt * k1[4], wm)
        s3 = _err_shift(state, k2, 0.5 * dt)
        k3 = rhs(s3, l + 0.5 * dt * k2[4], wm)
        s4 = _err_shift(state, k3, dt)
        k4 = rhs(s4, l + dt * k3[4], w1)
        state = ErrorDynamicsState(
            _rk4_vec(state.e, k1[0], k2[0], k3[0], k4[0], dt),
            _rk4_vec(state.t_p, k1[1], k2[1], k3[1], k4[1], dt).normalized(),
            _rk4_vec(state.n_p, k1[2], k2[2], k3[2], k4[2], dt).normalized(),
            _rk4_vec(state.t_m, k1[3], k2[3], k3[3], k4[3], dt).normalized())
        l += dt / 6.0 * (k1[4] + 2.0 * (k2[4] + k3[4]) + k4[4])
        ts.append((i + 1) * dt)
        enorms.append(state.e.norm())
    return ts, enorms


def _err_shift(s: ErrorDynamicsState, k, h: float) -> ErrorDynamicsState:
    return ErrorDynamicsState(
        Vec2(s.e.x + h * k[0].x, s.e.y + h * k[0].y),
        Vec2(s.t_p.x + h * k[1].x, s.t_p.y + h * k[1].y).normalized(),
        Vec2(s.n_p.x + h * k[2].x, s.n_p.y + h * k[2].y).normalized(),
        Vec2(s.t_m.x + h * k[3].x, s.t_m.y + h * k[3].y).normalized())


def _rk4_vec(v0: Vec2, k1: Vec2, k2: Vec2, k3: Vec2, k4: Vec2, dt: float) -> Vec2:
    return Vec2(v0.x + dt / 6.0 * (k1.x + 2.0 * (k2.x + k3.x) + k4.x),
                v0.y + dt / 6.0 * (k1.y + 2.0 * (k2.y + k3.y) + k4.y))


# --- phase portraits


@dataclass
class PortraitTrace:
    eta0: float
    e_star0: float
    t: list[float]
    eta: list[float]
    e_star: list[float]
    converged_at: float | None


def portrait_initial_state(path: Circle, w: Vec2, airspeed: float, eta0: float,
                           e_star0: float,
                           placement_angle: float | None = None) -> VehicleState:
    """Vehicle state realizing the requested initial (eta, e*) on a circle.

    The vehicle is placed on an outward ray from the center; by default the
    ray perpendicular to the wind axis, which keeps the construction clear of
    the measure-zero coincidence where the initial heading lands exactly
    antiparallel to the command (an unstable equilibrium whose escape stalls
    the trace). e* values that no interior point can realize (beyond the
    radius) are clamped to one meter short of the center. The heading is the
    wind-triangle solution realizing the requested ground-course error.
    """
    if placement_angle is None:
        placement_angle = math.atan2(w.y, w.x) + 0.5 * math.pi
    radial = Vec2(math.cos(placement_angle), math.sin(placement_angle))
    offset = max(path.radius - min(e_star0, path.radius - 1.0), 1e-6)
    r0 = path.center + offset * radial
    tangent = path.project(r0).frame.tangent
    course = Vec2(math.cos(-eta0) * tangent.x - math.sin(-eta0) * tangent.y,
                  math.sin(-eta0) * tangent.x + math.cos(-eta0) * tangent.y)
    heading, _, _ = solve_wind_triangle(course, w, airspeed)
    return VehicleState(r0, heading, airspeed)


def _portrait_trace(path, windm, params, airspeed, integrator, duration,
                    eta0, e_star0, stop_tol, sustain) -> PortraitTrace:
    dt = integrator.dt
    method = integrator.method
    n_steps = round(duration / dt)
    need = max(1, math.ceil(sustain / dt))
    tol_e, tol_eta = stop_tol

    init = portrait_initial_state(path, windm.sample(0.0), airspeed, eta0, e_star0)
    x, y = init.r
    hx, hy = init.heading
    v = airspeed
    ts: list[float] = []
    etas: list[float] = []
    estars: list[float] = []
    ok_streak = 0
    converged_at = None
    fp = None
    for i in range(n_steps + 1):
        t = i * dt
        w = windm.sample(t)
        raw, fp, _ = _eval(path, params, v, x, y, hx, hy, w.x, w.y, fp)
        vgx, vgy = v * hx + w.x, v * hy + w.y
        rn = math.hypot(x, y)
        e_star = (fp[2] * x + fp[3] * y) / rn if rn > 1e-12 else NAN
        eta = _wrap_pi(math.atan2(fp[5], fp[4]) - math.atan2(vgy, vgx))
        ts.append(t)
        etas.append(eta)
        estars.append(e_star)
        if abs(e_star) < tol_e and abs(eta) < tol_eta:
            ok_streak += 1
            if ok_streak >= need:
                converged_at = t - (need - 1) * dt
                break
        else:
            ok_streak = 0
        if i == n_steps:
            break
        x, y, hx, hy = _advance(path, params, v, x, y, hx, hy, t, dt, windm,
                                method, raw, fp, False)
    return PortraitTrace(eta0, e_star0, ts, etas, estars, converged_at)


def _portrait_worker(args):
    return _portrait_trace(*args)


def phase_portrait(path: Circle, wind: ConstantWind, params: GuidanceParams,
                   grid: list[tuple[float, float]], airspeed: float,
                   integrator: IntegratorConfig, duration: float,
                   stop_tol: tuple[float, float] = (1.0, 0.02),
                   sustain: float = 10.0,
                   workers: int = 1) -> list[PortraitTrace]:
    """One trace per initial (eta, e*); traces stop early once the tracking
    errors stay inside stop_tol for ``sustain`` seconds."""
    jobs = [(path, wind, params, airspeed, integrator, duration, eta0, estar0,
             stop_tol, sustain) for eta0, estar0 in grid]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_portrait_worker, jobs, chunksize=8))
    return [_portrait_trace(*job) for job in jobs]


def default_grid(n_eta: int = 13, n_estar: int = 9,
                 eta_range: tuple[float, float] = (-math.pi, math.pi),
                 e_star_range: tuple[float, float] = (-200.0, 200.0)):
    """Uniform (eta, e*) grid, outer loop over eta."""
    etas = [eta_range[0] + (eta_range[1] - eta_range[0]) * i / (n_eta - 1)
            for i in range(n_eta)] if n_eta > 1 else [eta_range[0]]
    estars = [e_star_range[0] + (e_star_range[1] - e_star_range[0]) * j / (n_estar - 1)
              for j in range(n_estar)] if n_estar > 1 else [e_star_range[0]]
    return [(a, b) for a in etas for b in estars]


# --- continuity sweep


def continuity_sweep(nus: list[float], w_values: list[float],
                     params: GuidanceParams, airspeed: float,
                     wind_dir: Vec2 = Vec2(1.0, 0.0)):
    """Command angle from the anti-wind direction over a wind-speed sweep.

    The desired course is held fixed at angle nu from the anti-wind direction
    (realized by a far-away straight error geometry, so no curvature shift is
    active) while the wind magnitude sweeps across the airspeed. Returns rows
    (w_star, nu, y, regime label).
    """
    whx, why = Vec2(*wind_dir).normalized()
    rows = []
    for nu in nus:
        # course at +nu from anti-wind; synthetic far footprint along it
        cx = math.cos(nu) * -whx - math.sin(nu) * why
        cy = math.cos(nu) * -why + math.sin(nu) * whx
        course = Vec2(cx, cy)
        e = course * (2.0 * params.boundary_layer)
        tangent = course.perp()
        normal = tangent.perp()
        for w_star in w_values:
            w = Vec2(whx * w_star, why * w_star)
            try:
                heading, _, _ = solve_wind_triangle(course, w, airspeed)
            except Exception:
                heading = Vec2(-whx, -why)
            raw = command_scalars(e.x, e.y, tangent.x, tangent.y, normal.x,
                                  normal.y, 0.0, heading.x, heading.y, w.x,
                                  w.y, airspeed, params)
            u = Vec2(raw[0], raw[1]).normalized()
            y = angle_between(Vec2(-whx, -why), u)
            rows.append((w_star, nu, y, _LABELS[raw[4]]))
    return rows


# --- metrics


def metrics(log: TrajectoryLog) -> dict:
    """Aggregate tracking metrics.

    Settling is the first instant from which the error norm stays below the
    boundary layer for ten sustained seconds; post-settling statistics are
    NaN when the run never settles.
    """
    enorm = [math.hypot(ex, ey) for ex, ey in zip(log.column("ex"), log.column("ey"))]
    ts = log.column("t")
    need = max(1, math.ceil(10.0 / log.dt))
    settle_idx = None
    streak = 0
    for i, e in enumerate(enorm):
        streak = streak + 1 if e < log.boundary_layer else 0
        if streak == need:
            settle_idx = i - need + 1
            break
    etas = log.column("eta")
    regimes = log.column("regime")
    n = len(log.rows)
    occupancy = {lab: regimes.count(lab) / n for lab in _LABELS}
    wx, wy = log.rows[-1][7], log.rows[-1][8]
    wn = math.hypot(wx, wy)
    hx, hy = log.rows[-1][3], log.rows[-1][4]
    out = {
        "final_error": enorm[-1],
        "settling_time": ts[settle_idx] if settle_idx is not None else NAN,
        "max_error_after_settling": max(enorm[settle_idx:]) if settle_idx is not None else NAN,
        "mean_abs_eta_after_settling": (sum(abs(e) for e in etas[settle_idx:])
                                        / (n - settle_idx)) if settle_idx is not None else NAN,
        "regime_occupancy": occupancy,
        "terminal_antiwind_alignment": (-(hx * wx + hy * wy) / wn) if wn > 1e-12 else NAN,
    }
    return out
