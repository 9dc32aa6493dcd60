"""Look-ahead guidance for unicycle-like vehicles in arbitrarily strong wind.

The auxiliary input ``u`` always has norm equal to the gain and encodes the
direction the vehicle should steer toward; the normal-acceleration command is
``(v_M x u) x v_M``, which never produces tangential acceleration, so the
airspeed norm is structurally constant.

Three regimes, selected from the wind speed ``w*`` and the feasibility of the
desired ground-course direction:

* ``slow``  -- w* <= airspeed: wind-triangle heading plus a curvature shift
  rotation, tracking position, course and curvature exactly;
* ``fast1`` -- w* > airspeed with the desired course inside the feasibility
  cone: same construction with the shift tapered to vanish at the cone edge;
* ``fast2`` -- desired course infeasible: steer toward the blend of the
  anti-wind direction and the desired course that degrades tracking
  gracefully into the safe run-away configuration.

Angle conventions match :mod:`windward.geometry` (counterclockwise-positive
rotations) and :mod:`windward.paths` (positive curvature on counterclockwise
paths). With those conventions the curvature shift rotates the command
*toward* the center of curvature: its sign is ``+sign(curvature)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .dynamics import VehicleState
from .geometry import UnitVec2, Vec2, clamp, cross_k
from .paths import Footprint, PathModel

HALF_PI = 0.5 * math.pi
NAN = float("nan")


class GainTooSmall(Exception):
    """Path curvature exceeds the guidance gain; the look-ahead shift is undefined."""


class InfeasibleCourse(Exception):
    """No heading realizes the requested ground course at this wind."""


@dataclass(frozen=True)
class GuidanceParams:
    """Tuning constants.

    gain: 1/m, the norm of u. Must exceed the path's largest |curvature|;
        exact steady-state tracking additionally needs
        gain > max|curvature| * (1 + w*/airspeed)^2 (see gain_lower_bound).
    boundary_layer: m, distance scale of the capture-to-track blend.
    eps_speed: m/s, widens the slow-regime wind test (default 0: boundaries
        exactly as defined).
    eps_singularity: dimensionless guard for vanishing denominators at regime
        boundaries.
    """

    gain: float
    boundary_layer: float
    eps_speed: float = 0.0
    eps_singularity: float = 1e-9

    def __post_init__(self):
        if self.gain <= 0.0:
            raise ValueError("gain must be positive")
        if self.boundary_layer <= 0.0:
            raise ValueError("boundary layer must be positive")


class Regime(Enum):
    SLOW = "slow"
    FAST_FEASIBLE = "fast1"
    FAST_INFEASIBLE = "fast2"

    @property
    def label(self) -> str:
        return self.value


_REGIMES = (Regime.SLOW, Regime.FAST_FEASIBLE, Regime.FAST_INFEASIBLE)


@dataclass(frozen=True)
class GuidanceDiagnostics:
    """Every named scalar and direction the law computes, for logging and
    figure reproduction. Fields that are undefined in the active regime (or
    at zero wind) hold NaN."""

    regime: Regime
    beta: float            # feasibility-cone half angle, pi when wind is slow
    lam: float             # angle between wind and desired course
    y: float               # angle between anti-wind and target heading / command
    nu: float              # pi - lam
    theta_look: float      # look-ahead blend angle actually used
    d_shift: float         # radial shift applied to the error
    theta_shift: float     # curvature shift rotation applied to the command
    alpha_out: float       # infeasibility index in [0, 1]
    sigma_safe: float      # safety index in [0, 1]
    course_dir: Vec2       # desired ground-course direction (from the raw error)
    look_dir: Vec2         # look-ahead direction (from the shifted distance)
    heading_target: Vec2   # wind-triangle heading, NaN when infeasible


@dataclass(frozen=True)
class GuidanceOutput:
    u: Vec2                # |u| = gain
    accel: Vec2            # normal acceleration command, orthogonal to v_M
    diagnostics: GuidanceDiagnostics


# --- scalar helpers shared by the public operations and the hot-loop kernel


def _look_angle(dist: float, boundary_layer: float) -> float:
    x = dist / boundary_layer
    if x > 1.0:
        x = 1.0
    return HALF_PI * math.sqrt(1.0 - x)


def _radial_shift(kappa: float, gain: float, boundary_layer: float) -> float:
    a = 2.0 / math.pi * math.acos(abs(kappa) / gain)
    return (1.0 - a * a) * boundary_layer


def _blend(dx: float, dy: float, dn: float, tx: float, ty: float,
           boundary_layer: float) -> tuple[float, float, float]:
    """Blend the cross-track direction with the tangent; returns (lx, ly, theta)."""
    theta = _look_angle(dn, boundary_layer)
    c = math.cos(theta)
    s = math.sin(theta)
    lx = c * dx / dn + s * tx
    ly = c * dy / dn + s * ty
    n = math.hypot(lx, ly)  # != 1 only when the error is not normal to the path
    return lx / n, ly / n, theta


def _sign(x: float) -> float:
    return 1.0 if x > 0.0 else -1.0 if x < 0.0 else 0.0


def _triangle(l0x: float, l0y: float, whx: float, why: float, w_star: float,
              v: float, lam: float) -> tuple[float, float, float]:
    """Wind-triangle heading for a desired ground course; returns (hx, hy, y)."""
    arg = w_star * math.sin(lam) / v
    # past the quarter turn in strong wind, the arcsine branch still exists
    # but realizes the opposite ground course: the course is unreachable
    if arg > 1.0 + 1e-12 or (w_star > v and lam >= HALF_PI):
        raise InfeasibleCourse(
            f"course at {lam:.4f} rad from the wind is unreachable "
            f"(w*={w_star:.3f}, airspeed={v:.3f})")
    if arg > 1.0:
        arg = 1.0
    y = math.pi - lam - math.asin(arg)
    side = _sign(whx * l0y - why * l0x) or 1.0
    cy = math.cos(y)
    sy = math.sin(y)
    return (-whx * cy - why * side * sy, side * whx * sy - why * cy, y)


def _shift_amplitude(w_star: float, lam: float, v: float, eps: float) -> float:
    """The (1 + w* cos(lam) / sqrt(v^2 - (w* sin(lam))^2)) bracket, or +inf
    when the square root is within the singularity guard."""
    if w_star <= 1e-12:
        return 1.0
    guard = v * v - (w_star * math.sin(lam)) ** 2
    if guard <= eps * v * v:
        return math.inf
    return 1.0 + w_star * math.cos(lam) / math.sqrt(guard)


def _theta_s(sin_residual: float, vg_norm: float, v: float, w_star: float,
             lam: float, kappa: float, eps: float) -> float:
    if sin_residual < 1e-15 or kappa == 0.0:
        return 0.0
    amp = _shift_amplitude(w_star, lam, v, eps)
    rho = math.inf if math.isinf(amp) else vg_norm * sin_residual / v * amp
    return _sign(kappa) * math.asin(clamp(rho, -1.0, 1.0))


def _theta_s2_factor(w_star: float, lam: float, v: float, eps: float) -> float:
    num = 1.0 - (w_star * math.sin(lam) / v) ** 2
    return math.sqrt(num if num > 0.0 else 0.0) / max(math.cos(lam), eps)


def _antiwind_blend(nu: float, beta: float) -> float:
    cb = math.cos(beta)
    den = math.sqrt(1.0 + cb * cb + 2.0 * cb * math.cos(nu))
    return math.asin(clamp(math.sin(nu) * cb / den, -1.0, 1.0))


# --- hot-loop kernel

# command_scalars returns the flat tuple
#   (ux, uy, ax, ay, regime_code,
#    beta, lam, y, nu, theta_look, d_shift, theta_shift, alpha_out, sigma_safe,
#    l0x, l0y, lx, ly, l1x, l1y)
# with regime_code 0 = slow, 1 = fast1, 2 = fast2.


def command_scalars(ex: float, ey: float, tx: float, ty: float, nx: float,
                    ny: float, kappa: float, hx: float, hy: float, wx: float,
                    wy: float, v: float, params: GuidanceParams,
                    force: int = -1):
    """Full command computation on plain floats.

    (ex, ey) is the error to the footprint, (tx, ty)/(nx, ny)/kappa its frame,
    (hx, hy) the heading, (wx, wy) the wind sample and v the airspeed norm.
    ``force`` pins the regime (0/1/2) for the single-regime entry points;
    -1 dispatches on wind speed and course feasibility.
    """
    k = params.gain
    dbl = params.boundary_layer
    eps = params.eps_singularity
    if abs(kappa) > k:
        raise GainTooSmall(f"|curvature| {abs(kappa):.6g} exceeds gain {k:.6g}")

    en = math.hypot(ex, ey)
    if en < 1e-12:
        l0x, l0y = tx, ty
    else:
        l0x, l0y, _ = _blend(ex, ey, en, tx, ty, dbl)

    d_shift = _radial_shift(kappa, k, dbl)
    dx = ex + d_shift * nx
    dy = ey + d_shift * ny
    dn = math.hypot(dx, dy)
    if dn < 1e-12:
        lx, ly = tx, ty
        theta_look = HALF_PI
    else:
        lx, ly, theta_look = _blend(dx, dy, dn, tx, ty, dbl)

    w_star = math.hypot(wx, wy)
    vgx = v * hx + wx
    vgy = v * hy + wy

    if w_star <= 1e-12:
        # windless: the target heading is the desired course itself
        beta = math.pi
        lam = y = nu = NAN
        regime = 0
        if force in (1, 2):
            raise ValueError("fast regimes need a nonzero wind")
        sin_res = abs(l0x * ly - l0y * lx)
        theta_shift = _theta_s(sin_res, math.hypot(vgx, vgy), v, 0.0, 0.0,
                               kappa, eps)
        l1x, l1y = l0x, l0y
        alpha_out = sigma_safe = NAN
    else:
        whx = wx / w_star
        why = wy / w_star
        beta = math.pi if w_star < v else math.asin(min(v / w_star, 1.0))
        lam = math.acos(clamp(whx * l0x + why * l0y, -1.0, 1.0))
        nu = math.pi - lam
        if force < 0:
            if w_star <= v + params.eps_speed:
                regime = 0
            elif lam <= beta:
                regime = 1
            else:
                regime = 2
        else:
            regime = force
            if regime == 2 and w_star <= v:
                raise ValueError("the infeasible-course command needs w* > airspeed")

        if regime != 2:
            l1x, l1y, y = _triangle(l0x, l0y, whx, why, w_star, v, lam)
            sin_res = abs(l0x * ly - l0y * lx)
            theta_shift = _theta_s(sin_res, math.hypot(vgx, vgy), v, w_star,
                                   lam, kappa, eps)
            if regime == 1:
                theta_shift *= _theta_s2_factor(w_star, lam, v, eps)
            alpha_out = sigma_safe = NAN
        else:
            a = math.sqrt(w_star * w_star - v * v)
            qx = a * l0x - wx
            qy = a * l0y - wy
            qn = math.hypot(qx, qy)
            y = _antiwind_blend(nu, beta)
            alpha_out = (lam - beta) / (math.pi - beta)
            half = HALF_PI - beta
            sigma_safe = 1.0 if half <= eps else (half - y) / half
            theta_shift = NAN
            l1x = l1y = NAN

    if regime != 2:
        c = math.cos(theta_shift)
        s = math.sin(theta_shift)
        ux = k * (c * l1x - s * l1y)
        uy = k * (s * l1x + c * l1y)
    else:
        ux = k * qx / qn
        uy = k * qy / qn

    vmx = v * hx
    vmy = v * hy
    ck = vmx * uy - vmy * ux
    ax = -ck * vmy
    ay = ck * vmx
    return (ux, uy, ax, ay, regime, beta, lam, y, nu, theta_look, d_shift,
            theta_shift, alpha_out, sigma_safe, l0x, l0y, lx, ly, l1x, l1y)


def _box(raw) -> GuidanceOutput:
    (ux, uy, ax, ay, regime, beta, lam, y, nu, theta_look, d_shift,
     theta_shift, alpha_out, sigma_safe, l0x, l0y, lx, ly, l1x, l1y) = raw
    diag = GuidanceDiagnostics(
        regime=_REGIMES[regime], beta=beta, lam=lam, y=y, nu=nu,
        theta_look=theta_look, d_shift=d_shift, theta_shift=theta_shift,
        alpha_out=alpha_out, sigma_safe=sigma_safe,
        course_dir=Vec2(l0x, l0y), look_dir=Vec2(lx, ly),
        heading_target=Vec2(l1x, l1y))
    return GuidanceOutput(Vec2(ux, uy), Vec2(ax, ay), diag)


def _from_footprint(state: VehicleState, footprint: Footprint, w: Vec2,
                    params: GuidanceParams, force: int) -> GuidanceOutput:
    f = footprint.frame
    return _box(command_scalars(
        footprint.error.x, footprint.error.y, f.tangent.x, f.tangent.y,
        f.normal.x, f.normal.y, f.curvature, state.heading.x, state.heading.y,
        w.x, w.y, state.airspeed, params, force))


# --- public operations


def look_ahead(d: Vec2, tangent: UnitVec2, params: GuidanceParams,
               kappa: float) -> tuple[UnitVec2, float, float]:
    """Look-ahead direction for a (shifted) cross-track vector d.

    Blends the cross-track direction into the path tangent as |d| falls
    through the boundary layer; at |d| = 0 the direction is the tangent
    itself. Returns (direction, blend angle, radial shift for this curvature).
    """
    if abs(kappa) > params.gain:
        raise GainTooSmall(f"|curvature| {abs(kappa):.6g} exceeds gain {params.gain:.6g}")
    d_shift = _radial_shift(kappa, params.gain, params.boundary_layer)
    dn = d.norm()
    if dn < 1e-12:
        return tangent, HALF_PI, d_shift
    lx, ly, theta = _blend(d.x, d.y, dn, tangent.x, tangent.y, params.boundary_layer)
    return Vec2(lx, ly), theta, d_shift


def look_ahead_on_error(e: Vec2, tangent: UnitVec2, params: GuidanceParams,
                        kappa: float) -> UnitVec2:
    """Desired ground-course direction: the look-ahead blend applied to the
    raw error instead of the radially shifted distance."""
    if abs(kappa) > params.gain:
        raise GainTooSmall(f"|curvature| {abs(kappa):.6g} exceeds gain {params.gain:.6g}")
    en = e.norm()
    if en < 1e-12:
        return tangent
    lx, ly, _ = _blend(e.x, e.y, en, tangent.x, tangent.y, params.boundary_layer)
    return Vec2(lx, ly)


def feasibility_cone(w: Vec2, airspeed: float) -> float:
    """Half-angle of the cone of reachable ground-course directions, centered
    on the wind: arcsin(airspeed / w*) in strong wind, pi (the whole plane)
    otherwise."""
    w_star = w.norm()
    if w_star < airspeed:
        return math.pi
    return math.asin(min(airspeed / w_star, 1.0))


def solve_wind_triangle(course: UnitVec2, w: Vec2,
                        airspeed: float) -> tuple[UnitVec2, float, float]:
    """Heading whose ground track points along ``course`` under wind ``w``.

    Returns (heading, y, lam) where lam is the wind-to-course angle and y the
    heading's angle from the anti-wind direction. At zero wind the heading is
    the course itself and the angles are undefined (NaN). Raises
    InfeasibleCourse when the course lies outside the feasibility cone.
    """
    w_star = w.norm()
    if w_star <= 1e-12:
        return course, NAN, NAN
    whx, why = w.x / w_star, w.y / w_star
    lam = math.acos(clamp(whx * course.x + why * course.y, -1.0, 1.0))
    hx, hy, y = _triangle(course.x, course.y, whx, why, w_star, airspeed, lam)
    return Vec2(hx, hy), y, lam


def residual_normal_accel(course: UnitVec2, look: UnitVec2, v_g: Vec2,
                          params: GuidanceParams) -> float:
    """Steady-state centripetal acceleration demand on the groundspeed vector:
    gain * |v_G|^2 * |sin(angle(course, look))|."""
    return params.gain * v_g.norm_sq() * abs(cross_k(course, look))


def shift_angle(course: UnitVec2, look: UnitVec2, v_g: Vec2, w: Vec2,
                airspeed: float, kappa: float, params: GuidanceParams) -> float:
    """Curvature shift rotation for the slow regime.

    Signed like the path curvature (zero on straight segments), saturating at
    a quarter turn when the transient demands more residual acceleration than
    the steady state can (including when the wind-triangle root vanishes).
    """
    w_star = w.norm()
    if w_star <= 1e-12:
        lam = 0.0
    else:
        lam = math.acos(clamp((w.x * course.x + w.y * course.y) / w_star, -1.0, 1.0))
    return _theta_s(abs(cross_k(course, look)), v_g.norm(), airspeed, w_star,
                    lam, kappa, params.eps_singularity)


def shift_angle_fast(theta_s: float, lam: float, w_star: float,
                     airspeed: float, eps: float = 1e-9) -> float:
    """Shift rotation for the fast feasible regime: the slow-regime angle
    tapered to zero at the feasibility-cone edge, equal to it at w* = airspeed."""
    return theta_s * _theta_s2_factor(w_star, lam, airspeed, eps)


def infeasible_mapping(nu: float, beta: float) -> float:
    """Command angle from the anti-wind direction as a function of the course
    angle nu = pi - lam, for cone half-angle beta.

    Zero at nu = 0 (course dead downwind -> steer dead upwind) and pi/2 - beta
    at nu = pi - beta (the cone edge), increasing in between.
    """
    return _antiwind_blend(nu, beta)


def infeasibility_indices(lam: float, beta: float, y: float,
                          eps: float = 1e-9) -> tuple[float, float]:
    """(alpha_out, sigma_safe) for an infeasible course.

    alpha_out measures how far outside the cone the course lies (1 at dead
    anti-wind); sigma_safe measures how close the command is to pure anti-wind
    (1 exactly there). At the degenerate cone beta ~ pi/2 the safety index is
    1 by continuity.
    """
    alpha_out = (lam - beta) / (math.pi - beta)
    half = HALF_PI - beta
    sigma_safe = 1.0 if half <= eps else (half - y) / half
    return alpha_out, sigma_safe


def u_slow(state: VehicleState, footprint: Footprint, w: Vec2,
           params: GuidanceParams) -> GuidanceOutput:
    """Slow-regime command (caller ensures w* <= airspeed)."""
    return _from_footprint(state, footprint, w, params, 0)


def u_fast1(state: VehicleState, footprint: Footprint, w: Vec2,
            params: GuidanceParams) -> GuidanceOutput:
    """Fast feasible-course command (caller ensures w* > airspeed, lam <= beta)."""
    return _from_footprint(state, footprint, w, params, 1)


def u_fast2(state: VehicleState, footprint: Footprint, w: Vec2,
            params: GuidanceParams) -> GuidanceOutput:
    """Fast infeasible-course command (caller ensures w* > airspeed)."""
    return _from_footprint(state, footprint, w, params, 2)


def command_from_footprint(state: VehicleState, footprint: Footprint, w: Vec2,
                           params: GuidanceParams) -> GuidanceOutput:
    """Regime dispatch on an already-computed footprint."""
    return _from_footprint(state, footprint, w, params, -1)


def guidance_step(state: VehicleState, path: PathModel, w: Vec2,
                  params: GuidanceParams,
                  previous: Footprint | None = None) -> GuidanceOutput:
    """Project onto the path and dispatch to the active regime.

    On a degenerate projection the caller-supplied previous footprint is
    reused; without one the projection error propagates.
    """
    try:
        footprint = path.project(state.r)
    except Exception:
        if previous is None:
            raise
        footprint = previous
    return _from_footprint(state, footprint, w, params, -1)


def gain_lower_bound(max_abs_curvature: float, max_wind: float,
                     airspeed: float) -> float:
    """Smallest gain that keeps zero steady-state error in the worst case of
    the wind blowing along the desired course: (1 + w*/v)^2 * max|curvature|."""
    return (1.0 + max_wind / airspeed) ** 2 * max_abs_curvature
