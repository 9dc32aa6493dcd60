"""Desired-path models: closest-point projection and Frenet frame queries.

Frame conventions, fixed across the whole library:

* the stored normal always points toward the center of curvature, so the
  tangent's arc-length derivative is ``|curvature| * normal``;
* the sign of the stored curvature encodes turn direction: positive when the
  normal is the left perpendicular of the tangent (counterclockwise paths),
  negative when it is the right perpendicular (clockwise paths);
* torsion is identically zero (planar curves);
* the curve parameter is arc length from the path origin.

Projection returns the global closest point. The error vector points from the
query position to the path.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

from .geometry import UnitVec2, Vec2, cross_k

TWO_PI = 2.0 * math.pi

# (px, py, ex, ey, tx, ty, nx, ny, kappa, l): plain-float projection result
# used by the simulation hot loop; Footprint is the boxed equivalent.
ProjScalars = tuple[float, float, float, float, float, float, float, float, float, float]


class DegenerateProjection(Exception):
    """Closest point undefined (query at a circle center or on a point path)."""


class FrenetSingularity(Exception):
    """Footprint speed undefined: vehicle at the path's center of curvature."""


@dataclass(frozen=True)
class FrenetFrame:
    point: Vec2
    tangent: UnitVec2
    normal: UnitVec2
    curvature: float
    torsion: float = 0.0


@dataclass(frozen=True)
class Footprint:
    """Closest path point with its frame; error = frame.point - query point."""

    frame: FrenetFrame
    error: Vec2
    param: float


class PathModel(ABC):
    """Immutable parametric planar curve with projection and frame queries."""

    @abstractmethod
    def project_scalars(self, x: float, y: float) -> ProjScalars:
        """Closest-point projection returning plain floats (hot-loop form)."""

    @abstractmethod
    def frame_at(self, l: float) -> FrenetFrame:
        """Frenet frame at arc-length parameter l."""

    @abstractmethod
    def max_abs_curvature(self) -> float:
        """Largest |curvature| anywhere on the path (gain-condition checks)."""

    def project(self, r_m: Vec2) -> Footprint:
        px, py, ex, ey, tx, ty, nx, ny, kappa, l = self.project_scalars(r_m.x, r_m.y)
        frame = FrenetFrame(Vec2(px, py), Vec2(tx, ty), Vec2(nx, ny), kappa)
        return Footprint(frame, Vec2(ex, ey), l)


class Line(PathModel):
    """Straight path through an anchor point.

    Infinite by default; pass a finite ``length`` to clamp the parameter to
    [0, length] (projection beyond an end uses that endpoint with the line's
    tangent).
    """

    def __init__(self, anchor: Vec2, direction: Vec2, length: float | None = None):
        self.anchor = Vec2(*anchor)
        self.direction = Vec2(*direction).normalized()
        if length is not None and length <= 0.0:
            raise ValueError("finite line length must be positive")
        self.length = length
        # curvature 0 falls in the >= 0 branch of the sign convention
        self._normal = self.direction.perp()

    @property
    def infinite(self) -> bool:
        return self.length is None

    def project_scalars(self, x: float, y: float) -> ProjScalars:
        ax, ay = self.anchor
        dx, dy = self.direction
        l = (x - ax) * dx + (y - ay) * dy
        if self.length is not None:
            l = min(max(l, 0.0), self.length)
        px, py = ax + l * dx, ay + l * dy
        return px, py, px - x, py - y, dx, dy, self._normal.x, self._normal.y, 0.0, l

    def frame_at(self, l: float) -> FrenetFrame:
        if self.length is not None:
            l = min(max(l, 0.0), self.length)
        return FrenetFrame(self.anchor + l * self.direction, self.direction, self._normal, 0.0)

    def max_abs_curvature(self) -> float:
        return 0.0


class Circle(PathModel):
    """Circular path. Curvature is +1/R counterclockwise, -1/R clockwise.

    The arc-length origin is the point at angle 0 from the center; the
    parameter advances along the traversal direction.
    """

    def __init__(self, center: Vec2, radius: float, ccw: bool = True):
        if radius <= 0.0:
            raise ValueError("circle radius must be positive")
        self.center = Vec2(*center)
        self.radius = float(radius)
        self.ccw = bool(ccw)

    def project_scalars(self, x: float, y: float) -> ProjScalars:
        cx, cy = self.center
        rx, ry = x - cx, y - cy
        n = math.hypot(rx, ry)
        if n < 1e-9:
            raise DegenerateProjection("query point at circle center")
        ux, uy = rx / n, ry / n
        R = self.radius
        px, py = cx + R * ux, cy + R * uy
        phi = math.atan2(uy, ux)
        if self.ccw:
            tx, ty = -uy, ux
            kappa = 1.0 / R
            l = (phi % TWO_PI) * R
        else:
            tx, ty = uy, -ux
            kappa = -1.0 / R
            l = ((-phi) % TWO_PI) * R
        return px, py, px - x, py - y, tx, ty, -ux, -uy, kappa, l

    def frame_at(self, l: float) -> FrenetFrame:
        R = self.radius
        phi = l / R if self.ccw else -l / R
        ux, uy = math.cos(phi), math.sin(phi)
        if self.ccw:
            tangent = Vec2(-uy, ux)
            kappa = 1.0 / R
        else:
            tangent = Vec2(uy, -ux)
            kappa = -1.0 / R
        return FrenetFrame(self.center + R * Vec2(ux, uy), tangent, Vec2(-ux, -uy), kappa)

    def max_abs_curvature(self) -> float:
        return 1.0 / self.radius


class SinglePoint(PathModel):
    """Degenerate path consisting of one point.

    The frame is built from the error direction: the normal points from the
    path point back toward the query position (so the error lies along the
    negative normal), the tangent is its left perpendicular, and the
    curvature is zero. Far from the point this makes the error-based
    look-ahead reduce to the pure error direction.
    """

    def __init__(self, point: Vec2):
        self.point = Vec2(*point)

    def project_scalars(self, x: float, y: float) -> ProjScalars:
        px, py = self.point
        ex, ey = px - x, py - y
        n = math.hypot(ex, ey)
        if n < 1e-9:
            raise DegenerateProjection("query point coincides with the point path")
        ux, uy = ex / n, ey / n  # unit error direction
        # tangent = rot(e_hat, +pi/2); normal = rot(tangent, +pi/2) = -e_hat
        return px, py, ex, ey, -uy, ux, -ux, -uy, 0.0, 0.0

    def frame_at(self, l: float) -> FrenetFrame:
        raise DegenerateProjection("a point path has no parametric frame")

    def max_abs_curvature(self) -> float:
        return 0.0


class LineSegment:
    """Straight chain piece from start to end."""

    def __init__(self, start: Vec2, end: Vec2):
        self.start = Vec2(*start)
        self.end = Vec2(*end)
        chord = self.end - self.start
        self.length = chord.norm()
        if self.length < 1e-12:
            raise ValueError("zero-length segment")
        self.tangent = chord.normalized()
        self._normal = self.tangent.perp()

    def start_tangent(self) -> Vec2:
        return self.tangent

    def end_tangent(self) -> Vec2:
        return self.tangent

    def project_scalars(self, x: float, y: float) -> ProjScalars:
        ax, ay = self.start
        dx, dy = self.tangent
        l = min(max((x - ax) * dx + (y - ay) * dy, 0.0), self.length)
        px, py = ax + l * dx, ay + l * dy
        return px, py, px - x, py - y, dx, dy, self._normal.x, self._normal.y, 0.0, l

    def frame_at(self, l: float) -> FrenetFrame:
        l = min(max(l, 0.0), self.length)
        return FrenetFrame(self.start + l * self.tangent, self.tangent, self._normal, 0.0)

    def max_abs_curvature(self) -> float:
        return 0.0


class ArcSegment:
    """Circular-arc chain piece: sweep_angle > 0 radians from start_angle,
    traversed counterclockwise or clockwise."""

    def __init__(self, center: Vec2, radius: float, start_angle: float,
                 sweep_angle: float, ccw: bool = True):
        if radius <= 0.0:
            raise ValueError("arc radius must be positive")
        if not 0.0 < sweep_angle <= TWO_PI:
            raise ValueError("arc sweep must be in (0, 2*pi]")
        self.center = Vec2(*center)
        self.radius = float(radius)
        self.start_angle = float(start_angle)
        self.sweep_angle = float(sweep_angle)
        self.ccw = bool(ccw)
        self.length = radius * sweep_angle

    def _angle_at(self, l: float) -> float:
        d = l / self.radius
        return self.start_angle + d if self.ccw else self.start_angle - d

    @property
    def start(self) -> Vec2:
        return self.frame_at(0.0).point

    @property
    def end(self) -> Vec2:
        return self.frame_at(self.length).point

    def start_tangent(self) -> Vec2:
        return self.frame_at(0.0).tangent

    def end_tangent(self) -> Vec2:
        return self.frame_at(self.length).tangent

    def frame_at(self, l: float) -> FrenetFrame:
        l = min(max(l, 0.0), self.length)
        phi = self._angle_at(l)
        ux, uy = math.cos(phi), math.sin(phi)
        if self.ccw:
            tangent = Vec2(-uy, ux)
            kappa = 1.0 / self.radius
        else:
            tangent = Vec2(uy, -ux)
            kappa = -1.0 / self.radius
        return FrenetFrame(self.center + self.radius * Vec2(ux, uy), tangent,
                           Vec2(-ux, -uy), kappa)

    def project_scalars(self, x: float, y: float) -> ProjScalars:
        cx, cy = self.center
        rx, ry = x - cx, y - cy
        n = math.hypot(rx, ry)
        if n < 1e-9:
            raise DegenerateProjection("query point at arc center")
        phi = math.atan2(ry, rx)
        delta = (phi - self.start_angle) % TWO_PI if self.ccw \
            else (self.start_angle - phi) % TWO_PI
        if delta <= self.sweep_angle:
            l = delta * self.radius
        else:
            # off the swept sector: closer endpoint wins
            d0 = (self.start - Vec2(x, y)).norm()
            d1 = (self.end - Vec2(x, y)).norm()
            l = 0.0 if d0 <= d1 else self.length
        f = self.frame_at(l)
        return (f.point.x, f.point.y, f.point.x - x, f.point.y - y,
                f.tangent.x, f.tangent.y, f.normal.x, f.normal.y, f.curvature, l)

    def max_abs_curvature(self) -> float:
        return 1.0 / self.radius


Segment = LineSegment | ArcSegment

_G1_GAP_TOL = 1e-6       # m
_G1_ANGLE_TOL = 1e-6     # rad


class ArcChain(PathModel):
    """Tangent-continuous chain of line and arc segments, open or closed.

    Consecutive segments must share their endpoint to within 1e-6 m and their
    tangent direction to within 1e-6 rad; closed chains additionally join the
    last segment back to the first. Equidistant projections break ties toward
    the lowest segment index.
    """

    def __init__(self, segments: list, closed: bool = False):
        if not segments:
            raise ValueError("arc chain needs at least one segment")
        self.segments: list[Segment] = list(segments)
        self.closed = bool(closed)
        pairs = list(zip(self.segments, self.segments[1:]))
        if self.closed:
            pairs.append((self.segments[-1], self.segments[0]))
        for i, (a, b) in enumerate(pairs):
            gap = (b.start - a.end).norm()
            if gap > _G1_GAP_TOL:
                raise ValueError(f"segments {i} and {i + 1} leave a {gap:.3g} m gap")
            bend = math.atan2(abs(cross_k(a.end_tangent(), b.start_tangent())),
                              a.end_tangent().dot(b.start_tangent()))
            if bend > _G1_ANGLE_TOL:
                raise ValueError(f"segments {i} and {i + 1} bend by {bend:.3g} rad")
        self._offsets = []
        total = 0.0
        for seg in self.segments:
            self._offsets.append(total)
            total += seg.length
        self.total_length = total

    def project_scalars(self, x: float, y: float) -> ProjScalars:
        best = None
        best_d2 = math.inf
        for seg, off in zip(self.segments, self._offsets):
            cand = seg.project_scalars(x, y)
            d2 = cand[2] * cand[2] + cand[3] * cand[3]
            if d2 < best_d2:
                best_d2 = d2
                best = cand[:9] + (off + cand[9],)
        return best

    def frame_at(self, l: float) -> FrenetFrame:
        if self.closed:
            l %= self.total_length
        l = min(max(l, 0.0), self.total_length)
        for seg, off in zip(reversed(self.segments), reversed(self._offsets)):
            if l >= off:
                return seg.frame_at(l - off)
        return self.segments[0].frame_at(0.0)

    def max_abs_curvature(self) -> float:
        return max(seg.max_abs_curvature() for seg in self.segments)


def s_dot(frame: FrenetFrame, e: Vec2, v_g: Vec2) -> float:
    """Arc-length speed of the footprint for groundspeed v_g.

    Uses |curvature| with the center-pointing stored normal (the Frenet-frame
    convention of this library); the denominator vanishes when the vehicle
    sits at the path's center of curvature.
    """
    denom = 1.0 + abs(frame.curvature) * e.dot(frame.normal)
    if abs(denom) <= 1e-9:
        raise FrenetSingularity("vehicle at the path's center of curvature")
    return v_g.dot(frame.tangent) / denom
