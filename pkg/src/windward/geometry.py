"""Planar vector algebra and angle utilities.

Everything lives in the horizontal plane. The vertical axis exists only
implicitly: cross products return their out-of-plane component as a scalar,
and rotations are counterclockwise-positive (right-hand rule about the
implicit up axis).
"""

from __future__ import annotations

import math
from typing import NamedTuple


class Vec2(NamedTuple):
    """Planar vector. Units are contextual (m, m/s, or unitless direction)."""

    x: float
    y: float

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def norm_sq(self) -> float:
        return self.x * self.x + self.y * self.y

    def normalized(self) -> "Vec2":
        """Unit vector along self. Raises ValueError on (near-)zero input."""
        n = math.hypot(self.x, self.y)
        if n < 1e-300:
            raise ValueError("cannot normalize a zero vector")
        return Vec2(self.x / n, self.y / n)

    def perp(self) -> "Vec2":
        """Left-hand perpendicular, i.e. rotation by +pi/2."""
        return Vec2(-self.y, self.x)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


# Unit vectors are ordinary Vec2 values kept at unit norm by construction
# (normalized() at creation; rot() preserves norm). The alias documents intent.
UnitVec2 = Vec2


def rot(a: Vec2, theta: float) -> Vec2:
    """Rotate a counterclockwise by theta radians. Norm-preserving."""
    c = math.cos(theta)
    s = math.sin(theta)
    return Vec2(c * a.x - s * a.y, s * a.x + c * a.y)


def cross_k(a: Vec2, b: Vec2) -> float:
    """Out-of-plane component of the cross product a x b."""
    return a.x * b.y - a.y * b.x


def clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


def angle_between(a: UnitVec2, b: UnitVec2) -> float:
    """Unsigned angle in [0, pi] between unit vectors.

    The dot product is clamped to [-1, 1] so floating-point drift at exactly
    aligned or opposed inputs cannot produce NaN.
    """
    return math.acos(clamp(a.dot(b), -1.0, 1.0))


def triple_product_dir(v: Vec2, u: Vec2) -> Vec2:
    """The planar vector (v x u) x v.

    Equals the component of u orthogonal to v scaled by |v|^2; the result is
    exactly orthogonal to v by construction.
    """
    ck = v.x * u.y - v.y * u.x
    return Vec2(-ck * v.y, ck * v.x)
