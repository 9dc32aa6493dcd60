"""Kinematics of the constant-airspeed vehicle under a normal-acceleration
command: the position moves with heading times airspeed plus wind, and the
heading direction rotates at accel / airspeed.

The heading is stored as a unit vector rather than an angle; it is
renormalized after every step, so the airspeed norm never drifts. ``step``
holds the acceleration constant across the step (zero-order hold) while
sampling the wind at the substage times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .geometry import UnitVec2, Vec2
from .wind import WindModel


@dataclass(frozen=True)
class VehicleState:
    r: Vec2                # position, m
    heading: UnitVec2      # airspeed direction
    airspeed: float        # m/s, constant over a run

    def __post_init__(self):
        if self.airspeed <= 0.0:
            raise ValueError("airspeed must be positive")
        n = self.heading.norm()
        if not 0.0 < n < math.inf:
            raise ValueError("heading must be a nonzero finite vector")
        if abs(n - 1.0) > 1e-12:
            object.__setattr__(self, "heading", Vec2(self.heading.x / n, self.heading.y / n))

    def ground_velocity(self, w: Vec2) -> Vec2:
        return Vec2(self.airspeed * self.heading.x + w.x,
                    self.airspeed * self.heading.y + w.y)


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    method: Literal["rk4", "euler"] = "rk4"

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.method not in ("rk4", "euler"):
            raise ValueError(f"unknown integration method {self.method!r}")


def derivatives(state: VehicleState, accel: Vec2, w: Vec2) -> tuple[Vec2, Vec2]:
    """(position rate, heading rate) for a given acceleration and wind sample."""
    v = state.airspeed
    return (Vec2(v * state.heading.x + w.x, v * state.heading.y + w.y),
            Vec2(accel.x / v, accel.y / v))


def step(state: VehicleState, accel: Vec2, wind: WindModel, t: float,
         cfg: IntegratorConfig) -> VehicleState:
    """Advance one step with the command held constant across the step."""
    dt = cfg.dt
    v = state.airspeed
    x, y = state.r
    hx, hy = state.heading
    dhx, dhy = accel.x / v, accel.y / v
    if cfg.method == "euler":
        w = wind.sample(t)
        x += dt * (v * hx + w.x)
        y += dt * (v * hy + w.y)
        hx += dt * dhx
        hy += dt * dhy
    else:
        w0 = wind.sample(t)
        wm = wind.sample(t + 0.5 * dt)
        w1 = wind.sample(t + dt)
        # heading stages (heading ODE has a constant right-hand side here)
        h2x, h2y = hx + 0.5 * dt * dhx, hy + 0.5 * dt * dhy
        h4x, h4y = hx + dt * dhx, hy + dt * dhy
        x += dt / 6.0 * (v * (hx + 4.0 * h2x + h4x)
                         + w0.x + 4.0 * wm.x + w1.x)
        y += dt / 6.0 * (v * (hy + 4.0 * h2y + h4y)
                         + w0.y + 4.0 * wm.y + w1.y)
        hx, hy = h4x, h4y
    n = math.hypot(hx, hy)
    return VehicleState(Vec2(x, y), Vec2(hx / n, hy / n), v)
