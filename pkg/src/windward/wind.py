"""Flowfield models sampled by the guidance loop and the integrator.

The guidance law treats each sample as a constant wind for that control
instant (quasi-static assumption); time variation enters only through
resampling. A zero wind vector is a legal sample.
"""

from __future__ import annotations

import math
from bisect import bisect_left

from .geometry import UnitVec2, Vec2


class WindModel:
    def sample(self, t: float) -> Vec2:
        raise NotImplementedError

    def max_speed(self) -> float:
        """Upper bound on |w(t)| over all t, used by gain-condition checks."""
        raise NotImplementedError


class ConstantWind(WindModel):
    def __init__(self, w: Vec2):
        self.w = Vec2(*w)

    def sample(self, t: float) -> Vec2:
        return self.w

    def max_speed(self) -> float:
        return self.w.norm()


class SinusoidalWind(WindModel):
    """w(t) = amplitude * sin(pulsation * t) * direction."""

    def __init__(self, amplitude: float, pulsation: float, direction: UnitVec2):
        if amplitude < 0.0:
            raise ValueError("wind amplitude must be non-negative")
        if pulsation <= 0.0:
            raise ValueError("wind pulsation must be positive")
        self.amplitude = float(amplitude)
        self.pulsation = float(pulsation)
        self.direction = Vec2(*direction).normalized()

    def sample(self, t: float) -> Vec2:
        return self.direction * (self.amplitude * math.sin(self.pulsation * t))

    def max_speed(self) -> float:
        return self.amplitude


class PiecewiseConstantWind(WindModel):
    """Left-continuous step wind: breakpoint i takes effect just after its
    time, so the sample at a breakpoint instant is still the previous value."""

    def __init__(self, breakpoints: list[tuple[float, Vec2]]):
        if not breakpoints:
            raise ValueError("need at least one breakpoint")
        times = [t for t, _ in breakpoints]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("breakpoint times must be strictly increasing")
        self.times = times
        self.values = [Vec2(*w) for _, w in breakpoints]

    def sample(self, t: float) -> Vec2:
        if t <= self.times[0]:
            return self.values[0]
        # largest i with times[i] < t
        return self.values[bisect_left(self.times, t) - 1]

    def max_speed(self) -> float:
        return max(v.norm() for v in self.values)
