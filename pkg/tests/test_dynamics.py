import math

import pytest

from windward.dynamics import IntegratorConfig, VehicleState, derivatives, step
from windward.geometry import Vec2
from windward.wind import ConstantWind


CALM = ConstantWind(Vec2(0.0, 0.0))


def test_derivatives_straight_flight():
    state = VehicleState(Vec2(0, 0), Vec2(1, 0), 14.0)
    dr, dT = derivatives(state, Vec2(0, 0), Vec2(0, 0))
    assert dr == Vec2(14.0, 0.0)
    assert dT == Vec2(0.0, 0.0)


def test_derivatives_superpose_wind():
    state = VehicleState(Vec2(0, 0), Vec2(0, 1), 14.0)
    dr, _ = derivatives(state, Vec2(0, 0), Vec2(5.0, 0.0))
    assert dr == Vec2(5.0, 14.0)


def test_step_advances_along_heading():
    state = VehicleState(Vec2(0, 0), Vec2(1, 0), 14.0)
    nxt = step(state, Vec2(0, 0), CALM, 0.0, IntegratorConfig(1.0))
    assert (nxt.r - Vec2(14.0, 0.0)).norm() < 1e-12
    assert nxt.heading == state.heading


def test_step_perpendicular_accel_rotates_heading():
    v = 14.0
    a = Vec2(0.0, 7.0)  # perpendicular to the +x heading
    state = VehicleState(Vec2(0, 0), Vec2(1, 0), v)
    dt = 0.01
    nxt = step(state, a, CALM, 0.0, IntegratorConfig(dt))
    got = math.atan2(nxt.heading.y, nxt.heading.x)
    assert got == pytest.approx(dt * a.norm() / v, abs=1e-6)


def test_step_heading_stays_unit():
    state = VehicleState(Vec2(0, 0), Vec2(1, 0), 14.0)
    cfg = IntegratorConfig(0.05)
    for i in range(500):
        state = step(state, Vec2(0.0, 5.0), CALM, i * cfg.dt, cfg)
        assert abs(state.heading.norm() - 1.0) <= 1e-9


def test_unforced_trajectory_is_a_line():
    state = VehicleState(Vec2(1.0, 2.0), Vec2(0.6, 0.8), 10.0)
    cfg = IntegratorConfig(0.5)
    for i in range(100):
        state = step(state, Vec2(0, 0), CALM, i * cfg.dt, cfg)
    t = 100 * 0.5
    want = Vec2(1.0 + 6.0 * t, 2.0 + 8.0 * t)
    assert (state.r - want).norm() < 1e-12 * 100


def test_euler_and_rk4_agree_for_constant_rhs():
    state = VehicleState(Vec2(0, 0), Vec2(1, 0), 14.0)
    w = ConstantWind(Vec2(3.0, -1.0))
    cfg_e = IntegratorConfig(0.25, "euler")
    cfg_r = IntegratorConfig(0.25, "rk4")
    # with zero accel and constant wind both methods integrate exactly
    a = step(state, Vec2(0, 0), w, 0.0, cfg_e)
    b = step(state, Vec2(0, 0), w, 0.0, cfg_r)
    assert (a.r - b.r).norm() < 1e-12


def test_state_renormalizes_heading():
    st = VehicleState(Vec2(0, 0), Vec2(3.0, 4.0), 14.0)
    assert st.heading.norm() == pytest.approx(1.0, abs=1e-15)
    assert st.heading.x == pytest.approx(0.6)


def test_validation():
    with pytest.raises(ValueError):
        VehicleState(Vec2(0, 0), Vec2(1, 0), 0.0)
    with pytest.raises(ValueError):
        VehicleState(Vec2(0, 0), Vec2(0, 0), 14.0)
    with pytest.raises(ValueError):
        IntegratorConfig(0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(0.1, "rk45")
