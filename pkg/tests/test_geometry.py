import math
import random

import pytest

from windward.geometry import (Vec2, angle_between, cross_k, rot,
                               triple_product_dir)


def test_rot_identity():
    v = rot(Vec2(1.0, 0.0), 0.0)
    assert v == Vec2(1.0, 0.0)


def test_rot_quarter_turn_is_counterclockwise():
    v = rot(Vec2(1.0, 0.0), math.pi / 2)
    assert abs(v.x) < 1e-15
    assert v.y == pytest.approx(1.0, abs=1e-15)


def test_rot_preserves_norm():
    rng = random.Random(1)
    a = Vec2(0.6, 0.8)
    for _ in range(1000):
        theta = rng.uniform(-20.0, 20.0)
        assert rot(a, theta).norm() == pytest.approx(1.0, rel=1e-12)


def test_rot_additivity():
    rng = random.Random(2)
    for _ in range(200):
        a = Vec2(rng.uniform(-5, 5), rng.uniform(-5, 5))
        t1, t2 = rng.uniform(-7, 7), rng.uniform(-7, 7)
        once = rot(a, t1 + t2)
        twice = rot(rot(a, t1), t2)
        assert (once - twice).norm() < 1e-10


def test_cross_k_examples():
    assert cross_k(Vec2(1, 0), Vec2(0, 1)) == 1.0
    a = Vec2(3.7, -1.2)
    assert cross_k(a, a) == 0.0
    assert cross_k(Vec2(2, 0), Vec2(1, 1)) == 2.0


def test_angle_between_examples():
    v = Vec2(0.6, 0.8)
    assert angle_between(v, v) == 0.0
    assert angle_between(Vec2(1, 0), Vec2(-1, 0)) == pytest.approx(math.pi)
    assert angle_between(Vec2(1, 0), Vec2(0, 1)) == pytest.approx(math.pi / 2)


def test_angle_between_symmetric_and_clamped():
    rng = random.Random(3)
    for _ in range(200):
        t1, t2 = rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi)
        a = Vec2(math.cos(t1), math.sin(t1))
        b = Vec2(math.cos(t2), math.sin(t2))
        assert angle_between(a, b) == angle_between(b, a)
    # nearly-identical unit vectors must not produce NaN from acos drift;
    # the result is zero up to the acos precision floor
    a = Vec2(1.0, 1.0).normalized()
    assert angle_between(a, a) < 1e-7


def test_triple_product_parallel_vanishes():
    v = Vec2(2.0, -3.0)
    assert triple_product_dir(v, v) == Vec2(0.0, 0.0)


def test_triple_product_matches_expansion():
    # (v x u) x v == u|v|^2 - v (v.u)
    rng = random.Random(4)
    for _ in range(500):
        v = Vec2(rng.uniform(-5, 5), rng.uniform(-5, 5))
        u = Vec2(rng.uniform(-5, 5), rng.uniform(-5, 5))
        got = triple_product_dir(v, u)
        want = u * v.norm_sq() - v * v.dot(u)
        assert (got - want).norm() < 1e-10 * max(1.0, v.norm_sq() * u.norm())
    assert triple_product_dir(Vec2(1, 0), Vec2(0, 1)) == Vec2(0.0, 1.0)


def test_triple_product_orthogonal_to_first_argument():
    rng = random.Random(5)
    for _ in range(1000):
        v = Vec2(rng.uniform(-10, 10), rng.uniform(-10, 10))
        u = Vec2(rng.uniform(-10, 10), rng.uniform(-10, 10))
        d = triple_product_dir(v, u).dot(v)
        assert abs(d) <= 1e-10 * max(1.0, v.norm_sq() * u.norm())


def test_normalized_rejects_zero():
    with pytest.raises(ValueError):
        Vec2(0.0, 0.0).normalized()


def test_vec2_arithmetic():
    a, b = Vec2(1.0, 2.0), Vec2(-3.0, 5.0)
    assert a + b == Vec2(-2.0, 7.0)
    assert a - b == Vec2(4.0, -3.0)
    assert a * 2.0 == Vec2(2.0, 4.0)
    assert 2.0 * a == Vec2(2.0, 4.0)
    assert -a == Vec2(-1.0, -2.0)
    assert a.perp() == Vec2(-2.0, 1.0)
    assert a.dot(b) == 7.0
