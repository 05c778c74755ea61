import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conic_bernstein import geometry as geo


def random_surface_rows(rng, d, count):
    t = rng.uniform(0.02, 0.98, count)
    xi = rng.normal(size=(count, d))
    xi /= np.linalg.norm(xi, axis=1, keepdims=True)
    return t[:, None] * xi, t


def test_conic_point_membership():
    p = geo.ConicPoint((0.3, 0.4), 0.5)
    assert p.t == 0.5
    with pytest.raises(ValueError):
        geo.ConicPoint((0.3, 0.4), 0.6)  # ||x|| != t on the surface
    geo.ConicPoint((0.1, 0.2), 0.6, kind="solid")
    with pytest.raises(ValueError):
        geo.ConicPoint((0.5, 0.5), 0.6, kind="solid")  # outside the cone
    with pytest.raises(ValueError):
        geo.ConicPoint((1.0, 0.0), 1.2)


def test_dist_interval_endpoints():
    assert geo.dist_interval(0.0, 1.0) == pytest.approx(math.pi / 2)
    assert geo.dist_interval(0.3, 0.3) == pytest.approx(0.0, abs=1e-7)
    # arccos formula reduces to |arcsin sqrt t - arcsin sqrt s|
    t, s = 0.7, 0.2
    ref = abs(math.asin(math.sqrt(t)) - math.asin(math.sqrt(s)))
    assert geo.dist_interval(t, s) == pytest.approx(ref, rel=1e-12)


def test_dist_sphere_requires_unit_vectors():
    with pytest.raises(ValueError):
        geo.dist_sphere(np.array([0.5, 0.0]), np.array([1.0, 0.0]))
    v = np.array([1.0, 0.0])
    w = np.array([0.0, 1.0])
    assert geo.dist_sphere(v, w) == pytest.approx(math.pi / 2)


def test_dist_surface_on_common_ray():
    # along one ray the surface metric restricts to the interval metric
    xi = np.array([0.6, 0.8])
    t, s = 0.9, 0.3
    d1 = geo.dist_surface((t * xi, t), (s * xi, s))
    assert d1 == pytest.approx(float(geo.dist_interval(t, s)), rel=1e-10)


def test_dist_cone_matches_lifted_surface_distance():
    rng = np.random.default_rng(7)
    for _ in range(25):
        t, s = rng.uniform(0.05, 0.95, 2)
        u, v = rng.normal(size=(2, 2))
        u *= rng.uniform(0, 0.99) * t / np.linalg.norm(u)
        v *= rng.uniform(0, 0.99) * s / np.linalg.norm(v)
        direct = float(geo.dist_cone((u, t), (v, s)))
        lifted = float(
            geo.dist_surface(
                (geo.lift_coords(u, t), t),
                (geo.lift_coords(v, s), s),
            )
        )
        assert direct == pytest.approx(lifted, abs=1e-12)


def test_dist_ball_is_hemisphere_geodesic():
    u = np.array([0.3, 0.0])
    v = np.array([-0.4, 0.1])
    lift_u = np.concatenate([u, [math.sqrt(1 - u @ u)]])
    lift_v = np.concatenate([v, [math.sqrt(1 - v @ v)]])
    assert float(geo.dist_ball(u, v)) == pytest.approx(
        float(geo.dist_sphere(lift_u, lift_v)), rel=1e-12
    )


@settings(max_examples=50, deadline=None)
@given(data=st.data())
def test_surface_distance_triangle_inequality(data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    x, t = random_surface_rows(rng, 2, 3)
    d01 = float(geo.dist_surface((x[0], t[0]), (x[1], t[1])))
    d12 = float(geo.dist_surface((x[1], t[1]), (x[2], t[2])))
    d02 = float(geo.dist_surface((x[0], t[0]), (x[2], t[2])))
    assert d02 <= d01 + d12 + 1e-10
    assert d01 >= 0.0


def test_weight_eval_surface_and_flags():
    w = geo.WeightSpec.surface(2, -1.0, 2.0)
    pts = np.array([[0.25, 0.0, 0.25], [0.0, 0.0, 0.0]])
    vals = geo.weight_eval(w, pts)
    assert vals[0] == pytest.approx((1 / 0.25) * (0.75) ** 2, rel=1e-14)
    assert np.isinf(vals[1])  # apex hit with a negative exponent flags as inf


def test_weight_eval_cone_closed_form():
    w = geo.WeightSpec.cone(2, 1.0, 0.5)
    pt = np.array([[0.1, 0.2, 0.6]])
    phi2 = 0.6**2 - (0.1**2 + 0.2**2)
    ref = phi2 ** (1.0 - 0.5) * (1 - 0.6) ** 0.5
    assert geo.weight_eval(w, pt)[0] == pytest.approx(ref, rel=1e-14)


def test_weight_eval_triangle_closed_form():
    w = geo.WeightSpec.triangle(0.5, 0.0, 2.0)
    pt = np.array([[0.2, 0.3]])
    ref = 0.2**0.5 * 1.0 * (1 - 0.5) ** 2
    assert geo.weight_eval(w, pt)[0] == pytest.approx(ref, rel=1e-14)


def test_weight_spec_validation():
    with pytest.raises(ValueError):
        geo.WeightSpec.surface(1, -1.0, 0.0)
    with pytest.raises(ValueError):
        geo.WeightSpec.cone(2, -0.5, 0.0)
    with pytest.raises(ValueError):
        geo.WeightSpec.triangle(-1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        geo.WeightSpec.interval(-2.0, 0.0)


def test_ball_measure_proxy_degenerates_correctly():
    # gamma = -1/2, d = 2 makes the proxy identically 1
    vals = geo.ball_measure_proxy(8, np.array([0.1, 0.9]), -0.5, 2)
    assert np.allclose(vals, 1.0)
    with pytest.raises(ValueError):
        geo.ball_measure_proxy(0, 0.5, 0.0, 2)


def test_lift_membership_and_mirror():
    p = geo.lift((np.array([0.3, 0.0]), 0.5))
    assert p.X[-1] == pytest.approx(0.4, rel=1e-12)
    m = geo.lift((np.array([0.3, 0.0]), 0.5), mirrored=True)
    assert m.X[-1] == pytest.approx(-0.4, rel=1e-12)
    assert p.as_surface_point().t == 0.5


def test_triangle_chart_roundtrip():
    rng = np.random.default_rng(3)
    y1 = rng.uniform(0, 1, 50)
    y2 = rng.uniform(0, 1, 50) * (1 - y1)
    y = np.column_stack([y1, y2])
    back = geo.triangle_map_inverse(geo.triangle_map(y))
    assert np.allclose(back, y, atol=1e-14)
    with pytest.raises(ValueError):
        geo.triangle_map(np.array([0.8, 0.5]))


def test_safe_arccos_rejects_garbage():
    with pytest.raises(ValueError):
        geo.dist_ball(np.array([2.0, 0.0]), np.array([0.0, 0.0]))
