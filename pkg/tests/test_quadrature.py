import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from conic_bernstein import quadrature as quad


def sphere_area(k: int) -> float:
    """Surface area of S^{k-1} in R^k."""
    return 2.0 * math.pi ** (k / 2.0) / special.gamma(k / 2.0)


def test_gauss_jacobi_matches_scipy():
    for k, a, b in [(5, 0.0, 0.0), (9, -0.5, 2.0), (12, 1.5, -0.25)]:
        x, w = quad.gauss_jacobi(k, a, b)
        xr, wr = special.roots_jacobi(k, a, b)
        order = np.argsort(xr)
        assert np.allclose(np.sort(x), xr[order], atol=1e-13)
        assert np.allclose(w[np.argsort(x)], wr[order], rtol=1e-12)


def test_gauss_jacobi01_moments():
    # integral_0^1 t^{k+p} (1-t)^q dt = B(k+p+1, q+1)
    p, q = -0.5, 2.0
    t, w = quad.gauss_jacobi01(10, p, q)
    assert np.all(np.diff(t) > 0), "nodes come out ascending"
    for k in range(8):
        ref = special.beta(k + p + 1.0, q + 1.0)
        assert float(np.sum(w * t**k)) == pytest.approx(ref, rel=1e-13)


def test_gauss_jacobi_rejects_bad_input():
    with pytest.raises(ValueError):
        quad.gauss_jacobi(0, 0.0, 0.0)
    with pytest.raises(ValueError):
        quad.gauss_jacobi01(4, -1.0, 0.0)


def test_circle_rule_trig_exactness():
    rule = quad.circle_rule(8)
    x, y = rule.points[:, 0], rule.points[:, 1]
    assert float(np.sum(rule.weights)) == pytest.approx(2 * math.pi, rel=1e-14)
    assert float(np.sum(rule.weights * x**2)) == pytest.approx(math.pi, rel=1e-13)
    assert float(np.sum(rule.weights * x**3 * y)) == pytest.approx(0.0, abs=1e-13)
    assert float(np.sum(rule.weights * x**4)) == pytest.approx(3 * math.pi / 4, rel=1e-13)


def test_sphere_rule_mass_and_moments():
    rule = quad.sphere_rule(2, 6)
    assert float(np.sum(rule.weights)) == pytest.approx(sphere_area(3), rel=1e-13)
    # int_{S^2} x_i^2 = area/3 by symmetry
    for i in range(3):
        val = float(np.sum(rule.weights * rule.points[:, i] ** 2))
        assert val == pytest.approx(sphere_area(3) / 3.0, rel=1e-12)


@pytest.mark.parametrize("d,beta,gamma", [(2, -1.0, 0.0), (2, 0.5, 2.0), (3, -1.0, 0.5)])
def test_surface_rule_mass(d, beta, gamma):
    rule = quad.surface_rule(d, beta, gamma, 8)
    ref = sphere_area(d) * special.beta(beta + d, gamma + 1.0)
    assert float(np.sum(rule.weights)) == pytest.approx(ref, rel=1e-12)
    assert np.all(rule.weights > 0)
    x, t = rule.points[:, :d], rule.points[:, d]
    assert np.allclose(np.linalg.norm(x, axis=1), t, atol=1e-14)


def test_surface_rule_polynomial_moment():
    # int x_1^2 t^{-1} dsigma = (area/d) * int t^{2+d-2} dt with d = 2
    rule = quad.surface_rule(2, -1.0, 0.0, 8)
    val = float(np.sum(rule.weights * rule.points[:, 0] ** 2))
    ref = (sphere_area(2) / 2.0) * special.beta(3.0, 1.0)
    assert val == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("d,mu", [(1, 0.0), (1, 1.5), (2, 0.0), (2, 0.5)])
def test_ball_rule_mass(d, mu):
    rule = quad.ball_rule(d, mu, 8)
    ref = sphere_area(d) * 0.5 * special.beta(d / 2.0, mu + 0.5)
    assert float(np.sum(rule.weights)) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("d,mu,gamma", [(1, 0.0, 0.0), (2, 0.5, 1.0), (2, 0.0, 0.0)])
def test_cone_rule_mass(d, mu, gamma):
    rule = quad.cone_rule(d, mu, gamma, 8)
    ball_mass = sphere_area(d) * 0.5 * special.beta(d / 2.0, mu + 0.5)
    ref = ball_mass * special.beta(d + 2.0 * mu, gamma + 1.0)
    assert float(np.sum(rule.weights)) == pytest.approx(ref, rel=1e-12)
    x, t = rule.points[:, :d], rule.points[:, d]
    assert np.all(np.linalg.norm(np.atleast_2d(x.T).T, axis=1) <= t + 1e-14)


def test_triangle_rule_mass_and_moment():
    a, b, c = 0.5, 0.0, 2.0
    rule = quad.triangle_rule(a, b, c, 8)
    g = special.gamma
    ref = g(a + 1) * g(b + 1) * g(c + 1) / g(a + b + c + 3.0)
    assert float(np.sum(rule.weights)) == pytest.approx(ref, rel=1e-12)
    # first moment in y1 shifts a -> a+1
    val = float(np.sum(rule.weights * rule.points[:, 0]))
    ref1 = g(a + 2) * g(b + 1) * g(c + 1) / g(a + b + c + 4.0)
    assert val == pytest.approx(ref1, rel=1e-12)


def test_interval_rule_degree_attribute():
    rule = quad.interval_rule(0.0, 0.0, 11)
    assert rule.exact_degree >= 11
    assert float(np.sum(rule.weights * rule.points**11)) == pytest.approx(1.0 / 12.0, rel=1e-13)


@settings(max_examples=25, deadline=None)
@given(
    deg=st.integers(min_value=1, max_value=10),
    mu=st.floats(min_value=-0.45, max_value=2.0),
    gamma=st.floats(min_value=-0.9, max_value=2.0),
)
def test_cone_rule_exactness_random_monomial(deg, mu, gamma):
    """A rule of stated degree integrates t^j ||x||^{2i} (j+2i <= deg) like a
    much finer rule does."""
    rule = quad.cone_rule(2, mu, gamma, deg)
    fine = quad.cone_rule(2, mu, gamma, deg + 14)

    def moment(r, i, j):
        x, t = r.points[:, :2], r.points[:, 2]
        return float(np.sum(r.weights * np.sum(x * x, axis=1) ** i * t**j))

    for i in range(0, deg // 2 + 1):
        for j in range(0, deg - 2 * i + 1):
            a, b = moment(rule, i, j), moment(fine, i, j)
            assert a == pytest.approx(b, rel=1e-10, abs=1e-13)
