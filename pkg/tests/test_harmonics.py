import math

import numpy as np
import pytest
from scipy import special

from conic_bernstein import harmonics
from conic_bernstein.polyops import laplace_x
from conic_bernstein.quadrature import sphere_rule


@pytest.mark.parametrize("d,m,expected", [(2, 0, 1), (2, 5, 2), (3, 0, 1), (3, 4, 9)])
def test_harmonic_dim(d, m, expected):
    assert harmonics.harmonic_dim(d, m) == expected


def test_harmonic_dim_rejects_unsupported():
    with pytest.raises(NotImplementedError):
        harmonics.harmonic_dim(4, 2)
    with pytest.raises(ValueError):
        harmonics.harmonic_dim(3, -1)


@pytest.mark.parametrize("d,m", [(2, 0), (2, 3), (3, 1), (3, 4)])
def test_solid_harmonics_are_harmonic_and_homogeneous(d, m):
    # laplace_x works in the ambient layout (x_1..x_d, t): pad a t-slot first
    from conic_bernstein.polyops import Poly

    for p in harmonics.solid_harmonics(d, m):
        padded = Poly(d + 1, {e + (0,): v for e, v in p.c.items()})
        residual = laplace_x(padded)
        assert all(abs(v) < 1e-12 for v in residual.c.values())
        assert all(sum(e) == m for e in p.c)


@pytest.mark.parametrize("d,m", [(2, 4), (3, 3)])
def test_solid_harmonics_orthonormal_on_sphere(d, m):
    fam = harmonics.solid_harmonics(d, m)
    rule = sphere_rule(d - 1, 2 * m + 4)
    vals = np.array([p(rule.points) for p in fam])
    gram = (vals * rule.weights) @ vals.T
    assert np.allclose(gram, np.eye(len(fam)), atol=1e-12)


def test_degrees_mutually_orthogonal():
    rule = sphere_rule(2, 12)
    f3 = harmonics.solid_harmonics(3, 3)
    f5 = harmonics.solid_harmonics(3, 5)
    for p in f3:
        for q in f5:
            assert float(np.sum(rule.weights * p(rule.points) * q(rule.points))) == pytest.approx(
                0.0, abs=1e-12
            )


def test_circle_harmonics_closed_form():
    theta = np.linspace(0, 2 * math.pi, 9, endpoint=False)
    x = np.column_stack([np.cos(theta), np.sin(theta)])
    for m in (0, 1, 4):
        for j in range(harmonics.harmonic_dim(2, m)):
            vals = harmonics.circle_harmonic_eval(m, j, x)
            if m == 0:
                ref = np.full_like(theta, 1 / math.sqrt(2 * math.pi))
            elif j == 0:
                ref = np.cos(m * theta) / math.sqrt(math.pi)
            else:
                ref = np.sin(m * theta) / math.sqrt(math.pi)
            assert np.allclose(vals, ref, atol=1e-14)


def test_harmonic_eval_matches_polys_off_sphere():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(20, 3))
    for m in (1, 3):
        fam = harmonics.solid_harmonics(3, m)
        for j, p in enumerate(fam):
            assert np.allclose(harmonics.harmonic_eval(3, m, j, x), p(x), rtol=1e-12)
    with pytest.raises(IndexError):
        harmonics.harmonic_eval(3, 2, 7, x)


def test_sphere_harmonics_match_legendre_addition():
    """sum_j Y_j(xi) Y_j(eta) = (2m+1)/(4 pi) P_m(<xi,eta>) on S^2."""
    rng = np.random.default_rng(5)
    xi, eta = rng.normal(size=(2, 3))
    xi /= np.linalg.norm(xi)
    eta /= np.linalg.norm(eta)
    for m in (1, 2, 4):
        fam = harmonics.solid_harmonics(3, m)
        lhs = sum(float(p(xi[None])[0] * p(eta[None])[0]) for p in fam)
        ref = (2 * m + 1) / (4 * math.pi) * special.eval_legendre(m, float(xi @ eta))
        assert lhs == pytest.approx(ref, rel=1e-10)
