"""Gauss rules on the interval, sphere, ball, conic surface, cone and triangle.

The 1d building block is Gauss-Jacobi computed by the Golub-Welsch scheme:
eigenvalues of the symmetric tridiagonal recurrence matrix are the nodes, and
the squared first eigenvector components (times the zeroth moment) are the
weights.  Product rules on the curved domains absorb the full weighted measure
into the node weights, so `sum(w * f(points))` approximates the weighted
integral directly and is exact for polynomials up to the recorded degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "QuadratureRule",
    "gauss_jacobi",
    "gauss_jacobi01",
    "circle_rule",
    "sphere_rule",
    "surface_rule",
    "ball_rule",
    "cone_rule",
    "triangle_rule",
    "interval_rule",
]


@dataclass
class QuadratureRule:
    """Nodes/weights plus bookkeeping about what the rule integrates exactly."""

    points: np.ndarray          # (N,) for 1d rules, else (N, dim)
    weights: np.ndarray         # (N,)
    domain: str
    exact_degree: int

    def __post_init__(self):
        if len(self.weights) != len(self.points):
            raise ValueError("points/weights length mismatch")

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, f) -> float:
        """Integrate a callable (or an array of node values) against the rule."""
        vals = np.asarray(f(self.points) if callable(f) else f, dtype=float)
        return float(self.weights @ vals)


def gauss_jacobi(k: int, alpha: float, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """k-point Gauss-Jacobi rule on [-1, 1] for the weight (1-x)^alpha (1+x)^beta.

    Golub-Welsch: nodes are eigenvalues of the symmetric tridiagonal matrix of
    monic recurrence coefficients, weights come from the first components of
    the eigenvectors scaled by the zeroth moment.
    """
    if k < 1:
        raise ValueError("need at least one node")
    if not (alpha > -1.0 and beta > -1.0):
        raise ValueError(f"Gauss-Jacobi exponents must exceed -1, got ({alpha}, {beta})")
    ab = alpha + beta
    diag = np.empty(k)
    diag[0] = (beta - alpha) / (ab + 2.0)
    if k > 1:
        j = np.arange(1, k, dtype=float)
        diag[1:] = (beta * beta - alpha * alpha) / ((2.0 * j + ab) * (2.0 * j + ab + 2.0))
        off = np.empty(k - 1)
        # the j = 1 coefficient is written with the (1+ab) factor cancelled so
        # ab -> -1 stays finite
        off[0] = math.sqrt(4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) ** 2 * (3.0 + ab)))
        if k > 2:
            j = np.arange(2, k, dtype=float)
            num = 4.0 * j * (j + alpha) * (j + beta) * (j + ab)
            den = (2.0 * j + ab) ** 2 * (2.0 * j + ab - 1.0) * (2.0 * j + ab + 1.0)
            off[1:] = np.sqrt(num / den)
        nodes, vecs = eigh_tridiagonal(diag, off)
        first = vecs[0]
    else:
        nodes = diag
        first = np.ones(1)
    mu0 = math.exp(
        (ab + 1.0) * math.log(2.0)
        + math.lgamma(alpha + 1.0)
        + math.lgamma(beta + 1.0)
        - math.lgamma(ab + 2.0)
    )
    return nodes, mu0 * first**2


def gauss_jacobi01(k: int, p: float, q: float) -> tuple[np.ndarray, np.ndarray]:
    """k-point rule for integral_0^1 f(t) t^p (1-t)^q dt (exact to degree 2k-1)."""
    z, w = gauss_jacobi(k, p, q)
    t = (1.0 - z) / 2.0
    order = np.argsort(t)
    return t[order], (w * 2.0 ** (-p - q - 1.0))[order]


def interval_rule(p: float, q: float, deg: int) -> QuadratureRule:
    """Rule on [0,1] with weight t^p (1-t)^q, exact for polynomials of degree <= deg."""
    k = deg // 2 + 2
    t, w = gauss_jacobi01(k, p, q)
    return QuadratureRule(t, w, "interval", 2 * k - 1)


def circle_rule(deg: int) -> QuadratureRule:
    """Equispaced rule on the unit circle, exact for trig polynomials <= deg.

    The node count is forced even so the rule is antipodally symmetric, which
    the recursive sphere/ball constructions rely on.
    """
    m = max(deg + 1, 2)
    if m % 2:
        m += 1
    theta = 2.0 * np.pi * np.arange(m) / m
    pts = np.column_stack([np.cos(theta), np.sin(theta)])
    w = np.full(m, 2.0 * np.pi / m)
    return QuadratureRule(pts, w, "sphere1", m - 1)


def sphere_rule(sphere_dim: int, deg: int) -> QuadratureRule:
    """Product rule on the unit sphere S^k, exact for spherical polys <= deg.

    Built recursively: Gauss-Jacobi in the last coordinate (weight
    (1-z^2)^{(k-2)/2}) times a rule on S^{k-1}.
    """
    if sphere_dim == 1:
        return circle_rule(deg)
    if sphere_dim < 1:
        raise ValueError("sphere dimension must be >= 1")
    kz = deg // 2 + 2
    expo = (sphere_dim - 2) / 2.0
    z, wz = gauss_jacobi(kz, expo, expo)
    sub = sphere_rule(sphere_dim - 1, deg)
    r = np.sqrt(np.clip(1.0 - z**2, 0.0, None))
    pts = np.empty((kz * len(sub), sphere_dim + 1))
    pts[:, :sphere_dim] = np.repeat(r, len(sub))[:, None] * np.tile(sub.points, (kz, 1))
    pts[:, sphere_dim] = np.repeat(z, len(sub))
    w = np.repeat(wz, len(sub)) * np.tile(sub.weights, kz)
    return QuadratureRule(pts, w, f"sphere{sphere_dim}", deg)


def surface_rule(d: int, beta: float, gamma: float, deg: int) -> QuadratureRule:
    """Rule on the conic surface in R^{d+1} against t^beta (1-t)^gamma d-measure.

    Points are rows (x_1..x_d, t) with ||x|| = t; the t-profile t^{beta+d-1}
    (from the weight and the surface area element) goes into the radial rule.
    """
    if d < 2:
        raise ValueError("the conic surface needs d >= 2")
    if not (beta > -d and gamma > -1):
        raise ValueError(f"surface weight needs beta > -d and gamma > -1, got ({beta}, {gamma})")
    kt = deg // 2 + 2
    t, wt = gauss_jacobi01(kt, beta + d - 1, gamma)
    sph = sphere_rule(d - 1, deg)
    nt, ns = len(t), len(sph)
    pts = np.empty((nt * ns, d + 1))
    pts[:, :d] = np.repeat(t, ns)[:, None] * np.tile(sph.points, (nt, 1))
    pts[:, d] = np.repeat(t, ns)
    w = np.repeat(wt, ns) * np.tile(sph.weights, nt)
    return QuadratureRule(pts, w, f"surface{d}", deg)


def ball_rule(d: int, mu: float, deg: int) -> QuadratureRule:
    """Rule on the unit ball B^d against (1-||u||^2)^{mu-1/2}."""
    if mu <= -0.5:
        raise ValueError("ball weight needs mu > -1/2")
    if d == 1:
        k = deg // 2 + 2
        u, w = gauss_jacobi(k, mu - 0.5, mu - 0.5)
        return QuadratureRule(u, w, "ball1", 2 * k - 1)
    if d == 2:
        kz = deg // 2 + 2
        z, wz = gauss_jacobi01(kz, 0.0, mu - 0.5)
        circ = circle_rule(deg)
        r = np.sqrt(z)
        pts = np.repeat(r, len(circ))[:, None] * np.tile(circ.points, (kz, 1))
        w = 0.5 * np.repeat(wz, len(circ)) * np.tile(circ.weights, kz)
        return QuadratureRule(pts, w, "ball2", deg)
    raise NotImplementedError("ball rules implemented for d = 1, 2")


def cone_rule(d: int, mu: float, gamma: float, deg: int) -> QuadratureRule:
    """Rule on the solid cone in R^{d+1} against (t^2-||x||^2)^{mu-1/2} (1-t)^gamma.

    Uses x = t*y with y in the unit ball; the homogeneity t^{d+2mu-1} moves into
    the radial Gauss-Jacobi factor, so the double-root weight never has to be
    sampled near its singular set.
    """
    if not (mu > -0.5 and gamma > -1):
        raise ValueError(f"cone weight needs mu > -1/2 and gamma > -1, got ({mu}, {gamma})")
    kt = deg // 2 + 2
    t, wt = gauss_jacobi01(kt, d + 2.0 * mu - 1.0, gamma)
    bal = ball_rule(d, mu, deg)
    nt, nb = len(t), len(bal)
    y = bal.points if bal.points.ndim == 2 else bal.points[:, None]
    pts = np.empty((nt * nb, d + 1))
    pts[:, :d] = np.repeat(t, nb)[:, None] * np.tile(y, (nt, 1))
    pts[:, d] = np.repeat(t, nb)
    w = np.repeat(wt, nb) * np.tile(bal.weights, nt)
    return QuadratureRule(pts, w, f"cone{d}", deg)


def triangle_rule(a: float, b: float, c: float, deg: int) -> QuadratureRule:
    """Rule on {y1, y2 >= 0, y1+y2 <= 1} against y1^a y2^b (1-y1-y2)^c.

    Chart (t, u) with y1 = t(1+u)/2, y2 = t(1-u)/2: Gauss-Jacobi in t against
    t^{a+b+1} (1-t)^c and in u against (1-u)^b (1+u)^a.
    """
    if not (a > -1 and b > -1 and c > -1):
        raise ValueError("triangle exponents must each exceed -1")
    kt = deg // 2 + 2
    t, wt = gauss_jacobi01(kt, a + b + 1.0, c)
    u, wu = gauss_jacobi(kt, b, a)
    T = np.repeat(t, kt)
    U = np.tile(u, kt)
    pts = np.column_stack([T * (1.0 + U) / 2.0, T * (1.0 - U) / 2.0])
    w = 2.0 ** (-a - b - 1.0) * np.repeat(wt, kt) * np.tile(wu, kt)
    return QuadratureRule(pts, w, "triangle", 2 * kt - 1)
