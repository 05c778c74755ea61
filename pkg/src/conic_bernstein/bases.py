"""Orthogonal bases on the conic surface, the solid cone and the triangle.

Every family factors as (shifted Jacobi in t) x (fiber polynomial):

* surface:  S^n_{m,l}(x,t) = P_{n-m}^{(2m+beta+d-1, gamma)}(1-2t) Y_l^m(x),
  with Y_l^m the solid (homogeneous) spherical harmonic;
* cone:     J^n_{m,j}(x,t) = P_{n-m}^{(2m+2mu+d-1, gamma)}(1-2t) t^m U^m_j(x/t),
  with U^m_j the degree-m ball polynomial (Gegenbauer on B^1, disk family
  on B^2), extended to t = 0 by its homogeneous limit;
* triangle: K^n_m(y) = P_{n-m}^{(a+b+2m+1, c)}(1-2t) t^m P_m^{(b,a)}(u) in the
  chart t = y1+y2, u = (y1-y2)/t.

Squared norms split into a closed-form t-factor and a fiber factor computed
once by quadrature; orthonormal evaluation divides by the product.  The
product structure is also exported (factor matrices per m) because the large
Gram engines depend on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import jacobi
from .geometry import WeightSpec
from .harmonics import harmonic_dim, harmonic_eval, solid_harmonics
from .polyops import Poly
from .quadrature import ball_rule, cone_rule, surface_rule, triangle_rule

__all__ = [
    "BasisIndex",
    "dim_Vn_surface",
    "dim_Pin_surface",
    "dim_Vn_cone",
    "dim_Vn_cone_exact",
    "SurfaceBasis",
    "ConeBasis",
    "TriangleBasis",
    "sph_harmonic_eval",
    "surface_basis_eval",
    "cone_basis_eval",
    "triangle_basis_eval",
    "orthonormality_certificate",
]


# ---------------------------------------------------------------------------
# dimensions


def dim_Vn_surface(d: int, n: int) -> int:
    """dim of the exact-degree-n orthogonal space on the conic surface."""
    if n == 0:
        return 1
    return math.comb(n + d - 1, n) + math.comb(n + d - 2, n - 1)


def dim_Pin_surface(d: int, n: int) -> int:
    """dim Pi_n on the conic surface (all degrees through n)."""
    return math.comb(n + d, n) + (math.comb(n + d - 1, n - 1) if n >= 1 else 0)


def dim_Vn_cone(d: int, n: int) -> int:
    """Cone count C(n+d+1, n): total through degree n (matches dim Pi_n)."""
    return math.comb(n + d + 1, n)


def dim_Vn_cone_exact(d: int, n: int) -> int:
    """Number of cone basis elements of exact degree n."""
    return math.comb(n + d, d)


@dataclass(frozen=True)
class BasisIndex:
    n: int
    m: int
    j: int = 0

    def __post_init__(self):
        if not 0 <= self.m <= self.n:
            raise ValueError(f"need 0 <= m <= n, got m={self.m}, n={self.n}")


# ---------------------------------------------------------------------------
# shifted-Jacobi coefficient expansion (for exact ambient polynomials)


def shifted_jacobi_coeffs(k: int, alpha: float, beta: float) -> np.ndarray:
    """Coefficients c with P_k^{(alpha,beta)}(1-2t) = sum_i c[i] t^i."""
    c_prev = np.array([1.0])
    if k == 0:
        return c_prev
    ab = alpha + beta
    # P_1(z) = (ab+2)/2 z + (alpha-beta)/2 at z = 1-2t
    c = np.array([(ab + 2.0) / 2.0 + (alpha - beta) / 2.0, -(ab + 2.0)])
    for i in range(1, k):
        a1 = 2.0 * (i + 1.0) * (i + ab + 1.0) * (2.0 * i + ab)
        a2 = (2.0 * i + ab + 1.0) * (alpha * alpha - beta * beta)
        a3 = (2.0 * i + ab) * (2.0 * i + ab + 1.0) * (2.0 * i + ab + 2.0)
        a4 = 2.0 * (i + alpha) * (i + beta) * (2.0 * i + ab + 2.0)
        nxt = np.zeros(i + 2)
        nxt[: i + 1] += (a2 + a3) / a1 * c
        nxt[1 : i + 2] += -2.0 * a3 / a1 * c
        nxt[: i] += -a4 / a1 * c_prev
        c_prev, c = c, nxt
    return c


# ---------------------------------------------------------------------------
# ball polynomial fibers (B^1 and B^2)


def _disk_order(m: int) -> list:
    """(radial index, azimuthal order, trig) enumeration of degree-m disk polys."""
    out = []
    for o in range(m, -1, -2):
        jj = (m - o) // 2
        if o == 0:
            out.append((jj, 0, "c"))
        else:
            out.append((jj, o, "c"))
            out.append((jj, o, "s"))
    return out


def ball_op_eval(d: int, mu: float, m: int, j: int, u: np.ndarray, grad: int | None = None):
    """Degree-m ball orthogonal polynomial (unnormalized) on B^d, or a gradient
    component.  u has shape (..., d) (or (...,) for d = 1)."""
    u = np.asarray(u, dtype=float)
    lam = mu - 0.5
    if d == 1:
        if grad is None:
            return jacobi.jacobi_all(m, lam, lam, u)[m]
        return jacobi.jacobi_deriv_all(m, lam, lam, u, order=1)[m]
    if d != 2:
        raise NotImplementedError("ball polynomials implemented for d = 1, 2")
    jj, o, trig = _disk_order(m)[j]
    r = np.hypot(u[..., 0], u[..., 1])
    th = np.arctan2(u[..., 1], u[..., 0])
    z = 2.0 * r * r - 1.0
    pz = jacobi.jacobi_all(jj, lam, float(o), z)[jj]
    ang = np.cos(o * th) if trig == "c" else np.sin(o * th)
    if grad is None:
        return pz * r**o * ang
    dpz = jacobi.jacobi_deriv_all(jj, lam, float(o), z, order=1)[jj]
    # radial derivative of P(2r^2-1) r^o and angular derivative of cos/sin(o th)
    dr = dpz * 4.0 * r * r**o + (o * r ** (o - 1) if o else 0.0) * pz
    dth = -o * np.sin(o * th) if trig == "c" else o * np.cos(o * th)
    radial = dr * ang
    tangential = pz * r**o * dth
    ct, st = np.cos(th), np.sin(th)
    if grad == 0:
        return ct * radial - st * tangential / r
    return st * radial + ct * tangential / r


def _ball_poly(d: int, mu: float, m: int, j: int) -> Poly:
    """Homogenized ball polynomial t^m U^m_j(x/t) as a Poly in (x_1..x_d, t)."""
    lam = mu - 0.5
    nv = d + 1
    if d == 1:
        coeffs = _jacobi_monomial_coeffs(m, lam, lam)
        out = Poly(nv)
        for p, cp in enumerate(coeffs):
            if cp:
                out = out + Poly(nv, {(p, m - p): cp})
        return out
    jj, o, trig = _disk_order(m)[j]
    # t^{2jj} P_jj(2 r^2/t^2 - 1) = sum_i c_i (2 r^2 - t^2)^i t^{2(jj-i)}
    coeffs = _jacobi_monomial_coeffs(jj, lam, float(o))
    rad = Poly(nv)
    core = Poly(nv, {(2, 0, 0): 2.0, (0, 2, 0): 2.0, (0, 0, 2): -1.0})
    power = Poly.const(nv, 1.0)
    for i, ci in enumerate(coeffs):
        if ci:
            rad = rad + power.shift(2, 2 * (jj - i)) * ci
        power = power * core
    ang = _harm2_poly(o, 0 if trig == "c" else 1, nv)
    return rad * ang


def _harm2_poly(o: int, which: int, nv: int) -> Poly:
    """Re/Im((x1+i x2)^o) as an nv-variable Poly (x1, x2 first)."""
    if o == 0:
        return Poly.const(nv, 1.0)
    out = Poly(nv)
    for p in range(o + 1):
        k = o - p
        if (k % 2 == 0) != (which == 0):
            continue
        sign = -1.0 if ((k // 2 if which == 0 else (k - 1) // 2) % 2) else 1.0
        e = [0] * nv
        e[0], e[1] = p, k
        out.c[tuple(e)] = sign * math.comb(o, p)
    return out


def _jacobi_monomial_coeffs(k: int, alpha: float, beta: float) -> np.ndarray:
    """Monomial coefficients of P_k^{(alpha,beta)}(z) (ascending powers of z)."""
    shifted = shifted_jacobi_coeffs(k, alpha, beta)  # in t with z = 1-2t
    # convert: t = (1-z)/2, so sum_i c_i ((1-z)/2)^i
    out = np.zeros(k + 1)
    for i, ci in enumerate(shifted):
        if ci == 0.0:
            continue
        for pw in range(i + 1):
            out[pw] += ci * math.comb(i, pw) * (-1.0) ** pw / 2.0**i
    return out


# ---------------------------------------------------------------------------
# basis handles


class SurfaceBasis:
    """Orthogonal basis of Pi_nmax on the conic surface for t^beta (1-t)^gamma."""

    domain = "surface"

    def __init__(self, d: int, beta: float, gamma: float, nmax: int, quad_deg: int | None = None):
        self.weight = WeightSpec.surface(d, beta, gamma)
        self.d, self.beta, self.gamma, self.nmax = d, float(beta), float(gamma), int(nmax)
        self.rule = surface_rule(d, beta, gamma, quad_deg or 2 * nmax + 4)
        self.indices = [
            BasisIndex(n, m, j)
            for n in range(nmax + 1)
            for m in range(n + 1)
            for j in range(harmonic_dim(d, m))
        ]
        self.norms2 = np.array([self._norm2(ix) for ix in self.indices])
        self.measure = float(np.sum(self.rule.weights))

    def tparam(self, m: int) -> float:
        return 2 * m + self.beta + self.d - 1

    def _norm2(self, ix: BasisIndex) -> float:
        return jacobi.shifted_norm(ix.n - ix.m, self.tparam(ix.m), self.gamma)

    def eval_element(self, ix: BasisIndex, pts, orthonormal: bool = False):
        pts = np.asarray(pts, dtype=float)
        x, t = pts[..., : self.d], pts[..., self.d]
        tp = jacobi.shifted_all(ix.n - ix.m, self.tparam(ix.m), self.gamma, t)[ix.n - ix.m]
        val = tp * harmonic_eval(self.d, ix.m, ix.j, x)
        if orthonormal:
            val = val / math.sqrt(self._norm2(ix))
        return val

    def eval_matrix(self, pts, orthonormal: bool = True) -> np.ndarray:
        """(n_elements, n_points) values, vectorized per fiber degree m."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        x, t = pts[..., : self.d], pts[..., self.d]
        rows = np.empty((len(self.indices), len(pts)))
        pos = {(ix.n, ix.m, ix.j): r for r, ix in enumerate(self.indices)}
        for m in range(self.nmax + 1):
            tmat = jacobi.shifted_all(self.nmax - m, self.tparam(m), self.gamma, t)
            for j in range(harmonic_dim(self.d, m)):
                h = harmonic_eval(self.d, m, j, x)
                for n in range(m, self.nmax + 1):
                    rows[pos[(n, m, j)]] = tmat[n - m] * h
        if orthonormal:
            rows /= np.sqrt(self.norms2)[:, None]
        return rows

    def element_poly(self, ix: BasisIndex, orthonormal: bool = False) -> Poly:
        """Exact ambient representation in (x_1..x_d, t)."""
        cts = shifted_jacobi_coeffs(ix.n - ix.m, self.tparam(ix.m), self.gamma)
        harm = solid_harmonics(self.d, ix.m)[ix.j]
        nv = self.d + 1
        hp = Poly(nv, {e + (0,): v for e, v in harm.c.items()})
        out = Poly(nv)
        for i, ci in enumerate(cts):
            if ci:
                out = out + hp.shift(self.d, i) * ci
        if orthonormal:
            out = out * (1.0 / math.sqrt(self._norm2(ix)))
        return out


class ConeBasis:
    """Orthogonal basis of Pi_nmax on the solid cone for W_{mu,gamma}."""

    domain = "cone"

    def __init__(self, d: int, mu: float, gamma: float, nmax: int, quad_deg: int | None = None):
        self.weight = WeightSpec.cone(d, mu, gamma)
        self.d, self.mu, self.gamma, self.nmax = d, float(mu), float(gamma), int(nmax)
        self.rule = cone_rule(d, mu, gamma, quad_deg or 2 * nmax + 4)
        self._ball_rule = ball_rule(d, mu, 2 * nmax + 4)
        self._ball_norm_cache: dict = {}
        self.indices = [
            BasisIndex(n, m, j)
            for n in range(nmax + 1)
            for m in range(n + 1)
            for j in range(self.fiber_dim(m))
        ]
        self.norms2 = np.array(
            [
                jacobi.shifted_norm(ix.n - ix.m, self.tparam(ix.m), self.gamma)
                * self.ball_norm2(ix.m, ix.j)
                for ix in self.indices
            ]
        )
        self.measure = float(np.sum(self.rule.weights))

    def fiber_dim(self, m: int) -> int:
        return 1 if self.d == 1 else m + 1

    def tparam(self, m: int) -> float:
        return 2 * m + 2 * self.mu + self.d - 1

    def ball_norm2(self, m: int, j: int) -> float:
        key = (m, j)
        if key not in self._ball_norm_cache:
            vals = ball_op_eval(self.d, self.mu, m, j, self._ball_rule.points)
            self._ball_norm_cache[key] = float(self._ball_rule.weights @ np.asarray(vals) ** 2)
        return self._ball_norm_cache[key]

    def _fiber_vals(self, m: int, j: int, x, t):
        """t^m U^m_j(x/t), with the homogeneous-limit value at t = 0."""
        t = np.asarray(t, dtype=float)
        safe = np.where(t > 0, t, 1.0)
        u = x / safe[..., None] if self.d > 1 else np.asarray(x)[..., 0] / safe
        vals = ball_op_eval(self.d, self.mu, m, j, u) * safe**m
        if m >= 1:
            vals = np.where(t > 0, vals, 0.0)
        return vals

    def eval_element(self, ix: BasisIndex, pts, orthonormal: bool = False):
        pts = np.asarray(pts, dtype=float)
        x, t = pts[..., : self.d], pts[..., self.d]
        tp = jacobi.shifted_all(ix.n - ix.m, self.tparam(ix.m), self.gamma, t)[ix.n - ix.m]
        val = tp * self._fiber_vals(ix.m, ix.j, x, t)
        if orthonormal:
            val = val / math.sqrt(
                jacobi.shifted_norm(ix.n - ix.m, self.tparam(ix.m), self.gamma)
                * self.ball_norm2(ix.m, ix.j)
            )
        return val

    def eval_matrix(self, pts, orthonormal: bool = True) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        x, t = pts[..., : self.d], pts[..., self.d]
        rows = np.empty((len(self.indices), len(pts)))
        pos = {(ix.n, ix.m, ix.j): r for r, ix in enumerate(self.indices)}
        for m in range(self.nmax + 1):
            tmat = jacobi.shifted_all(self.nmax - m, self.tparam(m), self.gamma, t)
            for j in range(self.fiber_dim(m)):
                fv = self._fiber_vals(m, j, x, t)
                for n in range(m, self.nmax + 1):
                    rows[pos[(n, m, j)]] = tmat[n - m] * fv
        if orthonormal:
            rows /= np.sqrt(self.norms2)[:, None]
        return rows

    def element_poly(self, ix: BasisIndex, orthonormal: bool = False) -> Poly:
        cts = shifted_jacobi_coeffs(ix.n - ix.m, self.tparam(ix.m), self.gamma)
        bp = _ball_poly(self.d, self.mu, ix.m, ix.j)
        out = Poly(self.d + 1)
        for i, ci in enumerate(cts):
            if ci:
                out = out + bp.shift(self.d, i) * ci
        if orthonormal:
            out = out * (
                1.0
                / math.sqrt(
                    jacobi.shifted_norm(ix.n - ix.m, self.tparam(ix.m), self.gamma)
                    * self.ball_norm2(ix.m, ix.j)
                )
            )
        return out


class TriangleBasis:
    """Jacobi product basis on the triangle for y1^a y2^b (1-y1-y2)^c."""

    domain = "triangle"

    def __init__(self, a: float, b: float, c: float, nmax: int, quad_deg: int | None = None):
        self.weight = WeightSpec.triangle(a, b, c)
        self.a, self.b, self.cc, self.nmax = float(a), float(b), float(c), int(nmax)
        self.d = 2
        self.rule = triangle_rule(a, b, c, quad_deg or 2 * nmax + 4)
        self.indices = [BasisIndex(n, m, 0) for n in range(nmax + 1) for m in range(n + 1)]
        self.norms2 = np.array([self._norm2(ix) for ix in self.indices])
        self.measure = float(np.sum(self.rule.weights))

    def tparam(self, m: int) -> float:
        return self.a + self.b + 2 * m + 1

    def _norm2(self, ix: BasisIndex) -> float:
        ufac = jacobi.jacobi_norm(ix.m, self.b, self.a) * 2.0 ** (-self.a - self.b - 1.0)
        return jacobi.shifted_norm(ix.n - ix.m, self.tparam(ix.m), self.cc) * ufac

    def _fiber_vals(self, m: int, y1, y2):
        t = y1 + y2
        safe = np.where(t > 0, t, 1.0)
        u = (y1 - y2) / safe
        vals = jacobi.jacobi_all(m, self.b, self.a, u)[m] * safe**m
        if m >= 1:
            vals = np.where(t > 0, vals, 0.0)
        return vals

    def eval_element(self, ix: BasisIndex, pts, orthonormal: bool = False):
        pts = np.asarray(pts, dtype=float)
        y1, y2 = pts[..., 0], pts[..., 1]
        t = y1 + y2
        tp = jacobi.shifted_all(ix.n - ix.m, self.tparam(ix.m), self.cc, t)[ix.n - ix.m]
        val = tp * self._fiber_vals(ix.m, y1, y2)
        if orthonormal:
            val = val / math.sqrt(self._norm2(ix))
        return val

    def eval_matrix(self, pts, orthonormal: bool = True) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        y1, y2 = pts[..., 0], pts[..., 1]
        t = y1 + y2
        rows = np.empty((len(self.indices), len(pts)))
        pos = {(ix.n, ix.m): r for r, ix in enumerate(self.indices)}
        for m in range(self.nmax + 1):
            tmat = jacobi.shifted_all(self.nmax - m, self.tparam(m), self.cc, t)
            fv = self._fiber_vals(m, y1, y2)
            for n in range(m, self.nmax + 1):
                rows[pos[(n, m)]] = tmat[n - m] * fv
        if orthonormal:
            rows /= np.sqrt(self.norms2)[:, None]
        return rows

    def element_poly(self, ix: BasisIndex, orthonormal: bool = False) -> Poly:
        """Exact representation in (y1, y2)."""
        cts = shifted_jacobi_coeffs(ix.n - ix.m, self.tparam(ix.m), self.cc)
        ucs = _jacobi_monomial_coeffs(ix.m, self.b, self.a)
        nv = 2
        tpoly = Poly(nv, {(1, 0): 1.0, (0, 1): 1.0})
        xpoly = Poly(nv, {(1, 0): 1.0, (0, 1): -1.0})
        fiber = Poly(nv)
        xp = Poly.const(nv, 1.0)
        tp_powers = [Poly.const(nv, 1.0)]
        for _ in range(ix.n + 1):
            tp_powers.append(tp_powers[-1] * tpoly)
        for p, cp in enumerate(ucs):
            if cp:
                fiber = fiber + xp * tp_powers[ix.m - p] * cp
            xp = xp * xpoly
        out = Poly(nv)
        for i, ci in enumerate(cts):
            if ci:
                out = out + fiber * tp_powers[i] * ci
        if orthonormal:
            out = out * (1.0 / math.sqrt(self._norm2(ix)))
        return out


# ---------------------------------------------------------------------------
# contract-style wrappers


def sph_harmonic_eval(d: int, m: int, j: int, xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    if np.any(np.abs(np.linalg.norm(xi, axis=-1) - 1.0) > 1e-10):
        raise ValueError("sph_harmonic_eval expects unit vectors")
    return harmonic_eval(d, m, j, xi)


def surface_basis_eval(handle: SurfaceBasis, ix: BasisIndex, p, orthonormal: bool = False):
    pts = p.coords() if hasattr(p, "coords") else p
    return handle.eval_element(ix, pts, orthonormal=orthonormal)


def cone_basis_eval(handle: ConeBasis, ix: BasisIndex, p, orthonormal: bool = False):
    pts = p.coords() if hasattr(p, "coords") else p
    return handle.eval_element(ix, pts, orthonormal=orthonormal)


def triangle_basis_eval(handle: TriangleBasis, ix: BasisIndex, y, orthonormal: bool = False):
    return handle.eval_element(ix, np.asarray(y, dtype=float), orthonormal=orthonormal)


def orthonormality_certificate(handle) -> float:
    """Max |Gram - I| entry for the orthonormalized family under handle.rule."""
    rows = handle.eval_matrix(handle.rule.points, orthonormal=True)
    gram = (rows * handle.rule.weights) @ rows.T
    return float(np.max(np.abs(gram - np.eye(len(rows)))))
