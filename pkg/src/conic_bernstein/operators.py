"""Derivative operators, spectral operators, and their quadrature identities.

Functions here act on exact ambient polynomial representations
(`polyops.Poly` in (x_1..x_d, t) for surface/cone, (y1, y2) for the
triangle).  Derivatives are always analytic; multipliers like
sqrt(t(1-t)) or t^{-1/2} are applied pointwise at evaluation time and are
allowed to return inf at their singular sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import WeightSpec, weight_eval
from .polyops import Poly, angular, laplace_x, partial, partial_t, ray, xgrad

__all__ = [
    "DiffOp",
    "SpectralOp",
    "apply_diffop",
    "apply_spectral",
    "spectral_poly",
    "spectral_divergence_form",
    "check_selfadjoint_surface",
    "check_selfadjoint_cone",
    "cauchy_bound_check",
    "MULTIPLIERS",
]

# multiplier tag -> callable(points (..., d+1) ambient layout, d, power l) -> values
MULTIPLIERS = {
    "none": lambda pts, d, l: 1.0,
    "phi": lambda pts, d, l: _phi(pts[..., d]) ** l,
    "Phi": lambda pts, d, l: _Phi(pts, d) ** l,
    "tinvsqrt": lambda pts, d, l: _invpow(pts[..., d], 0.5 * l),
    "tinv": lambda pts, d, l: _invpow(pts[..., d], 1.0 * l),
}


def _phi(t):
    return np.sqrt(np.clip(t * (1.0 - t), 0.0, None))


def _Phi(pts, d):
    x, t = pts[..., :d], pts[..., d]
    return np.sqrt(np.clip(t * t - np.sum(x * x, axis=-1), 0.0, None))


def _invpow(base, p):
    base = np.asarray(base, dtype=float)
    out = np.full(np.shape(base), np.inf)
    pos = base > 0.0
    out[pos] = base[pos] ** (-p)
    return out


@dataclass(frozen=True)
class DiffOp:
    """power-fold application of a first-order operator, times a multiplier.

    tags: 'dt' (derivative along rays through the apex), 'dij' (angular
    derivative x_i d_j - x_j d_i; ij picks the plane), 'Dxj' (sqrt(t^2-||x||^2)
    d_{x_j}), 'dxj' (plain d_{x_j}), triangle charts 'tri1'/'tri2'/'tri3'.
    multipliers: 'none', 'phi' = sqrt(t(1-t))^l, 'Phi' = sqrt(t^2-||x||^2)^l,
    'tinvsqrt' = t^{-l/2}, 'tinv' = t^{-l}.
    """

    tag: str
    power: int = 1
    multiplier: str = "none"
    ij: tuple = (0, 1)
    axis: int = 0

    def __post_init__(self):
        if self.tag not in ("dt", "dij", "Dxj", "dxj", "tri1", "tri2", "tri3"):
            raise ValueError(f"unknown operator tag {self.tag!r}")
        if self.power < 1:
            raise ValueError("operator power must be >= 1")
        if self.multiplier not in MULTIPLIERS and self.multiplier not in (
            "tri1",
            "tri2",
            "tri3",
        ):
            raise ValueError(f"unknown multiplier {self.multiplier!r}")


@dataclass(frozen=True)
class SpectralOp:
    tag: str  # 'surface' or 'cone'
    d: int
    gamma: float
    mu: float = 0.0

    def __post_init__(self):
        if self.tag not in ("surface", "cone"):
            raise ValueError(f"unknown spectral tag {self.tag!r}")
        if not self.gamma > -1:
            raise ValueError("gamma must exceed -1")
        if self.tag == "cone" and not self.mu > -0.5:
            raise ValueError("mu must exceed -1/2")

    @property
    def eigenvalue(self):
        if self.tag == "surface":
            return lambda n: -n * (n + self.gamma + self.d - 1)
        return lambda n: -n * (n + 2 * self.mu + self.gamma + self.d)


def _apply_core(tag: str, f: Poly, power: int, ij: tuple, axis: int) -> Poly:
    out = f
    for _ in range(power):
        if tag == "dt":
            out = ray(out)
        elif tag == "dij":
            out = angular(out, ij[0], ij[1])
        elif tag == "dxj":
            out = partial(out, axis)
        elif tag == "tri3":
            # d_3 = d_{y_2} - d_{y_1} on the triangle chart
            out = out.diff(1) - out.diff(0)
        elif tag == "tri1":
            out = out.diff(0)
        elif tag == "tri2":
            out = out.diff(1)
        else:
            raise ValueError(tag)
    return out


def apply_diffop(op: DiffOp, f: Poly, pts) -> np.ndarray:
    """Evaluate (multiplier * T^power f) at pts; inf where the multiplier blows up."""
    pts = np.asarray(pts, dtype=float)
    d = f.nv - 1
    if op.tag == "Dxj":
        # alternate Phi * d_xj, power times, staying in evaluated form:
        # Phi^power (d_xj-free mixing not needed: Phi commutes with nothing,
        # but powers >= 2 of D_xj are never used by the inequality families)
        if op.power != 1:
            raise NotImplementedError("Dxj supported at power 1")
        core = partial(f, op.axis)
        vals = _Phi(pts, d) * core(pts)
    elif op.tag in ("tri1", "tri2", "tri3"):
        vals = _triangle_core(op, f, pts)
    else:
        core = _apply_core(op.tag, f, op.power, op.ij, op.axis)
        vals = core(pts)
    if op.tag in ("tri1", "tri2", "tri3"):
        return vals
    return MULTIPLIERS[op.multiplier](pts, d, op.power) * vals


def _triangle_core(op: DiffOp, f: Poly, pts) -> np.ndarray:
    """phi_i^l d_i^l f on the triangle (pts = (y1, y2) rows)."""
    y1, y2 = pts[..., 0], pts[..., 1]
    y3 = 1.0 - y1 - y2
    core = _apply_core(op.tag, f, op.power, op.ij, op.axis)(pts)
    if op.tag == "tri1":
        phi = np.sqrt(np.clip(y1 * y3, 0.0, None))
    elif op.tag == "tri2":
        phi = np.sqrt(np.clip(y2 * y3, 0.0, None))
    else:
        phi = np.sqrt(np.clip(y1 * y2, 0.0, None))
    vals = phi**op.power * core
    if op.multiplier == "none":
        return vals
    if op.multiplier == "tri1":
        mult = _invpow(1.0 - y2, 0.5 * op.power)
    elif op.multiplier == "tri2":
        mult = _invpow(1.0 - y1, 0.5 * op.power)
    elif op.multiplier == "tri3":
        mult = _invpow(y1 + y2, 0.5 * op.power)
    else:
        raise ValueError(f"multiplier {op.multiplier!r} not valid on the triangle")
    return mult * vals


def spectral_poly(op: SpectralOp, f: Poly) -> Poly:
    """The spectral operator applied to f, assembled term by term.

    surface: t(1-t) dt^2 + (d-1-(d+gamma)t) dt + t^{-1} sum D_{i,j}^2,
    with dt the derivative along rays (ambient form d_t + t^{-1}<x,grad>).
    cone:    t(1-t) d_t^2 + 2(1-t)<x,grad> d_t + t lap_x - <x,grad>^2
             + (2mu+d) d_t - (2mu+gamma+d+1)(<x,grad> + t d_t) + <x,grad>,
    with plain ambient partials.
    """
    d = f.nv - 1
    tvar = f.nv - 1
    if op.tag == "surface":
        r1 = ray(f)
        r2 = ray(r1)
        out = r2.shift(tvar, 1) - r2.shift(tvar, 2)  # t(1-t) dt^2
        out = out + r1 * (d - 1) - r1.shift(tvar, 1) * (d + op.gamma)
        for i in range(d):
            for j in range(i + 1, d):
                out = out + angular(angular(f, i, j), i, j).shift(tvar, -1)
        return out
    ft = partial_t(f)
    ftt = partial_t(ft)
    xf = xgrad(f)
    out = ftt.shift(tvar, 1) - ftt.shift(tvar, 2)
    xft = xgrad(ft)
    out = out + 2.0 * (xft - xft.shift(tvar, 1))
    out = out + laplace_x(f).shift(tvar, 1) - xgrad(xf)
    out = out + (2 * op.mu + d) * ft
    out = out - (2 * op.mu + op.gamma + d + 1) * (xf + ft.shift(tvar, 1))
    out = out + xf
    return out


def spectral_divergence_form(op: SpectralOp, f: Poly) -> Poly:
    """Divergence-form route to the cone operator.

    Product-rule expansion of
      (t^d W_{mu,g})^{-1} R [ t^{d+1} W_{mu,g+1} R f ]
      + t^{-1} [ sum_i W^{-1} d_i (W_{mu+1,g} d_i f) + sum_{i<j} D_{i,j}^2 f ],
    R = d_t + t^{-1}<x,grad>, using the closed-form logarithmic derivatives
    R(t^{d+1}) = (d+1) t^d, R((t^2-||x||^2)^{mu-1/2}) = (2mu-1) t^{-1} (...),
    R((1-t)^{g+1}) = -(g+1)(1-t)^g and d_i (t^2-||x||^2)^{mu+1/2}
    = -(2mu+1) x_i (...)^{mu-1/2}.
    """
    if op.tag != "cone":
        raise ValueError("divergence form applies to the cone operator")
    d, g, mu = op.d, op.gamma, op.mu
    tvar = f.nv - 1
    r1 = ray(f)
    r2 = ray(r1)
    out = r2.shift(tvar, 1) - r2.shift(tvar, 2)  # t(1-t) R^2
    out = out + (d + 2 * mu) * (r1 - r1.shift(tvar, 1)) - (g + 1) * r1.shift(tvar, 1)
    lap = laplace_x(f)
    phi2lap = lap.shift(tvar, 2)
    nrm2 = Poly(f.nv)
    for i in range(d):
        nrm2 = nrm2 + Poly.var(f.nv, i, 2)
    phi2lap = phi2lap - nrm2 * lap
    out = out + (phi2lap - (2 * mu + 1) * xgrad(f)).shift(tvar, -1)
    for i in range(d):
        for j in range(i + 1, d):
            out = out + angular(angular(f, i, j), i, j).shift(tvar, -1)
    return out


def apply_spectral(op: SpectralOp, f: Poly, pts) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    if op.tag == "surface" and np.any(pts[..., f.nv - 1] <= 0):
        raise ValueError("surface spectral evaluation needs t > 0 (apex is flagged)")
    return spectral_poly(op, f)(pts)


# ---------------------------------------------------------------------------
# quadrature identities


def check_selfadjoint_surface(d: int, gamma: float, f: Poly, g: Poly, rule) -> dict:
    """Residual of the weighted Green identity for the surface operator.

    -int (Dsp f) g dnu = int t(1-t) (df/dt)(dg/dt) dnu
                        + sum_{i<j} int t^{-1} (D_{i,j}f)(D_{i,j}g) dnu,
    with dnu the t^{-1}(1-t)^gamma surface measure realized by `rule` and
    df/dt the ray derivative.  Returns lhs, rhs and the scale used for the
    relative residual.
    """
    op = SpectralOp("surface", d, gamma)
    pts, w = rule.points, rule.weights
    t = pts[..., d]
    lhs = -float(w @ (spectral_poly(op, f)(pts) * g(pts)))
    rf, rg = ray(f), ray(g)
    rhs = float(w @ (t * (1 - t) * rf(pts) * rg(pts)))
    for i in range(d):
        for j in range(i + 1, d):
            rhs += float(w @ (angular(f, i, j)(pts) * angular(g, i, j)(pts) / t))
    nf = math.sqrt(float(w @ f(pts) ** 2))
    ng = math.sqrt(float(w @ g(pts) ** 2))
    scale = max(abs(lhs), abs(rhs), nf * ng)
    return {"lhs": lhs, "rhs": rhs, "residual": abs(lhs - rhs), "scale": scale}


def check_selfadjoint_cone(d: int, mu: float, gamma: float, f: Poly, g: Poly, rule, rule_g1) -> dict:
    """Residual of the cone Green identity.

    -int (D f) g W_{mu,g} = int t (df/dt)(dg/dt) W_{mu,g+1}
        + sum_i int (D_{x_i}f)(D_{x_i}g) t^{-1} W_{mu,g}
        + sum_{i<j} int (D_{i,j}f)(D_{i,j}g) t^{-1} W_{mu,g};
    `rule` realizes W_{mu,gamma}, `rule_g1` realizes W_{mu,gamma+1}.
    """
    op = SpectralOp("cone", d, gamma, mu)
    pts, w = rule.points, rule.weights
    t = pts[..., d]
    x = pts[..., :d]
    lhs = -float(w @ (spectral_poly(op, f)(pts) * g(pts)))
    rf, rg = ray(f), ray(g)
    p1, w1 = rule_g1.points, rule_g1.weights
    rhs = float(w1 @ (p1[..., d] * rf(p1) * rg(p1)))
    phi2 = t * t - np.sum(x * x, axis=-1)
    for i in range(d):
        rhs += float(w @ (phi2 * partial(f, i)(pts) * partial(g, i)(pts) / t))
    for i in range(d):
        for j in range(i + 1, d):
            rhs += float(w @ (angular(f, i, j)(pts) * angular(g, i, j)(pts) / t))
    nf = math.sqrt(float(w @ f(pts) ** 2))
    ng = math.sqrt(float(w @ g(pts) ** 2))
    scale = max(abs(lhs), abs(rhs), nf * ng)
    return {"lhs": lhs, "rhs": rhs, "residual": abs(lhs - rhs), "scale": scale}


def cauchy_bound_check(d: int, gamma: float, f: Poly, rule) -> dict:
    """lhs = ||phi df/dt||^2 + sum ||t^{-1/2} D_{i,j} f||^2 against
    rhs = ||f|| * ||Dsp f|| in L^2 of the t^{-1}(1-t)^gamma surface measure."""
    op = SpectralOp("surface", d, gamma)
    pts, w = rule.points, rule.weights
    t = pts[..., d]
    lhs = float(w @ (t * (1 - t) * ray(f)(pts) ** 2))
    for i in range(d):
        for j in range(i + 1, d):
            lhs += float(w @ (angular(f, i, j)(pts) ** 2 / t))
    nf = math.sqrt(float(w @ f(pts) ** 2))
    nD = math.sqrt(float(w @ spectral_poly(op, f)(pts) ** 2))
    return {"lhs": lhs, "rhs": nf * nD, "ok": lhs <= nf * nD * (1 + 1e-8)}
