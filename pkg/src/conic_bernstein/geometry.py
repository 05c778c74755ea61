"""Domains, points, intrinsic distances, weight families, and the cone lift.

Conventions used throughout the package:

* points on the conic surface or solid cone are pairs (x, t) with x a
  d-vector, ``||x|| = t`` (surface) or ``||x|| <= t`` (solid), 0 <= t <= 1;
* flat arrays pack a batch of points as rows (x_1..x_d, t);
* all arccos arguments are clamped to [-1, 1] with an absolute slack of
  1e-12 — anything further out raises, since it signals a genuine bug
  rather than roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

CLAMP_SLACK = 1e-12
MEMBER_TOL = 1e-12

__all__ = [
    "ConicPoint",
    "WeightSpec",
    "LiftedPoint",
    "BallMeasureEstimate",
    "dist_interval",
    "dist_sphere",
    "dist_surface",
    "dist_ball",
    "dist_cone",
    "weight_eval",
    "ball_measure_proxy",
    "lift",
    "lift_coords",
    "triangle_map",
    "triangle_map_inverse",
]


def _safe_arccos(c):
    c = np.asarray(c, dtype=float)
    if np.any(c > 1.0 + CLAMP_SLACK) or np.any(c < -1.0 - CLAMP_SLACK):
        worst = float(np.max(np.abs(c)))
        raise ValueError(f"arccos argument out of range beyond slack: |arg| up to {worst}")
    return np.arccos(np.clip(c, -1.0, 1.0))


def _safe_sqrt(s):
    s = np.asarray(s, dtype=float)
    if np.any(s < -CLAMP_SLACK):
        raise ValueError(f"sqrt argument negative beyond slack: min {float(np.min(s))}")
    return np.sqrt(np.clip(s, 0.0, None))


@dataclass(frozen=True)
class ConicPoint:
    """A validated point (x, t) on the conic surface or solid cone."""

    x: tuple
    t: float
    kind: str = "surface"

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in np.atleast_1d(self.x)))
        object.__setattr__(self, "t", float(self.t))
        if self.kind not in ("surface", "solid"):
            raise ValueError(f"unknown point kind {self.kind!r}")
        if not (-MEMBER_TOL <= self.t <= 1.0 + MEMBER_TOL):
            raise ValueError(f"t = {self.t} outside [0, 1]")
        r = math.sqrt(sum(v * v for v in self.x))
        if self.kind == "surface":
            if abs(r - self.t) > 1e-12 * max(1.0, self.t) + MEMBER_TOL:
                raise ValueError(f"surface point needs ||x|| = t; got ||x||={r}, t={self.t}")
        elif r > self.t + MEMBER_TOL:
            raise ValueError(f"solid point needs ||x|| <= t; got ||x||={r}, t={self.t}")

    @property
    def d(self) -> int:
        return len(self.x)

    def coords(self) -> np.ndarray:
        """Flat (d+1,) array (x_1..x_d, t)."""
        return np.array(self.x + (self.t,))


@dataclass(frozen=True)
class WeightSpec:
    """One member of the explicit Jacobi-type weight families.

    families and parameter tuples:
      interval  -- t^alpha (1-t)^beta on [0, 1], params (alpha, beta)
      surface   -- t^beta (1-t)^gamma on the conic surface, params (beta, gamma)
      cone      -- (t^2-||x||^2)^(mu-1/2) (1-t)^gamma, params (mu, gamma)
      triangle  -- y1^a y2^b (1-y1-y2)^c, params (a, b, c)
      ball      -- (1-||u||^2)^(mu-1/2), params (mu,)
      sphere    -- constant 1 (surface measure), params ()
    """

    family: str
    d: int
    params: tuple

    @classmethod
    def interval(cls, alpha: float, beta: float) -> "WeightSpec":
        if not (alpha > -1 and beta > -1):
            raise ValueError("interval weight needs alpha, beta > -1")
        return cls("interval", 1, (float(alpha), float(beta)))

    @classmethod
    def surface(cls, d: int, beta: float, gamma: float) -> "WeightSpec":
        if d < 2:
            raise ValueError("surface weight needs d >= 2")
        if not (beta > -d and gamma > -1):
            raise ValueError(f"surface weight needs beta > -{d} and gamma > -1")
        return cls("surface", d, (float(beta), float(gamma)))

    @classmethod
    def cone(cls, d: int, mu: float, gamma: float) -> "WeightSpec":
        if d < 1:
            raise ValueError("cone weight needs d >= 1")
        if not (mu > -0.5 and gamma > -1):
            raise ValueError("cone weight needs mu > -1/2 and gamma > -1")
        return cls("cone", d, (float(mu), float(gamma)))

    @classmethod
    def triangle(cls, a: float, b: float, c: float) -> "WeightSpec":
        if not (a > -1 and b > -1 and c > -1):
            raise ValueError("triangle weight needs a, b, c > -1")
        return cls("triangle", 2, (float(a), float(b), float(c)))

    @classmethod
    def ball(cls, d: int, mu: float) -> "WeightSpec":
        if mu <= -0.5:
            raise ValueError("ball weight needs mu > -1/2")
        return cls("ball", d, (float(mu),))

    @classmethod
    def sphere(cls, d: int) -> "WeightSpec":
        return cls("sphere", d, ())

    # named accessors; raise AttributeError-style failures only on misuse
    @property
    def beta(self) -> float:
        if self.family == "surface":
            return self.params[0]
        if self.family == "interval":
            return self.params[1]
        raise ValueError(f"no beta parameter for family {self.family!r}")

    @property
    def gamma(self) -> float:
        if self.family in ("surface", "cone"):
            return self.params[1]
        raise ValueError(f"no gamma parameter for family {self.family!r}")

    @property
    def mu(self) -> float:
        if self.family in ("cone", "ball"):
            return self.params[0]
        raise ValueError(f"no mu parameter for family {self.family!r}")

    @property
    def abc(self) -> tuple:
        if self.family != "triangle":
            raise ValueError(f"no (a,b,c) parameters for family {self.family!r}")
        return self.params


@dataclass(frozen=True)
class LiftedPoint:
    """Image of a solid-cone point under (x,t) -> ((x, +-sqrt(t^2-||x||^2)), t)."""

    X: tuple
    t: float
    mirrored: bool = False

    def __post_init__(self):
        object.__setattr__(self, "X", tuple(float(v) for v in self.X))
        r = math.sqrt(sum(v * v for v in self.X))
        if abs(r - self.t) > 1e-10 * max(1.0, self.t) + 1e-12:
            raise ValueError("lifted point must satisfy ||X|| = t")

    def as_surface_point(self) -> ConicPoint:
        return ConicPoint(self.X, self.t, kind="surface")


@dataclass(frozen=True)
class BallMeasureEstimate:
    n: int
    t: float
    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("ball-measure proxy must be positive")


# ---------------------------------------------------------------------------
# distances


def dist_interval(t, s):
    """arccos(sqrt(t s) + sqrt((1-t)(1-s))) on [0,1]; range [0, pi/2]."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    return _safe_arccos(_safe_sqrt(t) * _safe_sqrt(s) + _safe_sqrt(1 - t) * _safe_sqrt(1 - s))


def dist_sphere(xi, eta):
    """Geodesic distance arccos<xi, eta> between unit vectors (last axis)."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    for v in (xi, eta):
        nrm = np.linalg.norm(v, axis=-1)
        if np.any(np.abs(nrm - 1.0) > 1e-10):
            raise ValueError("dist_sphere requires unit vectors")
    return _safe_arccos(np.sum(xi * eta, axis=-1))


def _unpack(p):
    if isinstance(p, ConicPoint):
        return np.asarray(p.x, dtype=float), np.asarray(p.t, dtype=float)
    if isinstance(p, LiftedPoint):
        return np.asarray(p.X, dtype=float), np.asarray(p.t, dtype=float)
    x, t = p
    return np.asarray(x, dtype=float), np.asarray(t, dtype=float)


def dist_surface(p, q):
    """Intrinsic distance on the conic surface.

    Accepts ConicPoint instances or raw pairs (x, t) with x of shape (..., d)
    and t of shape (...,); broadcasts over the batch axes.
    """
    x, t = _unpack(p)
    y, s = _unpack(q)
    inner = (np.sum(x * y, axis=-1) + t * s) / 2.0
    return _safe_arccos(_safe_sqrt(inner) + _safe_sqrt(1 - t) * _safe_sqrt(1 - s))


def dist_ball(u, v):
    """arccos(<u,v> + sqrt(1-||u||^2) sqrt(1-||v||^2)) on the unit ball."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    ru2 = np.sum(u * u, axis=-1)
    rv2 = np.sum(v * v, axis=-1)
    if np.any(ru2 > 1.0 + 1e-12) or np.any(rv2 > 1.0 + 1e-12):
        raise ValueError("dist_ball arguments must lie in the closed unit ball")
    return _safe_arccos(np.sum(u * v, axis=-1) + _safe_sqrt(1 - ru2) * _safe_sqrt(1 - rv2))


def dist_cone(p, q):
    """Intrinsic distance on the solid cone; equals dist_surface of the lifts."""
    x, t = _unpack(p)
    y, s = _unpack(q)
    gx = _safe_sqrt(t * t - np.sum(x * x, axis=-1))
    gy = _safe_sqrt(s * s - np.sum(y * y, axis=-1))
    inner = (np.sum(x * y, axis=-1) + gx * gy + t * s) / 2.0
    return _safe_arccos(_safe_sqrt(inner) + _safe_sqrt(1 - t) * _safe_sqrt(1 - s))


# ---------------------------------------------------------------------------
# weights


def weight_eval(w: WeightSpec, points) -> np.ndarray:
    """Evaluate the weight at points (rows in the flat layout of each domain).

    Zeros of the weight hit with a negative exponent return +inf (an explicit
    flag, not an exception); quadrature node placement guarantees integrators
    never sample there.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    with np.errstate(divide="ignore"):
        if w.family == "interval":
            alpha, beta = w.params
            t = pts[..., 0]
            out = _pow(t, alpha) * _pow(1.0 - t, beta)
        elif w.family == "surface":
            beta, gamma = w.params
            t = pts[..., w.d]
            out = _pow(t, beta) * _pow(1.0 - t, gamma)
        elif w.family == "cone":
            mu, gamma = w.params
            x, t = pts[..., : w.d], pts[..., w.d]
            out = _pow(t * t - np.sum(x * x, axis=-1), mu - 0.5) * _pow(1.0 - t, gamma)
        elif w.family == "triangle":
            a, b, c = w.params
            y1, y2 = pts[..., 0], pts[..., 1]
            out = _pow(y1, a) * _pow(y2, b) * _pow(1.0 - y1 - y2, c)
        elif w.family == "ball":
            (mu,) = w.params
            out = _pow(1.0 - np.sum(pts * pts, axis=-1), mu - 0.5)
        elif w.family == "sphere":
            out = np.ones(pts.shape[:-1])
        else:
            raise ValueError(f"unknown weight family {w.family!r}")
    return out


def _pow(base, expo):
    base = np.atleast_1d(np.asarray(base, dtype=float))
    if expo == 0.0:
        return np.ones_like(base)
    base = np.clip(base, 0.0, None)
    if expo > 0:
        return base**expo
    out = np.full_like(base, np.inf)
    pos = base > 0.0
    out[pos] = base[pos] ** expo
    return out


def ball_measure_proxy(n: int, t, gamma: float, d: int):
    """Degree-n proxy (1-t+n^-2)^(gamma+1/2) (t+n^-2)^((d-2)/2) for the
    weighted measure of an intrinsic ball of radius 1/n around level t."""
    if n < 1:
        raise ValueError("proxy needs n >= 1")
    t = np.asarray(t, dtype=float)
    inv = 1.0 / (n * n)
    return (1.0 - t + inv) ** (gamma + 0.5) * (t + inv) ** ((d - 2) / 2.0)


# ---------------------------------------------------------------------------
# lift and triangle chart


def lift_coords(x, t, mirrored: bool = False):
    """Vectorized lift: append +-sqrt(t^2 - ||x||^2) to x. Shapes (...,d),(...,)."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    g = _safe_sqrt(t * t - np.sum(x * x, axis=-1))
    if mirrored:
        g = -g
    return np.concatenate([x, g[..., None]], axis=-1)


def lift(p, mirrored: bool = False) -> LiftedPoint:
    x, t = _unpack(p)
    X = lift_coords(x, t, mirrored=mirrored)
    return LiftedPoint(tuple(X.tolist()), float(t), mirrored=mirrored)


def triangle_map(y):
    """Chart T^2 -> V^2 (cone at d=1): (y1, y2) -> (x, t) = (y1-y2, y1+y2)."""
    y = np.asarray(y, dtype=float)
    y1, y2 = y[..., 0], y[..., 1]
    if np.any(y1 < -1e-12) or np.any(y2 < -1e-12) or np.any(y1 + y2 > 1 + 1e-12):
        raise ValueError("triangle_map input outside the triangle")
    return np.stack([y1 - y2, y1 + y2], axis=-1)


def triangle_map_inverse(xt):
    """Inverse chart: (x, t) -> ((t+x)/2, (t-x)/2)."""
    xt = np.asarray(xt, dtype=float)
    x, t = xt[..., 0], xt[..., 1]
    if np.any(np.abs(x) > t + 1e-12) or np.any(t > 1 + 1e-12):
        raise ValueError("triangle_map_inverse input outside the d=1 cone")
    return np.stack([(t + x) / 2.0, (t - x) / 2.0], axis=-1)
