"""Sparse multivariate (Laurent) polynomial arithmetic for exact derivatives.

Ambient representations of basis elements on the cone/conic surface live in
variables (x_1, ..., x_d, t); by convention t is the *last* variable and is
the only one ever raised to negative powers (the spectral operators carry
t^{-1} factors).  Evaluation is vectorized over point batches, and all
derivative operators are exact, which is what the 1e-8 identity tolerances
need — finite differences appear only in independent test oracles.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Poly",
    "partial",
    "partial_t",
    "angular",
    "xgrad",
    "ray",
    "laplace_x",
]

_TRIM = 0.0  # exact-zero trim only; coefficients are never rounded


class Poly:
    """Sparse polynomial: dict mapping exponent tuples to float coefficients."""

    __slots__ = ("nv", "c")

    def __init__(self, nv: int, coeffs=None):
        self.nv = int(nv)
        self.c = {}
        if coeffs:
            for expo, coef in coeffs.items():
                if coef != 0.0:
                    if len(expo) != self.nv:
                        raise ValueError("exponent arity mismatch")
                    self.c[tuple(int(e) for e in expo)] = float(coef)

    @classmethod
    def const(cls, nv: int, value: float) -> "Poly":
        return cls(nv, {(0,) * nv: value})

    @classmethod
    def var(cls, nv: int, i: int, power: int = 1) -> "Poly":
        e = [0] * nv
        e[i] = power
        return cls(nv, {tuple(e): 1.0})

    def copy(self) -> "Poly":
        out = Poly(self.nv)
        out.c = dict(self.c)
        return out

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.nv, float(other))
        out = self.copy()
        for e, v in other.c.items():
            w = out.c.get(e, 0.0) + v
            if w == 0.0:
                out.c.pop(e, None)
            else:
                out.c[e] = w
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Poly(self.nv)
        out.c = {e: -v for e, v in self.c.items()}
        return out

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.nv, float(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            out = Poly(self.nv)
            f = float(other)
            if f != 0.0:
                out.c = {e: v * f for e, v in self.c.items()}
            return out
        out = Poly(self.nv)
        acc = out.c
        for e1, v1 in self.c.items():
            for e2, v2 in other.c.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                w = acc.get(e, 0.0) + v1 * v2
                if w == 0.0:
                    acc.pop(e, None)
                else:
                    acc[e] = w
        return out

    __rmul__ = __mul__

    def shift(self, i: int, power: int) -> "Poly":
        """Multiply by variable i raised to an integer (possibly negative) power."""
        out = Poly(self.nv)
        for e, v in self.c.items():
            e2 = list(e)
            e2[i] += power
            out.c[tuple(e2)] = v
        return out

    def diff(self, i: int) -> "Poly":
        out = Poly(self.nv)
        for e, v in self.c.items():
            k = e[i]
            if k == 0:
                continue
            e2 = list(e)
            e2[i] = k - 1
            key = tuple(e2)
            w = out.c.get(key, 0.0) + v * k
            if w == 0.0:
                out.c.pop(key, None)
            else:
                out.c[key] = w
        return out

    def degree(self) -> int:
        if not self.c:
            return -1
        return max(sum(e) for e in self.c)

    def min_power(self, i: int) -> int:
        """Smallest exponent of variable i (negative for Laurent terms)."""
        if not self.c:
            return 0
        return min(e[i] for e in self.c)

    __rmul__ = __mul__

    def __call__(self, pts) -> np.ndarray:
        """Evaluate at pts of shape (..., nv); Laurent terms need nonzero coords."""
        pts = np.asarray(pts, dtype=float)
        if pts.shape[-1] != self.nv:
            raise ValueError(f"expected last axis {self.nv}, got {pts.shape[-1]}")
        out = np.zeros(pts.shape[:-1])
        for e, v in self.c.items():
            term = np.full(pts.shape[:-1], v)
            for i, k in enumerate(e):
                if k:
                    term = term * pts[..., i] ** k
            out += term
        return out

    def __repr__(self):
        return f"Poly(nv={self.nv}, terms={len(self.c)})"


# ---------------------------------------------------------------------------
# derivative operators in the ambient layout (x_1..x_d, t)


def partial(p: Poly, i: int) -> Poly:
    return p.diff(i)


def partial_t(p: Poly) -> Poly:
    return p.diff(p.nv - 1)


def angular(p: Poly, i: int, j: int) -> Poly:
    """D_{i,j} = x_i d/dx_j - x_j d/dx_i (indices 0-based into the x block)."""
    return Poly.var(p.nv, i) * p.diff(j) - Poly.var(p.nv, j) * p.diff(i)


def xgrad(p: Poly) -> Poly:
    """<x, grad_x>, summed over the x block only."""
    out = Poly(p.nv)
    for i in range(p.nv - 1):
        out = out + Poly.var(p.nv, i) * p.diff(i)
    return out


def ray(p: Poly) -> Poly:
    """Derivative along rays through the apex: d/dt f(t y, t) = (d_t + t^{-1}<x,grad_x>) f."""
    return partial_t(p) + xgrad(p).shift(p.nv - 1, -1)


def laplace_x(p: Poly) -> Poly:
    out = Poly(p.nv)
    for i in range(p.nv - 1):
        out = out + p.diff(i).diff(i)
    return out
