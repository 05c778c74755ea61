"""Real spherical harmonics on S^1 and S^2 as homogeneous Cartesian polynomials.

Each harmonic is represented two ways:

* a `polyops.Poly` in the ambient x variables (homogeneous of degree m,
  harmonic), used wherever exact derivatives are required;
* a stable closed-form evaluator (r^m cos/sin(m theta) on the circle;
  Poly evaluation on S^2, where degrees stay small in this package).

Normalization is always *computed*: squared norms under the raw (surface
measure) quadrature are folded into the stored coefficients, so the family is
orthonormal in L^2(S^{d-1}, dsigma) without any closed-form constants.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .polyops import Poly
from .quadrature import sphere_rule

__all__ = ["harmonic_dim", "solid_harmonics", "harmonic_eval", "circle_harmonic_eval"]


def harmonic_dim(d: int, m: int) -> int:
    """dim H_m(S^{d-1}) for d = 2, 3."""
    if m < 0:
        raise ValueError("harmonic degree must be >= 0")
    if d == 2:
        return 1 if m == 0 else 2
    if d == 3:
        return 2 * m + 1
    raise NotImplementedError("harmonics implemented for d = 2, 3")


def _circle_pair(m: int) -> list:
    """Unnormalized Re/Im((x1 + i x2)^m) as Polys."""
    if m == 0:
        return [Poly.const(2, 1.0)]
    re = Poly(2)
    im = Poly(2)
    for p in range(m + 1):
        coef = math.comb(m, p)
        k = m - p  # power of (i x2)
        target = re if k % 2 == 0 else im
        sign = -1.0 if (k // 2) % 2 else 1.0
        target.c[(p, k)] = target.c.get((p, k), 0.0) + sign * coef
    return [re, im]


def _sphere_family(m: int) -> list:
    """Unnormalized real solid harmonics of degree m on R^3.

    Built from the isotropic-vector expansion: the coefficient of w^k in
    (z + (i/2)(w (x+iy) + w^{-1} (x-iy)))^m is a degree-m harmonic with
    azimuthal order k; its real and imaginary parts give the real family.
    """
    fam = []
    for order in range(m + 1):
        re = Poly(3)
        im = Poly(3)
        for k in range((m - order) // 2 + 1):
            a = order + k          # power of (x+iy), carries i^{order+2k}/2^{order+2k}
            b = k                  # power of (x-iy)
            c = m - order - 2 * k  # power of z
            base = math.factorial(m) / (
                math.factorial(a) * math.factorial(b) * math.factorial(c) * 2.0 ** (a + b)
            )
            # expand (x+iy)^a (x-iy)^b; running complex phase starts at i^{a+b}
            for p in range(a + 1):
                for q in range(b + 1):
                    ex = p + q
                    ey = (a - p) + (b - q)
                    # i^{a+b} * i^{a-p} * (-i)^{b-q} = i^{(a+b) + (a-p) - (b-q)} up to sign
                    phase = ((a + b) + (a - p) - (b - q)) % 4
                    mag = math.comb(a, p) * math.comb(b, q) * base
                    if phase == 0:
                        re.c[(ex, ey, c)] = re.c.get((ex, ey, c), 0.0) + mag
                    elif phase == 1:
                        im.c[(ex, ey, c)] = im.c.get((ex, ey, c), 0.0) + mag
                    elif phase == 2:
                        re.c[(ex, ey, c)] = re.c.get((ex, ey, c), 0.0) - mag
                    else:
                        im.c[(ex, ey, c)] = im.c.get((ex, ey, c), 0.0) - mag
        re.c = {e: v for e, v in re.c.items() if v != 0.0}
        im.c = {e: v for e, v in im.c.items() if v != 0.0}
        if order == 0:
            fam.append(re)
        else:
            fam.extend([re, im])
    return fam


@lru_cache(maxsize=None)
def solid_harmonics(d: int, m: int) -> tuple:
    """Orthonormal (surface-measure) basis of H_m(S^{d-1}) as homogeneous Polys."""
    fam = _circle_pair(m) if d == 2 else _sphere_family(m) if d == 3 else None
    if fam is None:
        raise NotImplementedError("harmonics implemented for d = 2, 3")
    rule = sphere_rule(d - 1, 2 * m + 2)
    out = []
    for p in fam:
        vals = p(rule.points)
        nrm2 = float(rule.weights @ vals**2)
        if nrm2 <= 0:
            raise RuntimeError("degenerate harmonic candidate")
        out.append(p * (1.0 / math.sqrt(nrm2)))
    return tuple(out)


def circle_harmonic_eval(m: int, j: int, x: np.ndarray) -> np.ndarray:
    """Stable circle evaluator: the degree-m orthonormal pair as r^m cos/sin(m theta).

    Matches solid_harmonics(2, m)[j] exactly (same normalization: 1/sqrt(2 pi)
    for m = 0, r^m cos(m th)/sqrt(pi), r^m sin(m th)/sqrt(pi) otherwise).
    """
    x = np.asarray(x, dtype=float)
    if m == 0:
        return np.full(x.shape[:-1], 1.0 / math.sqrt(2.0 * math.pi))
    r = np.hypot(x[..., 0], x[..., 1])
    th = np.arctan2(x[..., 1], x[..., 0])
    trig = np.cos(m * th) if j == 0 else np.sin(m * th)
    return r**m * trig / math.sqrt(math.pi)


def harmonic_eval(d: int, m: int, j: int, x: np.ndarray) -> np.ndarray:
    """Evaluate the j-th orthonormal harmonic of degree m at x (shape (..., d)).

    x need not be unit length: the homogeneous (solid) extension is returned.
    """
    if not 0 <= j < harmonic_dim(d, m):
        raise IndexError(f"harmonic index {j} out of range for d={d}, m={m}")
    if d == 2:
        return circle_harmonic_eval(m, j, x)
    return solid_harmonics(d, m)[j](np.asarray(x, dtype=float))
