"""Jacobi polynomials: recurrence evaluation, squared norms, kernel blocks.

Everything here is the classical (alpha, beta) family on [-1, 1] with weight
(1-x)^alpha (1+x)^beta, plus thin wrappers for the shifted family on [0, 1]
(argument 1-2t, weight t^alpha (1-t)^beta) that the conic bases are built from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "JacobiParams",
    "jacobi_all",
    "jacobi_eval",
    "jacobi_deriv_all",
    "jacobi_norm",
    "jacobi_at_one",
    "z_kernel",
    "shifted_all",
    "shifted_norm",
]


@dataclass(frozen=True)
class JacobiParams:
    """Parameter pair of a Jacobi family; both exponents must exceed -1."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > -1.0 and self.beta > -1.0):
            raise ValueError(
                f"Jacobi parameters must satisfy alpha, beta > -1, got "
                f"({self.alpha}, {self.beta})"
            )


def jacobi_all(nmax: int, alpha: float, beta: float, x) -> np.ndarray:
    """Evaluate P_k^{(alpha,beta)}(x) for all k = 0..nmax.

    Three-term recurrence, vectorized over x.  Returns an array of shape
    (nmax+1,) + x.shape.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape, dtype=float)
    out[0] = 1.0
    if nmax == 0:
        return out
    ab = alpha + beta
    out[1] = 0.5 * (alpha - beta + (ab + 2.0) * x)
    for n in range(2, nmax + 1):
        a1 = 2.0 * n * (n + ab) * (2.0 * n + ab - 2.0)
        a2 = (2.0 * n + ab - 1.0) * (alpha * alpha - beta * beta)
        a3 = (2.0 * n + ab - 1.0) * (2.0 * n + ab) * (2.0 * n + ab - 2.0)
        a4 = 2.0 * (n + alpha - 1.0) * (n + beta - 1.0) * (2.0 * n + ab)
        out[n] = ((a2 + a3 * x) * out[n - 1] - a4 * out[n - 2]) / a1
    return out


def jacobi_eval(n: int, alpha: float, beta: float, x):
    """P_n^{(alpha,beta)}(x) at scalar or array x."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    vals = jacobi_all(n, alpha, beta, np.asarray(x, dtype=float))[n]
    return vals if vals.shape else float(vals)


def jacobi_deriv_all(nmax: int, alpha: float, beta: float, x, order: int = 1) -> np.ndarray:
    """Derivatives d^m/dx^m P_k^{(alpha,beta)}(x) for all k = 0..nmax.

    Uses the parameter-shift identity: the m-th derivative of P_k is a
    constant times P_{k-m}^{(alpha+m, beta+m)}.
    """
    if order < 0:
        raise ValueError("derivative order must be nonnegative")
    x = np.asarray(x, dtype=float)
    if order == 0:
        return jacobi_all(nmax, alpha, beta, x)
    out = np.zeros((nmax + 1,) + x.shape, dtype=float)
    if nmax < order:
        return out
    base = jacobi_all(nmax - order, alpha + order, beta + order, x)
    for k in range(order, nmax + 1):
        # Gamma(k + m + ab + 1) / (2^m Gamma(k + ab + 1)) as a running product
        c = 1.0
        for j in range(order):
            c *= 0.5 * (k + alpha + beta + 1.0 + j)
        out[k] = c * base[k - order]
    return out


def jacobi_at_one(n: int, alpha: float, beta: float) -> float:
    """P_n^{(alpha,beta)}(1) = binom(n+alpha, n)."""
    if n == 0:
        return 1.0
    return math.exp(
        math.lgamma(n + alpha + 1.0) - math.lgamma(alpha + 1.0) - math.lgamma(n + 1.0)
    )


def jacobi_norm(n: int, alpha: float, beta: float) -> float:
    """Squared L2 norm of P_n^{(alpha,beta)} against (1-x)^alpha (1+x)^beta on [-1,1].

    Closed form through lgamma, arranged so every Gamma argument stays positive
    for alpha, beta > -1 (in particular at n = 0 with alpha + beta <= -1).
    """
    JacobiParams(alpha, beta)
    ab = alpha + beta
    if n == 0:
        ratio = 1.0
    else:
        ratio = (n + ab + 1.0) / (2.0 * n + ab + 1.0)
    return ratio * math.exp(
        (ab + 1.0) * math.log(2.0)
        + math.lgamma(n + alpha + 1.0)
        + math.lgamma(n + beta + 1.0)
        - math.lgamma(n + 1.0)
        - math.lgamma(n + ab + 2.0)
    )


def z_kernel(n: int, alpha: float, beta: float, x):
    """Kernel block Z_n(x) = P_n(x) P_n(1) / h_n with h_n the squared norm."""
    scale = jacobi_at_one(n, alpha, beta) / jacobi_norm(n, alpha, beta)
    p = jacobi_eval(n, alpha, beta, x)
    return p * scale


def z_kernel_all(nmax: int, alpha: float, beta: float, x) -> np.ndarray:
    """All blocks Z_k(x), k = 0..nmax, stacked along the first axis."""
    vals = jacobi_all(nmax, alpha, beta, np.asarray(x, dtype=float))
    for k in range(nmax + 1):
        vals[k] *= jacobi_at_one(k, alpha, beta) / jacobi_norm(k, alpha, beta)
    return vals


# ----- shifted family on [0, 1] ------------------------------------------------
#
# q_k(t) := P_k^{(alpha,beta)}(1 - 2t) is orthogonal against t^alpha (1-t)^beta.


def shifted_all(nmax: int, alpha: float, beta: float, t, order: int = 0) -> np.ndarray:
    """d^m/dt^m of P_k^{(alpha,beta)}(1-2t) for k = 0..nmax (m = order)."""
    t = np.asarray(t, dtype=float)
    vals = jacobi_deriv_all(nmax, alpha, beta, 1.0 - 2.0 * t, order=order)
    if order:
        vals *= (-2.0) ** order
    return vals


def shifted_norm(n: int, alpha: float, beta: float) -> float:
    """Squared norm of P_n^{(alpha,beta)}(1-2t) against t^alpha (1-t)^beta on [0,1]."""
    return jacobi_norm(n, alpha, beta) / 2.0 ** (alpha + beta + 1.0)
