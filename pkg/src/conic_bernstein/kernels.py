"""Reproducing and localized kernels on the conic surface and solid cone.

Two independent evaluation routes are kept side by side on purpose: the sum
over an orthonormal basis, and the closed-form integral of a one-dimensional
Jacobi kernel composed with the domain argument (zeta on the surface, xi on
the cone).  Tests compare them; neither is allowed to silently replace the
other.

Normalization: by default every kernel is "raw", i.e. it reproduces under the
plain weighted integral with no normalizing constant, so the degree-0 kernel
is 1/(weighted measure).  The closed forms are calibrated internally so that
the degree-0 kernel would be identically 1 (the constant is computed from the
degree-0 integral, never from a Gamma-function expression); pass
``normalization="unit"`` to get that convention instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bases import ConeBasis, SurfaceBasis
from .cutoff import CutoffFn
from .geometry import ball_measure_proxy, dist_cone, dist_surface, lift_coords
from .jacobi import z_kernel, z_kernel_all
from .quadrature import cone_rule, gauss_jacobi, surface_rule

__all__ = [
    "KernelConfig",
    "UnsupportedConfigError",
    "DecayTable",
    "basis_handle",
    "repro_kernel_sum",
    "repro_kernel_addition",
    "localized_kernel",
    "cone_kernel",
    "lift_identity_check",
    "decay_profile",
    "derivative_decay_probe",
]


class UnsupportedConfigError(ValueError):
    """Raised when a closed form does not exist for the requested parameters."""


@dataclass(frozen=True)
class KernelConfig:
    """Kernel family parameters plus verification exponents.

    domain 'surface' pairs with the weight t^beta (1-t)^gamma (beta = -1 for
    the closed forms); domain 'cone' with (t^2-||x||^2)^(mu-1/2) (1-t)^gamma
    (mu = 0 for the closed form).  quad_order controls the reference rule used
    for reproduction checks and must resolve products of two degree-n kernels.
    decay_kappa is the localization exponent kappa, decay_beta the exponent
    used by the maximal-function comparisons downstream.
    """

    domain: str
    gamma: float
    d: int
    n: int
    quad_order: int = 0  # 0 -> default 2n + 8
    cutoff: CutoffFn = field(default_factory=CutoffFn)
    decay_kappa: float = 6.0
    decay_beta: float = 3.0
    beta: float = -1.0
    mu: float = 0.0

    def __post_init__(self):
        if self.domain not in ("surface", "cone"):
            raise ValueError(f"unknown kernel domain {self.domain!r}")
        if not self.gamma >= -0.5:
            raise ValueError("gamma must be >= -1/2 for the kernel families")
        if self.d < (2 if self.domain == "surface" else 1):
            raise ValueError("dimension too small for this domain")
        if self.n < 0:
            raise ValueError("degree must be nonnegative")
        if self.quad_order == 0:
            object.__setattr__(self, "quad_order", 2 * self.n + 8)
        if self.quad_order < 2 * self.n + 2:
            raise ValueError("quad_order must be at least 2n + 2")
        if not self.decay_kappa > 0:
            raise ValueError("decay_kappa must be positive")


_HANDLE_CACHE: dict = {}


def basis_handle(cfg: KernelConfig, degree: int | None = None):
    """Orthonormal basis handle for cfg's weight, cached per (family, degree)."""
    nmax = cfg.n if degree is None else degree
    if cfg.domain == "surface":
        key = ("surface", cfg.d, cfg.beta, cfg.gamma, nmax)
        if key not in _HANDLE_CACHE:
            _HANDLE_CACHE[key] = SurfaceBasis(cfg.d, cfg.beta, cfg.gamma, nmax)
    else:
        key = ("cone", cfg.d, cfg.mu, cfg.gamma, nmax)
        if key not in _HANDLE_CACHE:
            _HANDLE_CACHE[key] = ConeBasis(cfg.d, cfg.mu, cfg.gamma, nmax)
    return _HANDLE_CACHE[key]


def reference_rule(cfg: KernelConfig, extra: int = 0):
    """Quadrature realizing cfg's weight, for reproduction checks."""
    if cfg.domain == "surface":
        return surface_rule(cfg.d, cfg.beta, cfg.gamma, cfg.quad_order + extra)
    return cone_rule(cfg.d, cfg.mu, cfg.gamma, cfg.quad_order + extra)


def _measure(cfg: KernelConfig) -> float:
    if cfg.domain == "surface":
        return float(np.sum(surface_rule(cfg.d, cfg.beta, cfg.gamma, 2).weights))
    return float(np.sum(cone_rule(cfg.d, cfg.mu, cfg.gamma, 2).weights))


def _rows(cfg: KernelConfig, p):
    """Coerce a point (ConicPoint / (x,t) pair / row array) to (N, d+1) rows."""
    if hasattr(p, "coords"):
        return np.atleast_2d(np.asarray(p.coords(), dtype=float)), True
    if isinstance(p, tuple) and len(p) == 2:
        x = np.atleast_1d(np.asarray(p[0], dtype=float))
        t = np.asarray(p[1], dtype=float)
        if x.ndim == 1 and t.ndim == 0:
            return np.concatenate([x, [float(t)]])[None, :], True
        return np.concatenate([x, t[..., None]], axis=-1), False
    arr = np.asarray(p, dtype=float)
    if arr.ndim == 1:
        return arr[None, :], True
    return arr, False


def repro_kernel_sum(cfg: KernelConfig, p, q):
    """Degree-exactly-n projection kernel as a sum over the orthonormal basis."""
    handle = basis_handle(cfg)
    P, sp = _rows(cfg, p)
    Q, sq = _rows(cfg, q)
    mask = np.array([ix.n == cfg.n for ix in handle.indices])
    mp = handle.eval_matrix(P, orthonormal=True)[mask]
    mq = handle.eval_matrix(Q, orthonormal=True)[mask]
    out = np.einsum("kp,kq->pq", mp, mq) if len(P) != len(Q) else np.sum(mp * mq, axis=0)
    if len(P) != len(Q):
        out = np.squeeze(out)
    if sp and sq:
        return float(np.squeeze(out))
    return out


def _pair_nodes(exponent: float, order: int):
    """Nodes/weights on [-1,1] for the weight (1-v^2)^exponent.

    The endpoint case exponent = -1 is the degenerate limit of the normalized
    measures and collapses to point masses 1/2 at v = +-1.
    """
    if exponent <= -1.0 + 1e-13:
        return np.array([-1.0, 1.0]), np.array([0.5, 0.5])
    return gauss_jacobi(order, exponent, exponent)


def _surface_zeta(P, Q, v1, v2):
    """zeta(p, q; v) on node grids; returns (npairs, K1, K2)."""
    d = P.shape[-1] - 1
    t, s = P[..., d], Q[..., d]
    dot = np.sum(P[..., :d] * Q[..., :d], axis=-1)
    a = np.sqrt(np.clip((s * t + dot) / 2.0, 0.0, None))
    b = np.sqrt(np.clip(1.0 - t, 0.0, None)) * np.sqrt(np.clip(1.0 - s, 0.0, None))
    return v1[:, None] * a[..., None, None] + v2[None, :] * b[..., None, None]


def repro_kernel_addition(cfg: KernelConfig, p, q, normalization: str = "raw"):
    """Closed-form surface projection kernel (weight t^{-1}(1-t)^gamma only).

    Integral of Z_n^{(gamma+d-3/2,-1/2)}(2 zeta^2 - 1) against the product
    Jacobi measure in v; the d = 2 and gamma = -1/2 endpoint limits degenerate
    to +-1 point masses.  The constant in front is calibrated from the n = 0
    integral.
    """
    if cfg.domain != "surface" or cfg.beta != -1.0:
        raise UnsupportedConfigError(
            "closed-form kernel requires the surface family with beta = -1"
        )
    if cfg.d < 2:
        raise UnsupportedConfigError("closed-form kernel requires d >= 2")
    lam = cfg.gamma + cfg.d - 1.5
    order = cfg.n + 8
    v1, w1 = _pair_nodes((cfg.d - 4) / 2.0, order)
    v2, w2 = _pair_nodes(cfg.gamma - 0.5, order)
    P, sp = _rows(cfg, p)
    Q, sq = _rows(cfg, q)
    zeta = _surface_zeta(P, Q, v1, v2)
    arg = np.clip(2.0 * zeta * zeta - 1.0, -1.0, 1.0)
    vals = z_kernel(cfg.n, lam, -0.5, arg)
    In = np.einsum("i,j,...ij->...", w1, w2, vals)
    I0 = float(z_kernel(0, lam, -0.5, np.array(1.0))) * w1.sum() * w2.sum()
    out = In / I0
    if normalization == "raw":
        out = out / _measure(cfg)
    elif normalization != "unit":
        raise ValueError(f"unknown normalization {normalization!r}")
    if sp and sq:
        return float(np.squeeze(out))
    return out


def _cone_xi_args(cfg, P, Q, v1, v2):
    """2 xi^2 - 1 for the two mirror terms u = +1, -1; each (npairs, K1, K2)."""
    d = P.shape[-1] - 1
    t, s = P[..., d], Q[..., d]
    dot = np.sum(P[..., :d] * Q[..., :d], axis=-1)
    phip = np.sqrt(np.clip(t * t - np.sum(P[..., :d] ** 2, axis=-1), 0.0, None))
    phiq = np.sqrt(np.clip(s * s - np.sum(Q[..., :d] ** 2, axis=-1), 0.0, None))
    b = np.sqrt(np.clip(1.0 - t, 0.0, None)) * np.sqrt(np.clip(1.0 - s, 0.0, None))
    args = []
    for u in (1.0, -1.0):
        c = np.sqrt(np.clip((t * s + dot + u * phip * phiq) / 2.0, 0.0, None))
        xi = v1[:, None] * c[..., None, None] + v2[None, :] * b[..., None, None]
        args.append(np.clip(2.0 * xi * xi - 1.0, -1.0, 1.0))
    return args


def cone_kernel(cfg: KernelConfig, p, q, normalization: str = "raw"):
    """Closed-form cone projection kernel (mu = 0 only; other mu: sum form).

    Sum of two Z_n^{(gamma+d-1/2,-1/2)} terms, one per sign of the lifted last
    coordinate, integrated against the product Jacobi measure in v.
    """
    if cfg.domain != "cone" or cfg.mu != 0.0:
        raise UnsupportedConfigError("closed-form cone kernel requires mu = 0")
    if cfg.d < 2:
        raise UnsupportedConfigError("closed-form cone kernel requires d >= 2")
    lam = cfg.gamma + cfg.d - 0.5
    order = cfg.n + 8
    v1, w1 = _pair_nodes((cfg.d - 3) / 2.0, order)
    v2, w2 = _pair_nodes(cfg.gamma - 0.5, order)
    P, sp = _rows(cfg, p)
    Q, sq = _rows(cfg, q)
    In = 0.0
    for arg in _cone_xi_args(cfg, P, Q, v1, v2):
        In = In + np.einsum("i,j,...ij->...", w1, w2, z_kernel(cfg.n, lam, -0.5, arg))
    I0 = 2.0 * float(z_kernel(0, lam, -0.5, np.array(1.0))) * w1.sum() * w2.sum()
    out = In / I0
    if normalization == "raw":
        out = out / _measure(cfg)
    elif normalization != "unit":
        raise ValueError(f"unknown normalization {normalization!r}")
    if sp and sq:
        return float(np.squeeze(out))
    return out


def _cutoff_weights(cfg: KernelConfig) -> np.ndarray:
    return cfg.cutoff(np.arange(2 * cfg.n + 1) / cfg.n)


def localized_kernel(cfg: KernelConfig, p, q, form: str = "sum"):
    """L_n(p, q) = sum_k a(k/n) P_k(p, q); a polynomial of degree <= 2n.

    form 'sum' goes through the orthonormal basis to degree 2n and works for
    every supported weight; form 'integral' goes through the univariate
    localized Jacobi kernel under the same composition as the closed-form
    projection kernels (surface beta = -1, or cone mu = 0).
    """
    if cfg.n < 1:
        raise ValueError("localized kernel needs n >= 1")
    P, sp = _rows(cfg, p)
    Q, sq = _rows(cfg, q)
    if form == "sum":
        handle = basis_handle(cfg, degree=2 * cfg.n)
        coef = cfg.cutoff(np.array([ix.n for ix in handle.indices]) / cfg.n)
        mp = handle.eval_matrix(P, orthonormal=True)
        mq = handle.eval_matrix(Q, orthonormal=True)
        if len(P) != len(Q):
            out = np.squeeze(np.einsum("k,kp,kq->pq", coef, mp, mq))
        else:
            out = np.sum(coef[:, None] * mp * mq, axis=0)
    elif form == "integral":
        out = _localized_integral(cfg, P, Q)
    else:
        raise ValueError(f"unknown form {form!r}")
    if sp and sq:
        return float(np.squeeze(out))
    return out


def _localized_integral(cfg: KernelConfig, P, Q):
    acut = _cutoff_weights(cfg)
    kmax = 2 * cfg.n
    order = 2 * cfg.n + 8
    if cfg.domain == "surface":
        if cfg.beta != -1.0:
            raise UnsupportedConfigError("integral form requires beta = -1")
        lam = cfg.gamma + cfg.d - 1.5
        v1, w1 = _pair_nodes((cfg.d - 4) / 2.0, order)
        v2, w2 = _pair_nodes(cfg.gamma - 0.5, order)
        args = [_surface_zeta(P, Q, v1, v2)]
        nterms = 1.0
    else:
        if cfg.mu != 0.0:
            raise UnsupportedConfigError("integral form requires mu = 0")
        lam = cfg.gamma + cfg.d - 0.5
        v1, w1 = _pair_nodes((cfg.d - 3) / 2.0, order)
        v2, w2 = _pair_nodes(cfg.gamma - 0.5, order)
        args = _cone_xi_args(cfg, P, Q, v1, v2)
        nterms = 2.0
    I0 = nterms * float(z_kernel(0, lam, -0.5, np.array(1.0))) * w1.sum() * w2.sum()
    npairs = max(args[0].shape[0], 1)
    chunk = max(1, int(4e6 / ((kmax + 1) * len(v1) * len(v2))))
    out = np.zeros(args[0].shape[0])
    for lo in range(0, npairs, chunk):
        acc = 0.0
        for a in args:
            if cfg.domain == "surface":
                a = np.clip(2.0 * a * a - 1.0, -1.0, 1.0)
            zz = z_kernel_all(kmax, lam, -0.5, a[lo : lo + chunk])
            acc = acc + np.tensordot(acut, zz, axes=1)
        out[lo : lo + chunk] = np.einsum("i,j,...ij->...", w1, w2, acc)
    return out / I0 / _measure(cfg)


def lift_identity_check(cfg: KernelConfig, pairs, n_samples: int = 200, seed: int = 0):
    """Max residual of: cone L_n(p, q) = surface L_n(lift p, lift q)
                                        + surface L_n(lift p, mirror lift q).

    The surface family lives one dimension up with the same gamma; both sides
    use the raw normalization, under which the identity has constant exactly 1.
    pairs may be None (then n_samples random pairs are drawn).
    """
    if cfg.domain != "cone":
        raise UnsupportedConfigError("lift identity starts from a cone config")
    if pairs is None:
        rng = np.random.default_rng(seed)
        t = rng.uniform(0.05, 0.95, size=(2, n_samples))
        y = rng.normal(size=(2, n_samples, cfg.d))
        y /= np.linalg.norm(y, axis=-1, keepdims=True)
        r = rng.uniform(0.0, 1.0, size=(2, n_samples)) ** (1.0 / cfg.d)
        P = np.concatenate([(t[0] * r[0])[:, None] * y[0], t[0][:, None]], axis=1)
        Q = np.concatenate([(t[1] * r[1])[:, None] * y[1], t[1][:, None]], axis=1)
    else:
        P, Q = pairs
    scfg = KernelConfig(
        "surface", cfg.gamma, cfg.d + 1, cfg.n, cfg.quad_order, cfg.cutoff,
        cfg.decay_kappa, cfg.decay_beta,
    )
    d = cfg.d
    XP = np.column_stack([lift_coords(P[:, :d], P[:, d]), P[:, d]])
    XQ = np.column_stack([lift_coords(Q[:, :d], Q[:, d]), Q[:, d]])
    XQm = XQ.copy()
    XQm[:, d] = -XQm[:, d]
    lhs = localized_kernel(cfg, P, Q)
    rhs = localized_kernel(scfg, XP, XQ) + localized_kernel(scfg, XP, XQm)
    scale = np.max(np.abs(lhs)) + np.max(np.abs(rhs))
    return {
        "residual": float(np.max(np.abs(lhs - rhs))),
        "scale": float(scale),
        "relative": float(np.max(np.abs(lhs - rhs)) / scale),
    }


# ---------------------------------------------------------------------------
# localization sweeps


@dataclass
class DecayTable:
    """Rows (n, dist, value, envelope, ratio) from a localization sweep."""

    n: np.ndarray
    dist: np.ndarray
    value: np.ndarray
    envelope: np.ndarray

    @property
    def ratio(self) -> np.ndarray:
        return np.abs(self.value) / self.envelope

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratio))

    def to_csv(self) -> str:
        lines = ["n,dist,value,envelope,ratio"]
        ratio = self.ratio
        for i in range(len(self.dist)):
            lines.append(
                f"{int(self.n[i])},{float(self.dist[i])!r},{float(self.value[i])!r},"
                f"{float(self.envelope[i])!r},{float(ratio[i])!r}"
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def concat(cls, tables):
        return cls(
            np.concatenate([t.n for t in tables]),
            np.concatenate([t.dist for t in tables]),
            np.concatenate([t.value for t in tables]),
            np.concatenate([t.envelope for t in tables]),
        )


def _surface_proxy(cfg: KernelConfig, t):
    return ball_measure_proxy(cfg.n, t, cfg.gamma, cfg.d)


def decay_profile(cfg: KernelConfig, anchor, probes) -> DecayTable:
    """|L_n| against the envelope n^d / (sqrt(proxy) sqrt(proxy) (1+n dist)^kappa).

    The proxy is the measure of a ball of radius 1/n around each argument.
    Output rows follow the probe order.
    """
    if cfg.domain != "surface":
        raise UnsupportedConfigError("decay profile applies to the surface kernel")
    P, _ = _rows(cfg, anchor)
    Q, _ = _rows(cfg, probes)
    if len(P) == 1 and len(Q) > 1:
        P = np.broadcast_to(P, Q.shape).copy()
    val = localized_kernel(cfg, P, Q)
    dist = dist_surface((P[:, : cfg.d], P[:, cfg.d]), (Q[:, : cfg.d], Q[:, cfg.d]))
    env = cfg.n**cfg.d / (
        np.sqrt(_surface_proxy(cfg, P[:, cfg.d]))
        * np.sqrt(_surface_proxy(cfg, Q[:, cfg.d]))
        * (1.0 + cfg.n * dist) ** cfg.decay_kappa
    )
    nn = np.full(len(dist), cfg.n)
    return DecayTable(nn, np.atleast_1d(dist), np.atleast_1d(val), np.atleast_1d(env))


def _surface_deriv_rows(handle, pts, op_tag: str, plane=(0, 1)) -> np.ndarray:
    """Orthonormal basis rows after d_t (along rays) or D_{i,j}, analytically.

    Elements factor as q(t) * Y_m(x) with Y_m homogeneous of degree m, so the
    ray derivative is (q' + (m/t) q) Y_m, and D_{i,j} acts on Y_m alone.  For
    d = 2 the angular derivative rotates the harmonic pair: D(cos part) =
    -m (sin part), D(sin part) = m (cos part).  Higher d falls back to the
    ambient polynomial representation (fine at moderate degree).
    """
    from . import jacobi
    from .harmonics import harmonic_dim, harmonic_eval
    from .polyops import angular

    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    d = handle.d
    x, t = pts[..., :d], pts[..., d]
    rows = np.empty((len(handle.indices), len(pts)))
    pos = {(ix.n, ix.m, ix.j): r for r, ix in enumerate(handle.indices)}
    for m in range(handle.nmax + 1):
        q0 = jacobi.shifted_all(handle.nmax - m, handle.tparam(m), handle.gamma, t)
        if op_tag == "dt":
            q1 = jacobi.shifted_all(
                handle.nmax - m, handle.tparam(m), handle.gamma, t, order=1
            )
            rad = q1 + (m / t) * q0
            for j in range(harmonic_dim(d, m)):
                h = harmonic_eval(d, m, j, x)
                for n in range(m, handle.nmax + 1):
                    rows[pos[(n, m, j)]] = rad[n - m] * h
        elif op_tag == "dij":
            if d == 2:
                if m == 0:
                    dh = [np.zeros(len(pts))]
                else:
                    dh = [
                        -m * harmonic_eval(2, m, 1, x),
                        m * harmonic_eval(2, m, 0, x),
                    ]
            else:
                from .harmonics import solid_harmonics

                dh = []
                for hp in solid_harmonics(d, m):
                    ang = angular(hp, plane[0], plane[1])
                    dh.append(ang(x))
            for j in range(harmonic_dim(d, m)):
                for n in range(m, handle.nmax + 1):
                    rows[pos[(n, m, j)]] = q0[n - m] * dh[j]
        else:
            raise ValueError(f"unknown derivative tag {op_tag!r}")
    return rows / np.sqrt(handle.norms2)[:, None]


def derivative_decay_probe(cfg: KernelConfig, op_tag: str, pairs) -> DecayTable:
    """Decay check for d_t L_n and D_{i,j} L_n (derivative in the first slot).

    Envelopes: n^{d+1} / phi(t) for d_t, and n^{d+1} sqrt(t) for D_{i,j},
    both over sqrt(proxy(t)) sqrt(proxy(s)) (1 + n dist)^kappa.  Derivatives
    go through the basis sum with analytic element derivatives.
    """
    if cfg.domain != "surface":
        raise UnsupportedConfigError("derivative probes apply to the surface kernel")
    P, Q = pairs
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if len(P) == 1 and len(Q) > 1:
        P = np.broadcast_to(P, Q.shape).copy()
    if np.any(P[:, cfg.d] <= 0.0):
        raise ValueError("first-slot points must stay off the apex")
    handle = basis_handle(cfg, degree=2 * cfg.n)
    coef = cfg.cutoff(np.array([ix.n for ix in handle.indices]) / cfg.n)
    dp = _surface_deriv_rows(handle, P, op_tag)
    mq = handle.eval_matrix(Q, orthonormal=True)
    val = np.sum(coef[:, None] * dp * mq, axis=0)
    dist = dist_surface((P[:, : cfg.d], P[:, cfg.d]), (Q[:, : cfg.d], Q[:, cfg.d]))
    t, s = P[:, cfg.d], Q[:, cfg.d]
    base = (
        np.sqrt(_surface_proxy(cfg, t))
        * np.sqrt(_surface_proxy(cfg, s))
        * (1.0 + cfg.n * dist) ** cfg.decay_kappa
    )
    if op_tag == "dt":
        env = cfg.n ** (cfg.d + 1) / (np.sqrt(t * (1.0 - t)) * base)
    elif op_tag == "dij":
        env = cfg.n ** (cfg.d + 1) * np.sqrt(t) / base
    else:
        raise ValueError(f"unknown derivative tag {op_tag!r}")
    nn = np.full(len(dist), cfg.n)
    return DecayTable(nn, np.atleast_1d(dist), np.atleast_1d(val), np.atleast_1d(env))
