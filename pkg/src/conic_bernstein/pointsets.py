"""Separated point sets on the interval, spheres, disk, conic surface, cone.

All constructions are products of an arcsine-spaced level set in t with a
fiber set (circle, sphere, or disk) whose mesh is rescaled per level.  The
level map t_j = sin^2((2j-1) pi / (4N)) makes the levels exactly equispaced
in the interval metric, because d(t, s) = |arcsin sqrt(t) - arcsin sqrt(s)|.

Separation is exact by construction on the interval, spheres, and disk; on
the product domains it holds up to a constant that the certificates measure
and report.  Maximality (every point of the domain within epsilon of the
set) is certified empirically on a fine grid, never proven.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MAX_LEVELS",
    "ResourceLimitError",
    "SeparatedSet",
    "interval_levels",
    "interval_separated",
    "sphere_separated",
    "ball_separated",
    "surface_separated",
    "cone_separated",
    "maximalize",
    "pairwise_distance",
    "separation_certificate",
    "covering_certificate",
]

MAX_LEVELS = 10**6


class ResourceLimitError(RuntimeError):
    """epsilon so small that the level count would exceed the configured cap."""


@dataclass
class SeparatedSet:
    """Point set with pairwise intrinsic distance >= epsilon (up to the
    product-construction constant on surface/cone, which certificates report).

    points holds one coordinate row per point; metadata carries per-point
    arrays ('level' index, 'fiber_spacing') plus scalar construction facts.
    """

    domain: str
    epsilon: float
    points: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.points)

    def to_csv(self) -> str:
        cols = {
            "interval": ["t"],
            "sphere1": ["x1", "x2"],
            "sphere2": ["x1", "x2", "x3"],
            "ball2": ["u1", "u2"],
            "surface2": ["x1", "x2", "t"],
            "surface3": ["x1", "x2", "x3", "t"],
            "cone2": ["x1", "x2", "t"],
        }[self.domain]
        lines = [f"# domain={self.domain} epsilon={self.epsilon!r}", ",".join(cols)]
        for row in np.atleast_2d(self.points):
            lines.append(",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


def _num_levels(eps: float) -> int:
    if not 0.0 < eps <= math.pi / 2:
        raise ValueError("epsilon must lie in (0, pi/2]")
    n = math.floor(math.pi / (2.0 * eps))
    if n > MAX_LEVELS:
        raise ResourceLimitError(f"{n} levels exceed the cap {MAX_LEVELS}")
    return max(n, 1)


def interval_levels(eps: float) -> list[tuple[float, float]]:
    """Levels (t_j, eps_j): t_j = sin^2((2j-1)pi/(4N)), eps_j = pi eps/(2 sqrt(t_j)).

    N = floor(pi/(2 eps)); the t_j are the interval-metric midpoints of N
    equal subdivisions, and eps_j is the fiber mesh that equalizes the
    product separation across levels.
    """
    n = _num_levels(eps)
    out = []
    for j in range(1, n + 1):
        t = math.sin((2 * j - 1) * math.pi / (4 * n)) ** 2
        out.append((t, math.pi * eps / (2.0 * math.sqrt(t))))
    return out


def interval_separated(eps: float) -> SeparatedSet:
    levels = interval_levels(eps)
    t = np.array([lv[0] for lv in levels])
    meta = {"level": np.arange(len(t)), "num_levels": len(t)}
    return SeparatedSet("interval", eps, t[:, None], meta)


def _circle_angles(eps: float) -> np.ndarray:
    """Equispaced angles with spacing in [eps, 2 eps); eps > pi gives one point."""
    m = max(int(2.0 * math.pi / eps), 1)
    return np.arange(m) * (2.0 * math.pi / m)


def _band_spacing(eps: float, sin_colat: float) -> float:
    """Smallest longitude step whose great-circle distance at this colatitude
    is eps: 2 arcsin(sin(eps/2)/sin(colat)); a whole band strictly closer
    than eps to its own antipode collapses to a single point (returned as
    2 pi), while ratio exactly 1 keeps the antipodal pair at distance eps."""
    ratio = math.sin(eps / 2.0) / sin_colat
    if ratio > 1.0:
        return 2.0 * math.pi
    return 2.0 * math.asin(ratio)


def sphere_separated(d: int, eps: float) -> SeparatedSet:
    """Separated set on the unit sphere in R^d (d = 2: circle; d = 3: S^2).

    The circle is equispaced.  S^2 uses latitude bands at colatitudes
    (2i-1)pi/(2M), M = floor(pi/eps), with per-band equispaced longitudes;
    the longitude step is the exact chord inverse of eps at each colatitude
    (to first order eps/sin(colat)), so pairwise separation >= eps holds
    exactly rather than asymptotically.
    """
    if d == 2:
        if not 0.0 < eps <= math.pi:
            raise ValueError("epsilon must lie in (0, pi]")
        ang = _circle_angles(eps)
        pts = np.column_stack([np.cos(ang), np.sin(ang)])
        meta = {"level": np.zeros(len(ang), dtype=int), "spacing": 2 * math.pi / len(ang)}
        return SeparatedSet("sphere1", eps, pts, meta)
    if d != 3:
        raise ValueError("spheres implemented in R^2 and R^3")
    if not 0.0 < eps <= math.pi:
        raise ValueError("epsilon must lie in (0, pi]")
    m = max(math.floor(math.pi / eps), 1)
    rows, band, spacing = [], [], []
    for i in range(1, m + 1):
        colat = (2 * i - 1) * math.pi / (2 * m)
        step = _band_spacing(eps, math.sin(colat))
        k = max(int(2.0 * math.pi / step), 1)
        phi = np.arange(k) * (2.0 * math.pi / k)
        rows.append(
            np.column_stack(
                [
                    math.sin(colat) * np.cos(phi),
                    math.sin(colat) * np.sin(phi),
                    np.full(k, math.cos(colat)),
                ]
            )
        )
        band.extend([i - 1] * k)
        spacing.extend([2.0 * math.pi / k] * k)
    meta = {
        "level": np.array(band),
        "fiber_spacing": np.array(spacing),
        "num_bands": m,
    }
    return SeparatedSet("sphere2", eps, np.vstack(rows), meta)


def ball_separated(eps: float, maximal: bool = True) -> SeparatedSet:
    """Separated set on the closed unit disk in its intrinsic metric.

    Rings at r_j = sin(theta_j / 2), theta_j = (2j-1)pi/(2N), carry
    equispaced angular sets of step >= sigma_j = pi eps / (2 r_j).  Under
    u -> (u, sqrt(1-||u||^2)) the disk metric is the hemisphere geodesic, so
    the rings are latitude bands and cross-ring separation is the exact
    colatitude gap pi/(2N) >= eps; within rings sin x >= 2x/pi turns the
    sigma_j spacing into separation >= 2 arcsin(eps/2) >= eps.  All radii
    stay <= cos(pi/(4N)), leaving a boundary gap sqrt(1-||u||^2) > 0.

    The ring lattice alone is not quite maximal near the rim (the gap it
    keeps there can leave points slightly more than eps from every ring);
    maximal=True runs the greedy grid completion of maximalize().
    """
    n = _num_levels(eps)
    rows, ring, spacing = [], [], []
    for j in range(1, n + 1):
        theta = (2 * j - 1) * math.pi / (2 * n)
        r = math.sin(theta / 2.0)
        sigma = math.pi * eps / (2.0 * r)
        k = max(int(2.0 * math.pi / sigma), 1)
        phi = np.arange(k) * (2.0 * math.pi / k)
        rows.append(np.column_stack([r * np.cos(phi), r * np.sin(phi)]))
        ring.extend([j - 1] * k)
        spacing.extend([2.0 * math.pi / k] * k)
    meta = {
        "level": np.array(ring),
        "fiber_spacing": np.array(spacing),
        "num_rings": n,
        "boundary_gap": math.sin(math.pi / (4 * n)),
        "max_radius": math.cos(math.pi / (4 * n)),
    }
    ss = SeparatedSet("ball2", eps, np.vstack(rows), meta)
    return maximalize(ss) if maximal else ss


def surface_separated(d: int, eps: float) -> SeparatedSet:
    """Levels x sphere fibers on the conic surface in R^{d+1} (d = 2 or 3).

    Each level t_j carries a sphere set of mesh eps_j = pi eps/(2 sqrt(t_j)),
    scaled so the surface metric sees comparable gaps at every level; the
    certificates report the resulting constant (about pi/4 within levels,
    exactly >= eps across levels).
    """
    if d not in (2, 3):
        raise ValueError("surface sets implemented for d = 2 and 3")
    rows, level, spacing = [], [], []
    for j, (t, ej) in enumerate(interval_levels(eps)):
        fiber = sphere_separated(d, min(ej, math.pi))
        k = len(fiber)
        rows.append(np.column_stack([t * fiber.points, np.full(k, t)]))
        level.extend([j] * k)
        spacing.extend([min(ej, math.pi)] * k)
    meta = {
        "level": np.array(level),
        "fiber_spacing": np.array(spacing),
        "num_levels": int(np.max(level)) + 1 if level else 0,
    }
    return SeparatedSet(f"surface{d}", eps, np.vstack(rows), meta)


def cone_separated(eps: float, maximal: bool = True) -> SeparatedSet:
    """Levels x disk fibers on the solid cone in R^3 (d = 2).

    Points are (t_j u, t_j) with u from ball_separated(eps_j).  Every point
    keeps sqrt(t^2 - ||x||^2) > 0, an interior gap of order sqrt(t) eps on
    the fiber lattice that the metadata records per point.  As with the
    disk, the lattice under-covers the lateral boundary ||x|| = t, so
    maximal=True finishes with the greedy grid completion (whose added
    points keep a smaller but still positive gap).
    """
    rows, level, spacing, gap = [], [], [], []
    for j, (t, ej) in enumerate(interval_levels(eps)):
        fiber = ball_separated(min(ej, math.pi / 2), maximal=False)
        k = len(fiber)
        rows.append(np.column_stack([t * fiber.points, np.full(k, t)]))
        level.extend([j] * k)
        spacing.extend([min(ej, math.pi / 2)] * k)
        gap.extend([t * fiber.metadata["boundary_gap"]] * k)
    meta = {
        "level": np.array(level),
        "fiber_spacing": np.array(spacing),
        "interior_gap": np.array(gap),
        "num_levels": int(np.max(level)) + 1 if level else 0,
    }
    ss = SeparatedSet("cone2", eps, np.vstack(rows), meta)
    return maximalize(ss) if maximal else ss


# ---------------------------------------------------------------------------
# certification


def _lift_features(domain: str, a: np.ndarray) -> tuple[np.ndarray, np.ndarray | None]:
    """Rows F with d(p,q) = arccos of (F_p . F_q) plus, where present, an
    outer product of the second column g = sqrt(1-t); one matrix product
    then yields all pairwise distances (the geometry module's formulas,
    vectorized over pairs)."""
    if domain == "interval":
        return np.arcsin(np.sqrt(a))[:, :1], None
    if domain in ("sphere1", "sphere2"):
        return a, None
    if domain == "ball2":
        r2 = np.einsum("ij,ij->i", a, a)
        return np.column_stack([a, np.sqrt(np.clip(1.0 - r2, 0.0, None))]), None
    if domain.startswith("surface"):
        g = np.sqrt(np.clip(1.0 - a[:, -1], 0.0, None))
        return a, g
    if domain == "cone2":
        x, t = a[:, :2], a[:, 2]
        phi = np.sqrt(np.clip(t * t - np.einsum("ij,ij->i", x, x), 0.0, None))
        return np.column_stack([x, phi, t]), np.sqrt(np.clip(1.0 - t, 0.0, None))
    raise ValueError(f"unknown domain {domain!r}")


def pairwise_distance(domain: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """All intrinsic distances between the rows of a and b, as one block."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    fa, ga = _lift_features(domain, a)
    fb, gb = _lift_features(domain, b)
    if domain == "interval":
        return np.abs(fa - fb.T)
    inner = fa @ fb.T
    if ga is None:
        return np.arccos(np.clip(inner, -1.0, 1.0))
    c = np.sqrt(np.clip(inner, 0.0, None) / 2.0) + np.outer(ga, gb)
    return np.arccos(np.clip(c, -1.0, 1.0))


def _min_cross(domain, a, b) -> float:
    if len(a) == 0 or len(b) == 0:
        return math.inf
    best = math.inf
    step = max(1, int(4e6 / max(len(b), 1)))
    for lo in range(0, len(a), step):
        best = min(best, float(np.min(pairwise_distance(domain, a[lo : lo + step], b))))
    return best


def _min_within(domain, a) -> float:
    if len(a) < 2:
        return math.inf
    best = math.inf
    step = max(1, int(4e6 / len(a)))
    for lo in range(0, len(a), step):
        block = pairwise_distance(domain, a[lo : lo + step], a)
        ii = np.arange(lo, min(lo + step, len(a)))
        block[ii - lo, ii] = math.inf
        best = min(best, float(np.min(block)))
    return best


def separation_certificate(ss: SeparatedSet) -> dict:
    """Exact minimum pairwise distance, grouped by levels for the products.

    Levels two or more apart are separated by at least twice the level gap in
    the t-metric (distances dominate the interval metric of the heights), so
    only within-level and adjacent-level pairs are enumerated.
    """
    pts = ss.points
    lev = ss.metadata.get("level")
    if lev is None or ss.domain in ("sphere1", "interval"):
        best = _min_within(ss.domain, pts)
        method = "pairwise"
    else:
        best = math.inf
        method = "levels"
        nbase = ss.metadata.get("base_count", len(pts))
        base, lev = pts[:nbase], lev[:nbase]
        nl = int(np.max(lev)) + 1
        groups = [base[lev == i] for i in range(nl)]
        for i in range(nl):
            best = min(best, _min_within(ss.domain, groups[i]))
            if i + 1 < nl:
                best = min(best, _min_cross(ss.domain, groups[i], groups[i + 1]))
        if nl > 2:
            # pairs skipping >= 2 levels are bounded below by two level gaps
            # (distances dominate the height metric), never enumerated
            if ss.domain == "sphere2":
                gap2 = 2.0 * math.pi / ss.metadata["num_bands"]
            else:
                gap2 = math.pi / max(ss.metadata.get("num_levels", nl), nl)
            best = min(best, gap2)
        if nbase < len(pts):
            # greedy completions carry no level structure; enumerate in full
            extra = pts[nbase:]
            best = min(best, _min_within(ss.domain, extra), _min_cross(ss.domain, extra, base))
            method = "levels+added"
    return {
        "min_distance": best,
        "epsilon": ss.epsilon,
        "ratio": best / ss.epsilon,
        "count": len(ss),
        "method": method,
    }


def _interval_grid(eps: float, mesh: float) -> np.ndarray:
    k = max(2, math.ceil((math.pi / 2) / mesh) + 1)
    u = np.linspace(0.0, math.pi / 2, k)
    return np.sin(u) ** 2


def _sphere_grid(d: int, mesh: float) -> np.ndarray:
    if d == 2:
        k = max(4, math.ceil(2 * math.pi / mesh))
        ang = np.arange(k) * (2 * math.pi / k)
        return np.column_stack([np.cos(ang), np.sin(ang)])
    rows = [np.array([[0.0, 0.0, 1.0]]), np.array([[0.0, 0.0, -1.0]])]
    nc = max(3, math.ceil(math.pi / mesh) + 1)
    for colat in np.linspace(0.0, math.pi, nc)[1:-1]:
        k = max(4, math.ceil(2 * math.pi * math.sin(colat) / mesh))
        phi = np.arange(k) * (2 * math.pi / k)
        rows.append(
            np.column_stack(
                [
                    math.sin(colat) * np.cos(phi),
                    math.sin(colat) * np.sin(phi),
                    np.full(k, math.cos(colat)),
                ]
            )
        )
    return np.vstack(rows)


def _ball_grid(mesh: float) -> np.ndarray:
    rows = [np.zeros((1, 2))]
    na = max(3, math.ceil((math.pi / 2) / mesh) + 1)
    for alpha in np.linspace(0.0, math.pi / 2, na)[1:]:
        r = math.sin(alpha)
        k = max(4, math.ceil(2 * math.pi * r / mesh))
        phi = np.arange(k) * (2 * math.pi / k)
        rows.append(np.column_stack([r * np.cos(phi), r * np.sin(phi)]))
    return np.vstack(rows)


def _product_grid(domain: str, eps: float, mesh: float) -> np.ndarray:
    ncols = 4 if domain == "surface3" else 3
    rows = [np.zeros((1, ncols))]  # apex
    for t in _interval_grid(eps, mesh):
        if t <= 0.0:
            continue
        # local fiber mesh whose product-metric size is `mesh`:
        # d = 2 arcsin(sqrt(t) sin(fiber/4)) inverted at d = mesh
        ratio = math.sin(mesh / 2.0) / math.sqrt(t)
        fm = 4.0 * math.asin(ratio) if ratio < 1.0 else math.pi
        if domain == "cone2":
            fib = _ball_grid(min(fm, math.pi / 2))
        elif domain == "surface3":
            fib = _sphere_grid(3, fm)
        else:
            fib = _sphere_grid(2, fm)
        rows.append(np.column_stack([t * fib, np.full(len(fib), t)]))
    return np.vstack(rows)


def _domain_grid(domain: str, eps: float, mesh: float) -> np.ndarray:
    if domain == "interval":
        return _interval_grid(eps, mesh)[:, None]
    if domain == "sphere1":
        return _sphere_grid(2, mesh)
    if domain == "sphere2":
        return _sphere_grid(3, mesh)
    if domain == "ball2":
        return _ball_grid(mesh)
    return _product_grid(domain, eps, mesh)


def _rim_shell(domain: str, eps: float, mesh: float) -> np.ndarray:
    """Candidate circle(s) one collar (mesh/6) inside the rim ||u|| = 1,
    where the main grid is too coarse in colatitude to place completions."""
    colat = math.pi / 2 - mesh / 6.0
    r = math.sin(colat)
    if domain == "ball2":
        k = max(8, math.ceil(2 * math.pi * r / mesh))
        phi = np.arange(k) * (2 * math.pi / k)
        return np.column_stack([r * np.cos(phi), r * np.sin(phi)])
    rows = []
    for t in _interval_grid(eps, mesh):
        if t <= 0.0:
            continue
        ratio = math.sin(mesh / 2.0) / math.sqrt(t)
        fm = 4.0 * math.asin(ratio) if ratio < 1.0 else math.pi
        k = max(8, math.ceil(2 * math.pi * r / fm))
        phi = np.arange(k) * (2 * math.pi / k)
        rows.append(np.column_stack([t * r * np.cos(phi), t * r * np.sin(phi), np.full(k, t)]))
    return np.vstack(rows)


def _greedy_pass(domain, grid, allowed, pts, added, slack) -> None:
    cover = np.empty(len(grid))
    step = max(1, int(4e6 / max(len(pts), 1)))
    for lo in range(0, len(grid), step):
        cover[lo : lo + step] = pairwise_distance(domain, grid[lo : lo + step], pts).min(axis=1)
    for i in np.nonzero(allowed & (cover >= slack))[0]:
        p = grid[i]
        if added and float(pairwise_distance(domain, p[None, :], np.array(added)).min()) < slack:
            continue
        added.append(p)


def maximalize(ss: SeparatedSet, mesh: float | None = None) -> SeparatedSet:
    """Greedy completion: scan the certification grid in order and append
    every point at distance >= eps from everything accepted so far.

    Afterwards no grid point is >= eps from the set, so the set is maximal
    relative to that grid, while pairwise separation >= eps is preserved.
    Points of the disk/cone grids on the very rim (||u|| = 1, or the apex)
    are never appended, keeping the boundary and interior gaps positive; a
    second pass over a circle one collar inside the rim covers them
    instead.  Added points get level -1 / nan fiber spacing in the metadata.
    """
    eps = ss.epsilon
    mesh = eps / 10.0 if mesh is None else mesh
    grid = _domain_grid(ss.domain, eps, mesh)
    if ss.domain == "ball2":
        allowed = np.hypot(grid[:, 0], grid[:, 1]) <= math.cos(mesh)
    elif ss.domain == "cone2":
        allowed = (grid[:, 2] > 0.0) & (
            np.hypot(grid[:, 0], grid[:, 1]) <= grid[:, 2] * math.cos(mesh)
        )
    else:
        allowed = np.ones(len(grid), dtype=bool)
    pts = ss.points
    slack = eps * (1.0 + 1e-9)
    added: list[np.ndarray] = []
    _greedy_pass(ss.domain, grid, allowed, pts, added, slack)
    if ss.domain in ("ball2", "cone2"):
        shell = _rim_shell(ss.domain, eps, mesh)
        cur = np.vstack([pts, np.array(added)]) if added else pts
        _greedy_pass(ss.domain, shell, np.ones(len(shell), dtype=bool), cur, added, slack)
    if not added:
        return ss
    extra = np.array(added)
    meta = dict(ss.metadata)
    meta["base_count"] = len(pts)
    meta["added"] = len(extra)
    if "level" in meta:
        meta["level"] = np.concatenate([meta["level"], np.full(len(extra), -1, dtype=int)])
    if "fiber_spacing" in meta:
        meta["fiber_spacing"] = np.concatenate([meta["fiber_spacing"], np.full(len(extra), np.nan)])
    if "interior_gap" in meta:
        t, r = extra[:, 2], np.hypot(extra[:, 0], extra[:, 1])
        meta["interior_gap"] = np.concatenate([meta["interior_gap"], np.sqrt(t * t - r * r)])
    if "boundary_gap" in meta:
        r = np.hypot(extra[:, 0], extra[:, 1])
        meta["boundary_gap"] = min(meta["boundary_gap"], float(np.sqrt(1.0 - r * r).min()))
    return SeparatedSet(ss.domain, eps, np.vstack([pts, extra]), meta)


def covering_certificate(ss: SeparatedSet, mesh: float | None = None) -> dict:
    """Grid check of the covering/multiplicity condition.

    Reports the covering radius over a grid of the stated mesh (default
    eps/10) and the min/max number of set points within eps of a grid point.
    A healthy maximal set has min_multiplicity >= 1 (covering) and a small
    max_multiplicity.
    """
    mesh = ss.epsilon / 10.0 if mesh is None else mesh
    grid = _domain_grid(ss.domain, ss.epsilon, mesh)
    pts = ss.points
    cover = np.empty(len(grid))
    mult = np.empty(len(grid), dtype=int)
    step = max(1, int(4e6 / max(len(pts), 1)))
    for lo in range(0, len(grid), step):
        block = pairwise_distance(ss.domain, grid[lo : lo + step], pts)
        cover[lo : lo + step] = np.min(block, axis=1)
        mult[lo : lo + step] = np.sum(block <= ss.epsilon, axis=1)
    return {
        "grid_size": len(grid),
        "mesh": mesh,
        "covering_radius": float(np.max(cover)),
        "min_multiplicity": int(np.min(mult)),
        "max_multiplicity": int(np.max(mult)),
    }
