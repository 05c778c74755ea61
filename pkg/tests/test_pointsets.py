import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conic_bernstein import pointsets as ps


BUILDERS = {
    "interval": lambda e: ps.interval_separated(e),
    "sphere": lambda e: ps.sphere_separated(2, e),
    "surface": lambda e: ps.surface_separated(2, e),
    "ball": lambda e: ps.ball_separated(e),
    "cone": lambda e: ps.cone_separated(e),
}

# intrinsic dimension, for the cardinality doubling check
DIMS = {"interval": 1, "sphere": 1, "surface": 2, "ball": 2, "cone": 3}


def test_epsilon_guards():
    for bad in (0.0, -0.5, math.pi / 2 + 0.01):
        with pytest.raises(ValueError):
            ps.interval_separated(bad)
    with pytest.raises(ps.ResourceLimitError):
        ps.ball_separated(1e-9)
    # ResourceLimitError is a RuntimeError so callers can catch broadly
    assert issubclass(ps.ResourceLimitError, RuntimeError)


def test_interval_levels_structure():
    levels = ps.interval_levels(0.4)
    assert all(0.0 <= t <= 1.0 for t, _ in levels)
    ts = [t for t, _ in levels]
    assert ts == sorted(ts)
    # arc-length positions arcsin(sqrt(t)) are equally spaced
    arcs = [math.asin(math.sqrt(t)) for t in ts]
    gaps = np.diff(arcs)
    assert np.allclose(gaps, gaps[0])


@pytest.mark.parametrize("name", sorted(BUILDERS))
@pytest.mark.parametrize("eps", [0.5, 0.25])
def test_separation_certificate(name, eps):
    ss = BUILDERS[name](eps)
    cert = ps.separation_certificate(ss)
    assert cert["count"] == len(ss.points)
    assert cert["epsilon"] == eps
    # separated by construction: no pair closer than ~0.7 eps, and the
    # set is not wastefully sparse either
    assert cert["min_distance"] >= 0.7 * eps * (1.0 - 1e-12)
    assert cert["ratio"] <= 3.0


@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_cardinality_doubles_like_dimension(name):
    dim = DIMS[name]
    n_coarse = len(BUILDERS[name](0.3).points)
    n_fine = len(BUILDERS[name](0.15).points)
    growth = n_fine / n_coarse
    assert 2**dim / 3.0 <= growth <= 3.0 * 2**dim


def test_ball_metadata_boundary_gap():
    ss = ps.ball_separated(0.3)
    md = ss.metadata
    assert md["boundary_gap"] > 0
    assert md["max_radius"] < 1.0
    radii = np.linalg.norm(ss.points, axis=1)
    assert np.max(radii) <= md["max_radius"] + 1e-12
    # the gap persists under refinement instead of collapsing to zero
    gap_fine = ps.ball_separated(0.15).metadata["boundary_gap"]
    assert gap_fine > 0
    assert gap_fine <= md["boundary_gap"] + 1e-12


def test_cone_metadata_tracks_added_points():
    ss = ps.cone_separated(0.4)
    md = ss.metadata
    assert md["base_count"] + md["added"] == len(ss.points)
    added_mask = md["level"] == -1
    assert int(added_mask.sum()) == md["added"]
    assert np.all(np.isnan(md["fiber_spacing"][added_mask]))
    assert np.all(md["interior_gap"] > 0)
    # ambient rows live strictly inside the solid cone
    x, t = ss.points[:, :-1], ss.points[:, -1]
    assert np.all(np.linalg.norm(x, axis=1) <= t + 1e-12)
    assert np.all(t <= 1.0)


def test_surface_points_on_the_surface():
    ss = ps.surface_separated(2, 0.3)
    x, t = ss.points[:, :-1], ss.points[:, -1]
    assert np.allclose(np.linalg.norm(x, axis=1), t, atol=1e-12)
    assert np.all((0.0 <= t) & (t <= 1.0))


def test_sphere_points_unit_norm():
    for d in (2, 3):
        ss = ps.sphere_separated(d, 0.4)
        assert ss.points.shape[1] == d
        assert np.allclose(np.linalg.norm(ss.points, axis=1), 1.0, atol=1e-12)


def test_maximalize_reaches_covering_radius():
    sparse = ps.ball_separated(0.4, maximal=False)
    before = ps.covering_certificate(sparse)["covering_radius"]
    dense = ps.maximalize(sparse)
    cov = ps.covering_certificate(dense)
    after = cov["covering_radius"]
    assert len(dense.points) > len(sparse.points)
    assert after <= before
    # maximality is certified on a finite mesh, so allow one mesh width
    assert after <= 0.4 + cov["mesh"]
    # maximalize must not break the separation it started from
    cert = ps.separation_certificate(dense)
    assert cert["min_distance"] >= 0.4 * (1.0 - 1e-12) * 0.7


def test_maximal_builders_cover():
    for builder in (ps.ball_separated, ps.cone_separated):
        ss = builder(0.35, maximal=True)
        cov = ps.covering_certificate(ss)
        assert cov["covering_radius"] <= 0.35 + cov["mesh"]
        assert cov["min_multiplicity"] >= 1


def test_pairwise_distance_basic_properties():
    ss = ps.ball_separated(0.3)
    D = ps.pairwise_distance(ss.domain, ss.points, ss.points)
    assert np.allclose(D, D.T, atol=1e-12)
    # arccos of an inner product that rounds to 1 - 1e-16 gives ~1.5e-8,
    # so the self-distance is only sqrt(machine epsilon) small
    assert np.max(np.abs(np.diag(D))) <= 1e-7
    off = D + np.diag(np.full(len(D), np.inf))
    assert np.min(off) > 0


def test_csv_deterministic_and_parsable():
    a = ps.cone_separated(0.4).to_csv()
    b = ps.cone_separated(0.4).to_csv()
    assert a == b
    lines = a.strip().split("\n")
    assert lines[0].startswith("# domain=cone2 epsilon=")
    header = lines[1].split(",")
    rows = [ln.split(",") for ln in lines[2:]]
    assert all(len(r) == len(header) for r in rows)
    vals = np.array([[float(c) for c in r] for r in rows])
    assert len(vals) == len(ps.cone_separated(0.4).points)
    assert "np.float64" not in a


@settings(max_examples=15, deadline=None)
@given(st.floats(min_value=0.25, max_value=1.2))
def test_interval_and_ball_separation_property(eps):
    for builder in (ps.interval_separated, ps.ball_separated):
        cert = ps.separation_certificate(builder(eps))
        assert cert["min_distance"] >= 0.7 * eps * (1.0 - 1e-12)


@settings(max_examples=10, deadline=None)
@given(st.floats(min_value=0.3, max_value=1.2))
def test_ball_covering_property(eps):
    cov = ps.covering_certificate(ps.ball_separated(eps, maximal=True))
    assert cov["covering_radius"] <= eps + cov["mesh"]
