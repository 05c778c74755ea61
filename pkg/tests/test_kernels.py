import math

import numpy as np
import pytest

from conic_bernstein import kernels
from conic_bernstein.cutoff import CutoffFn, cutoff_eval


def surface_pts(rng, d, count):
    t = rng.uniform(0.05, 0.95, count)
    xi = rng.normal(size=(count, d))
    xi /= np.linalg.norm(xi, axis=1, keepdims=True)
    return np.column_stack([t[:, None] * xi, t])


def cone_pts(rng, d, count):
    t = rng.uniform(0.05, 0.95, count)
    xi = rng.normal(size=(count, d))
    xi /= np.linalg.norm(xi, axis=1, keepdims=True)
    r = rng.uniform(0.0, 1.0, count) ** (1.0 / d)
    return np.column_stack([(t * r)[:, None] * xi, t])


# ---------------------------------------------------------------------------
# cutoff


def test_cutoff_plateaus_and_range():
    assert cutoff_eval(0.0) == 1.0
    assert cutoff_eval(1.0) == 1.0
    assert cutoff_eval(2.0) == 0.0
    assert cutoff_eval(5.0) == 0.0
    x = np.linspace(0.0, 3.0, 301)
    vals = cutoff_eval(x)
    assert np.all((0.0 <= vals) & (vals <= 1.0))
    assert np.all(np.diff(vals) <= 1e-12)  # nonincreasing


def test_cutoff_symmetry_of_the_glue():
    # h(2-x)/(h(2-x)+h(x-1)) satisfies a(x) + a(3-x) = 1 on (1, 2)
    x = np.linspace(1.01, 1.99, 23)
    assert np.allclose(cutoff_eval(x) + cutoff_eval(3.0 - x), 1.0, atol=1e-14)


def test_cutoff_rejects_negative():
    with pytest.raises(ValueError):
        cutoff_eval(-0.1)
    assert CutoffFn().support() == (0.0, 2.0)


# ---------------------------------------------------------------------------
# configuration


def test_kernel_config_validation():
    cfg = kernels.KernelConfig("surface", 0.0, 2, 6)
    assert cfg.quad_order == 2 * 6 + 8
    with pytest.raises(ValueError):
        kernels.KernelConfig("surface", -0.75, 2, 6)
    with pytest.raises(ValueError):
        kernels.KernelConfig("surface", 0.0, 1, 6)
    with pytest.raises(ValueError):
        kernels.KernelConfig("cone", 0.0, 0, 6)
    with pytest.raises(ValueError):
        kernels.KernelConfig("surface", 0.0, 2, 6, quad_order=10)
    with pytest.raises(ValueError):
        kernels.KernelConfig("disk", 0.0, 2, 6)


def test_unsupported_closed_forms_flagged():
    rng = np.random.default_rng(0)
    p = surface_pts(rng, 2, 1)
    cfg = kernels.KernelConfig("surface", 0.0, 2, 4, beta=0.0)
    with pytest.raises(kernels.UnsupportedConfigError):
        kernels.repro_kernel_addition(cfg, p, p)
    ccfg = kernels.KernelConfig("cone", 0.0, 2, 4, mu=0.5)
    with pytest.raises(kernels.UnsupportedConfigError):
        kernels.cone_kernel(ccfg, p, p)
    with pytest.raises(kernels.UnsupportedConfigError):
        kernels.decay_profile(ccfg, p, p)


# ---------------------------------------------------------------------------
# projection kernels: two independent routes


@pytest.mark.parametrize("d,gamma,n", [(2, 0.0, 6), (2, 0.5, 5), (3, 0.0, 4), (2, 2.0, 8)])
def test_surface_kernel_sum_equals_addition_formula(d, gamma, n):
    cfg = kernels.KernelConfig("surface", gamma, d, n)
    rng = np.random.default_rng(10 + n)
    P = surface_pts(rng, d, 60)
    Q = surface_pts(rng, d, 60)
    s1 = kernels.repro_kernel_sum(cfg, P, Q)
    s2 = kernels.repro_kernel_addition(cfg, P, Q, normalization="raw")
    scale = float(np.max(np.abs(s1)))
    assert float(np.max(np.abs(s1 - s2))) <= 1e-10 * scale


def test_cone_kernel_sum_equals_closed_form():
    cfg = kernels.KernelConfig("cone", 0.5, 2, 5)
    rng = np.random.default_rng(1)
    P = cone_pts(rng, 2, 40)
    Q = cone_pts(rng, 2, 40)
    s1 = kernels.repro_kernel_sum(cfg, P, Q)
    s2 = kernels.cone_kernel(
        kernels.KernelConfig("cone", 0.5, 2, 5, mu=0.0), P, Q, normalization="raw"
    )
    scale = float(np.max(np.abs(s1)))
    assert float(np.max(np.abs(s1 - s2))) <= 1e-10 * scale


def test_kernel_reproduces_degree_n_component():
    cfg = kernels.KernelConfig("surface", 0.0, 2, 5)
    handle = kernels.basis_handle(cfg)
    rule = kernels.reference_rule(cfg, extra=4)
    rng = np.random.default_rng(2)
    X = surface_pts(rng, 2, 25)
    mask = np.array([ix.n == cfg.n for ix in handle.indices])
    mX = handle.eval_matrix(X, orthonormal=True)
    mR = handle.eval_matrix(rule.points, orthonormal=True)
    K = mX[mask].T @ mR[mask]
    for row in range(len(handle.indices)):
        proj = K @ (rule.weights * mR[row])
        target = mX[row] if mask[row] else np.zeros(len(X))
        assert np.allclose(proj, target, atol=1e-10 * max(1.0, np.abs(mX[row]).max()))


def test_scalar_and_batch_calling_conventions():
    cfg = kernels.KernelConfig("surface", 0.0, 2, 3)
    p = (np.array([0.3, 0.0]), 0.3)
    val = kernels.repro_kernel_sum(cfg, p, p)
    assert isinstance(val, float)
    rng = np.random.default_rng(3)
    P = surface_pts(rng, 2, 7)
    col = kernels.repro_kernel_sum(cfg, p, P)
    assert col.shape == (7,)


# ---------------------------------------------------------------------------
# localized kernel and decay


def test_localized_kernel_forms_agree():
    cfg = kernels.KernelConfig("surface", 0.0, 2, 6)
    rng = np.random.default_rng(4)
    P = surface_pts(rng, 2, 30)
    Q = surface_pts(rng, 2, 30)
    a = kernels.localized_kernel(cfg, P, Q, form="sum")
    b = kernels.localized_kernel(cfg, P, Q, form="integral")
    scale = float(np.max(np.abs(a)))
    assert float(np.max(np.abs(a - b))) <= 1e-9 * scale
    with pytest.raises(ValueError):
        kernels.localized_kernel(cfg, P, Q, form="other")


def test_localized_kernel_matches_projection_sum():
    """With the cutoff equal to 1 through degree n, L_n contains the full
    projection onto degree <= n plus tapered higher blocks; at far-apart
    points it is tiny while the single-degree kernel is not."""
    cfg = kernels.KernelConfig("surface", 0.0, 2, 8)
    p = (np.array([0.6, 0.0]), 0.6)
    q = (np.array([-0.6, 0.0]), 0.6)
    near = kernels.localized_kernel(cfg, p, p)
    far = kernels.localized_kernel(cfg, p, q)
    assert abs(far) < 1e-2 * abs(near)


def test_lift_identity_cone_to_surface():
    cfg = kernels.KernelConfig("cone", 0.0, 2, 6)
    res = kernels.lift_identity_check(cfg, None, n_samples=80, seed=0)
    assert res["relative"] <= 1e-10


def test_lift_identity_requires_cone():
    cfg = kernels.KernelConfig("surface", 0.0, 2, 4)
    with pytest.raises(kernels.UnsupportedConfigError):
        kernels.lift_identity_check(cfg, None)


def test_lift_identity_explicit_pairs():
    cfg = kernels.KernelConfig("cone", 1.0, 2, 5)
    rng = np.random.default_rng(5)
    P = cone_pts(rng, 2, 30)
    Q = cone_pts(rng, 2, 30)
    res = kernels.lift_identity_check(cfg, (P, Q))
    assert res["relative"] <= 1e-10


def test_decay_profile_table_and_ratio_stability():
    """max |L_n|/envelope stays of one size as n doubles (the 3x criterion)."""
    ratios = []
    for n in (8, 16):
        cfg = kernels.KernelConfig("surface", 0.0, 2, n)
        anchor = np.array([0.55, 0.0, 0.55])
        ang = np.linspace(0.1, math.pi, 24)
        probes = np.column_stack([0.55 * np.cos(ang), 0.55 * np.sin(ang), np.full(24, 0.55)])
        table = kernels.decay_profile(cfg, anchor, probes)
        assert len(table.dist) == 24
        assert np.all(table.envelope > 0)
        ratios.append(table.max_ratio)
    assert max(ratios) <= 3.0 * min(ratios)


def test_decay_table_csv_roundtrip():
    tab = kernels.DecayTable(
        np.array([4, 4]), np.array([0.1, 0.2]), np.array([1.5, -0.25]), np.array([2.0, 1.0])
    )
    text = tab.to_csv()
    lines = text.strip().split("\n")
    assert lines[0] == "n,dist,value,envelope,ratio"
    cells = lines[1].split(",")
    assert cells[0] == "4"
    assert float(cells[1]) == 0.1
    assert float(cells[4]) == 0.75
    both = kernels.DecayTable.concat([tab, tab])
    assert len(both.dist) == 4
    assert both.max_ratio == tab.max_ratio


def test_derivative_decay_probe_runs_and_bounds():
    cfg = kernels.KernelConfig("surface", 0.0, 2, 8)
    rng = np.random.default_rng(6)
    anchor = np.array([[0.5, 0.0, 0.5]])
    probes = surface_pts(rng, 2, 16)
    for tag in ("dt", "dij"):
        table = kernels.derivative_decay_probe(cfg, tag, (anchor, probes))
        assert np.all(np.isfinite(table.value))
        assert np.all(table.envelope > 0)
    with pytest.raises(ValueError):
        kernels.derivative_decay_probe(cfg, "dt", (np.array([[0.0, 0.0, 0.0]]), probes))
