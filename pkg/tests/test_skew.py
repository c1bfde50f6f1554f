import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from torusdyn.circle import CircleLift
from torusdyn.skew import (GridMask, SkewState, ball_fiber, build_centralized,
                           check_closed_form, check_commutation,
                           fiber_complement_components, gamma_flow,
                           geometry_for, invariance_defect, iterate_F,
                           make_block, saturate_invariant_region,
                           vertical_orbit_bound)
from torusdyn.torus import DehnTwist, RigidTranslation, SuspensionMap
from torusdyn.util import GOLDEN_MEAN, SQRT2_MINUS_1, skew_dist, wrap01

A, B = GOLDEN_MEAN, SQRT2_MINUS_1


@pytest.fixture(scope="module")
def rigid_skew():
    return build_centralized(RigidTranslation(A, B), B, c_est=0.0)


@pytest.fixture(scope="module")
def susp_skew():
    susp = SuspensionMap(CircleLift.rigid(A), CircleLift.rigid(B))
    return build_centralized(susp, A * B, c_est=B)


def test_build_rigid_freezes_vertical(rigid_skew):
    out = rigid_skew.step(np.array([[0.2, 0.3, 0.7]]))
    assert out[0] == pytest.approx([wrap01(0.2 + B), wrap01(0.3 + A), 0.7],
                                   abs=1e-12)


def test_build_identity():
    skew = build_centralized(RigidTranslation(0, 0), 0.0)
    s = np.array([[0.2, 0.3, 0.7]])
    assert np.array_equal(skew.step(s), s)


def test_build_twist_formula():
    skew = build_centralized(DehnTwist(1), 0.0)
    out = skew.step(np.array([[0.2, 0.3, 0.7]]))
    assert out[0] == pytest.approx([0.2, wrap01(0.3 + 0.7 + 0.2), 0.7], abs=1e-12)


def test_iterate_zero_and_roundtrip(rigid_skew, susp_skew):
    s = SkewState(0.1, 0.2, 0.3)
    assert iterate_F(rigid_skew, s, 0) == s
    for skew in (rigid_skew, susp_skew):
        arr = np.array([[0.1, 0.2, 0.3], [0.9, 0.4, -1.1]])
        back = skew.iterate(skew.iterate(arr, 7), -7)
        assert np.max(np.abs(back - arr)) <= 1e-8


def test_rigid_closed_orbit(rigid_skew):
    n = 13
    out = iterate_F(rigid_skew, SkewState(0.1, 0.2, 0.3), n)
    assert out.t == pytest.approx(wrap01(0.1 + n * B), abs=1e-10)
    assert out.x == pytest.approx(wrap01(0.2 + n * A), abs=1e-10)
    assert out.ytil == pytest.approx(0.3, abs=1e-10)


def test_gamma_flow_properties():
    s = np.array([0.2, 0.4, 1.5])
    assert np.array_equal(gamma_flow(s, 0.0), s)
    # integer period acts only on the fiber height
    out = gamma_flow(s, 1.0)
    assert out == pytest.approx([0.2, 0.4, 0.5], abs=1e-15)


@given(u=st.floats(-3, 3), v=st.floats(-3, 3))
@settings(max_examples=50, deadline=None)
def test_gamma_flow_law(u, v):
    s = np.array([0.37, 0.81, -0.25])
    a = gamma_flow(gamma_flow(s, u), v)
    b = gamma_flow(s, u + v)
    assert skew_dist(a, b) <= 1e-12


def test_gamma_isometry():
    rng = np.random.default_rng(0)
    p = rng.uniform(-1, 1, (200, 3))
    q = rng.uniform(-1, 1, (200, 3))
    d0 = skew_dist(p, q)
    d1 = skew_dist(gamma_flow(p, 0.73), gamma_flow(q, 0.73))
    assert np.max(np.abs(d1 - d0)) <= 1e-12


def test_commutation_thresholds(rigid_skew, susp_skew):
    assert check_commutation(rigid_skew, samples=300).defect <= 1e-12
    assert check_commutation(susp_skew, samples=300).defect <= 1e-10
    tw = build_centralized(DehnTwist(1), 0.0)
    assert check_commutation(tw, samples=300).defect <= 1e-10


def test_closed_form_oracle(rigid_skew, susp_skew):
    assert check_closed_form(rigid_skew, samples=100).defect <= 1e-7
    assert check_closed_form(susp_skew, samples=100).defect <= 1e-7


def test_vertical_orbit_bound(rigid_skew, susp_skew):
    assert vertical_orbit_bound(rigid_skew, SkewState(0.1, 0.2, 0.0),
                                n_max=300) <= 1e-12
    osc = vertical_orbit_bound(susp_skew, SkewState(0.1, 0.2, 0.0), n_max=2000)
    assert osc <= 2.0 * B + 1e-9


# -- grids ---------------------------------------------------------------------


def small_geom(skew, n=48):
    return geometry_for(skew, center_y=0.0, n_t=n, n_x=n, n_y=2 * n)


def test_geometry_unit_is_exact_cells(rigid_skew):
    geom = small_geom(rigid_skew)
    m = round(1.0 / geom.h_y)
    assert m * geom.h_y == pytest.approx(1.0, abs=1e-12)
    assert geom.y_max - geom.y_min == pytest.approx(geom.n_y * geom.h_y)


def test_geometry_rejects_small_window(rigid_skew):
    with pytest.raises(ValueError):
        geometry_for(rigid_skew, half_height=0.5)


def test_block_limits(rigid_skew):
    geom = small_geom(rigid_skew)
    ball = ball_fiber((0.5, 0.0), 0.1)
    tiny = make_block(ball, 0.37, 1e-9, geom)
    fibers = np.nonzero(tiny.occ.any(axis=(1, 2)))[0]
    assert fibers.size == 1  # single fiber slab
    assert fibers[0] == geom.t_cell(0.37)

    half = make_block(ball, (geom.t_cell(0.3) + 0.5) * geom.h_t, 0.5, geom)
    fibers = np.nonzero(half.occ.any(axis=(1, 2)))[0]
    assert fibers.size == geom.n_t - 1  # full width minus the antipodal cell

    with pytest.raises(ValueError):
        make_block(ball, 0.0, 0.6, geom)


def test_block_image_is_block(rigid_skew):
    # the image of a block is the block of the transported fiber set
    geom = small_geom(rigid_skew)
    t0 = (geom.t_cell(0.2) + 0.5) * geom.h_t
    blk = make_block(ball_fiber((0.5, 0.0), 0.12), t0, 0.25, geom)
    it, ix, iy = np.nonzero(blk.occ)
    t, x, y = geom.centers(it, ix, iy)
    img = rigid_skew.step(np.stack([t, x, y], axis=-1))
    img_mask = np.zeros_like(blk.occ)
    img_mask[geom.t_cell(img[:, 0]), geom.x_cell(img[:, 1]),
             geom.y_cell(img[:, 2])] = True
    # transported fiber set: the ball moved by the annulus map, re-centered
    blk2 = make_block(ball_fiber((wrap01(0.5 + A), 0.0), 0.12),
                      wrap01(t0 + B), 0.25, geom)
    # Hausdorff slack of one cell: dilate each and require mutual cover
    from torusdyn.skew import dilate_mask

    assert not (img_mask & ~dilate_mask(blk2.occ)).any()
    assert not (blk2.occ & ~dilate_mask(img_mask)).any()


def test_saturate_identity_returns_seed():
    skew = build_centralized(RigidTranslation(0, 0), 0.0)
    geom = small_geom(skew)
    seed = make_block(ball_fiber((0.5, 0.0), 0.12), 0.0, 0.5, geom)
    sat = saturate_invariant_region(skew, seed, max_iters=30)
    from torusdyn.skew import component_of

    assert np.array_equal(sat.occ, component_of(seed, seed.occ))
    assert sat.provenance["status"] == "fixed-point"


def test_saturate_rigid_fills_slab(rigid_skew):
    geom = small_geom(rigid_skew, n=64)
    r = 0.15
    seed = make_block(ball_fiber((0.5, 0.0), r), 0.0, 0.5, geom)
    sat = saturate_invariant_region(rigid_skew, seed, max_iters=400)
    assert sat.provenance["status"] in ("fixed-point", "max-iters")
    # analytic slab: |y| <= r + 1/2; the t and x marginals cover everything
    assert sat.occ.any(axis=(1, 2)).all()
    assert sat.occ.any(axis=(0, 2)).all()
    ys = geom.y_min + (np.arange(geom.n_y) + 0.5) * geom.h_y
    rows = sat.occ.any(axis=(0, 1))
    covered = ys[rows]
    assert covered.min() == pytest.approx(-(r + 0.5), abs=3 * geom.h_y)
    assert covered.max() == pytest.approx(r + 0.5, abs=3 * geom.h_y)
    # one-sided invariance within a one-cell dilation
    bad = invariance_defect(rigid_skew, sat)
    assert bad["forward"] <= 1e-4 * sat.count
    assert bad["backward"] <= 1e-4 * sat.count


def test_saturate_monotone_in_iterations(rigid_skew):
    geom = small_geom(rigid_skew, n=32)
    seed = make_block(ball_fiber((0.5, 0.0), 0.15), 0.0, 0.5, geom)
    prev = None
    for iters in (2, 5, 9):
        sat = saturate_invariant_region(rigid_skew, seed, max_iters=iters,
                                        patience=10**9)
        if prev is not None:
            assert not (prev & ~sat.occ).any()
        prev = sat.occ


def test_saturate_window_exhaustion():
    # constant vertical drift with rho = 0 escapes any window
    skew = build_centralized(RigidTranslation(0.1, 0.3), 0.0, c_est=0.0)
    geom = geometry_for(skew, n_t=16, n_x=16, n_y=32, half_height=1.0)
    seed = make_block(ball_fiber((0.5, 0.0), 0.2), 0.0, 0.5, geom)
    sat = saturate_invariant_region(skew, seed, max_iters=100)
    assert sat.provenance["status"] == "window-exhausted"
    assert sat.count > 0  # partial mask carried


def test_fiber_complement_components(rigid_skew):
    geom = small_geom(rigid_skew, n=32)
    occ = np.zeros((geom.n_t, geom.n_x, geom.n_y), dtype=bool)
    occ[:, :, 20:30] = True  # horizontal band
    comps, _ = fiber_complement_components(GridMask(geom, occ), 0.4)
    unbounded = [c for c in comps if c.unbounded]
    assert len(comps) == 2 and len(unbounded) == 2
    assert {c.touches_top for c in unbounded} == {True, False}

    empty, _ = fiber_complement_components(GridMask(geom, np.zeros_like(occ)), 0.0)
    assert len(empty) == 1
    assert empty[0].touches_bottom and empty[0].touches_top


def test_calibration_consistency(susp_skew):
    cal = susp_skew.calibrate(n=2000, samples=16, seed=0)
    assert cal["consistent"]
    assert abs(cal["estimate"] - susp_skew.rho) <= 2.0 / cal["n"] + cal["spread"]
