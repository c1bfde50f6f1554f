import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from torusdyn.circle import (CircleLift, build_denjoy, denjoy_semiconjugacy,
                             eval_lift, geometric_gap_schedule,
                             rotation_number)
from torusdyn.util import GOLDEN_MEAN, SQRT2_MINUS_1, circle_dist, wrap01

GOLDEN = GOLDEN_MEAN


def gap_endpoints_oracle(alpha, lengths_by_index):
    """Independent endpoint computation: insert gaps at frac(n*alpha) by
    accumulating the inserted mass below each base angle."""
    items = sorted((wrap01(n * alpha), n, l) for n, l in lengths_by_index.items())
    total = sum(l for _, _, l in items)
    out = {}
    acc = 0.0
    for theta, n, l in items:
        a = (theta + acc) / (1.0 + total)
        out[n] = (a, a + l / (1.0 + total))
        acc += l
    return out


def test_rigid_eval_translation():
    lift = CircleLift.rigid(0.25)
    assert eval_lift(lift, 0.5) == pytest.approx(0.75, abs=1e-15)
    assert eval_lift(lift, 1.5) == pytest.approx(1.75, abs=1e-15)


@given(x=st.floats(-10, 10))
@settings(max_examples=60, deadline=None)
def test_degree_one_rigid_and_denjoy(x):
    for lift in (CircleLift.rigid(0.3), _SHARED_DENJOY):
        assert abs(lift(x + 1.0) - lift(x) - 1.0) <= 1e-12


_SHARED_DENJOY = build_denjoy(GOLDEN, N=12)


def test_degree_one_bulk():
    rng = np.random.default_rng(1)
    xs = rng.uniform(-5, 5, 1000)
    for lift in (CircleLift.rigid(0.123), _SHARED_DENJOY,
                 build_denjoy(SQRT2_MINUS_1, N=5)):
        assert np.max(np.abs(lift(xs + 1) - lift(xs) - 1)) <= 1e-12


def test_strict_monotonicity():
    rng = np.random.default_rng(2)
    for lift in (_SHARED_DENJOY, build_denjoy(SQRT2_MINUS_1, N=1)):
        a = rng.uniform(0, 1, 1000)
        b = a + rng.uniform(1e-9, 1.0 - a)
        assert np.all(lift(b) > lift(a))


def test_malformed_table_rejected():
    with pytest.raises(ValueError):
        CircleLift.piecewise_affine([(0.0, 0.1), (0.5, 0.05)])  # non-monotone
    with pytest.raises(ValueError):
        CircleLift.piecewise_affine([(0.0, 0.0), (0.0, 0.5)])  # duplicate


def test_denjoy_gap_midpoint_transport():
    lift = build_denjoy(GOLDEN, N=20)
    table = {int(n): float(l) for n, l in
             zip(lift.gap_table.indices, lift.gap_table.length)}
    oracle = gap_endpoints_oracle(GOLDEN, table)
    a0, b0 = oracle[0]
    a1, b1 = oracle[1]
    assert lift.gap_table.gap(0) == pytest.approx((a0, b0), abs=1e-14)
    mid_img = wrap01(lift((a0 + b0) / 2))
    assert mid_img == pytest.approx((a1 + b1) / 2, abs=1e-10)


def test_denjoy_gap_transport_all_endpoints():
    lift = build_denjoy(GOLDEN, N=10)
    gt = lift.gap_table
    for j, n in enumerate(gt.indices):
        if n < gt.indices.max():
            assert wrap01(lift(gt.a[j])) == pytest.approx(gt.a[j + 1], abs=1e-10)
            assert wrap01(lift(gt.b[j])) == pytest.approx(gt.b[j + 1], abs=1e-10)


def test_build_denjoy_schedule_sum():
    lift = build_denjoy(GOLDEN, gap_schedule=lambda n: 0.1 * 2.0 ** (-abs(n)),
                        N=20)
    gt = lift.gap_table
    assert gt.indices.size == 41
    assert gt.length.sum() == pytest.approx(0.1 * (3.0 - 2.0 ** (1 - 20)), abs=1e-15)
    assert gt.length.sum() == pytest.approx(0.3, abs=1e-4)


def test_build_denjoy_three_gaps():
    lift = build_denjoy(GOLDEN, gap_schedule=lambda n: 0.05, N=1)
    gt = lift.gap_table
    assert gt.indices.size == 3
    # each constrained gap maps affinely onto the next: check midpoints too
    for j, n in enumerate(gt.indices):
        if n < 1:
            mid = 0.5 * (gt.a[j] + gt.b[j])
            assert wrap01(lift(mid)) == pytest.approx(
                0.5 * (gt.a[j + 1] + gt.b[j + 1]), abs=1e-10)


def test_gaps_disjoint():
    gt = build_denjoy(GOLDEN, N=25).gap_table
    order = np.argsort(gt.a)
    assert np.all(gt.b[order][:-1] <= gt.a[order][1:] + 1e-15)
    assert gt.length.sum() < 1.0


def test_zero_gap_limit_is_rotation():
    xs = np.linspace(0, 1, 37, endpoint=False)
    for scale in (1e-3, 1e-6):
        lift = build_denjoy(GOLDEN, gap_schedule=lambda n: scale * 2.0 ** (-abs(n)),
                            N=8)
        assert np.max(np.abs(lift(xs) - (xs + GOLDEN))) <= 4 * scale


def test_build_rejections():
    with pytest.raises(ValueError):
        build_denjoy(GOLDEN, gap_schedule=lambda n: 0.2, N=3)  # mass >= 1
    with pytest.raises(ValueError):
        build_denjoy(GOLDEN, N=0)
    with pytest.raises(ValueError):
        geometric_gap_schedule(total_mass=1.2)


def test_rotation_number_rigid_exact():
    est, bound = rotation_number(CircleLift.rigid(0.25), 0.0, 1000)
    assert abs(est - 0.25) <= 1e-12
    assert bound == pytest.approx(1e-3, rel=1e-2)
    est, _ = rotation_number(CircleLift.rigid(0.0), 0.3, 10)
    assert est == 0.0


def test_rotation_number_denjoy_tracks_target():
    lift = build_denjoy(GOLDEN, N=30)
    est, bound = rotation_number(lift, 0.1, 20_000)
    assert abs(est - GOLDEN) <= 1.0 / 20_000 + lift.truncation_tol + 1e-9


def test_rotation_number_cauchy_consistency():
    lift = build_denjoy(SQRT2_MINUS_1, N=15)
    n = 2000
    e1, _ = rotation_number(lift, 0.3, n)
    e2, _ = rotation_number(lift, 0.3, 2 * n)
    assert abs(e1 - e2) <= 1.0 / n + 1.0 / (2 * n) + 1e-12


def test_rotation_number_rejects_bad_n():
    with pytest.raises(ValueError):
        rotation_number(CircleLift.rigid(0.1), 0.0, 0)


def test_semiconjugacy_collapses_gaps():
    lift = build_denjoy(GOLDEN, N=12)
    h = denjoy_semiconjugacy(lift)
    gt = lift.gap_table
    for j, n in enumerate(gt.indices):
        mid = 0.5 * (gt.a[j] + gt.b[j])
        assert h(mid) == pytest.approx(wrap01(int(n) * GOLDEN), abs=1e-12)


def test_semiconjugacy_defect_below_tolerance():
    lift = build_denjoy(GOLDEN, N=20)
    h = denjoy_semiconjugacy(lift)
    ys = np.random.default_rng(5).uniform(0, 1, 10_000)
    defect = np.max(circle_dist(h(lift(ys)), wrap01(h(ys) + GOLDEN)))
    assert defect <= h.truncation_tol + 1e-12


def test_semiconjugacy_zero_gap_limit_identity():
    lift = build_denjoy(GOLDEN, gap_schedule=lambda n: 1e-9 * 2.0 ** (-abs(n)), N=5)
    h = denjoy_semiconjugacy(lift)
    ys = np.linspace(0, 1, 101, endpoint=False)
    assert np.max(circle_dist(h(ys), ys)) <= 1e-8


def test_semiconjugacy_requires_denjoy_kind():
    with pytest.raises(ValueError):
        denjoy_semiconjugacy(CircleLift.rigid(0.5))


def test_inverse_roundtrip():
    rng = np.random.default_rng(7)
    xs = rng.uniform(-3, 3, 500)
    for lift in (CircleLift.rigid(0.77), build_denjoy(GOLDEN, N=9)):
        inv = lift.inverse()
        assert np.max(np.abs(inv(lift(xs)) - xs)) <= 1e-10
        assert np.max(np.abs(lift(inv(xs)) - xs)) <= 1e-10
