"""Constructive circle-factor pipeline.

From a saturated bounded invariant region of the skew-product, extract the
family of separating continua in the time-zero fiber, evaluate the height
function h(z) = inf{s : z below the s-th continuum} by bisection, verify its
equivariances, and project to a torus-to-circle factor map with measured
semi-conjugacy defect. Each s value of the ladder is independent; fills are
memoized on their rasterization key so repeated height queries are cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .rotation import recurrence_probe
from .skew import (GridMask, ball_fiber, close_fibers, component_of,
                   extend_to_envelopes, geometry_for, invariance_defect,
                   refine_envelopes, saturate_block_orbit,
                   _union_pairs, _LABEL_STRUCTURE)
from .util import circle_dist, lattice_points_2d, wrap01


@dataclass
class TauRegion:
    """Bounded connected invariant region with its build provenance."""

    mask: GridMask
    skew: object
    seed_point: tuple
    ball_radius: float
    status: str
    invariance: dict
    recurrence_times: list
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        self._fills = {}

    @property
    def geom(self):
        return self.mask.geom

    @property
    def bounded(self):
        occ = self.mask.occ
        return not (occ[:, :, 0].any() or occ[:, :, -1].any())


def build_tau(skew, seed_point, ball_radius=0.15, n_t=256, n_x=256, n_y=512,
              half_height=None, max_iters=240, refine_rounds=20_000,
              recurrence_n_max=2000, seed=0):
    """Saturate the half-width block over a ball at the given annulus point.

    The seed point should come with recurrence evidence; an empty probe
    result is attached as a warning, not a rejection. Window exhaustion is
    propagated in the status and leaves the partial mask available. When
    ``refine_rounds`` is positive the region's vertical envelopes are
    additionally tracked in real arithmetic over that many rounds and the
    mask is extended to them (set 0 to disable for maps whose fibers are
    not vertically solid per column).
    """
    if not (0.0 < ball_radius <= 1.0):
        raise ValueError("ball radius must be in (0, 1]")
    x0, y0 = float(seed_point[0]), float(seed_point[1])
    geom = geometry_for(skew, center_y=y0, n_t=n_t, n_x=n_x, n_y=n_y,
                        half_height=half_height)
    times = recurrence_probe(skew.spec, (x0, wrap01(y0)), max(ball_radius, 0.05),
                             n_max=recurrence_n_max, seed=seed)
    warnings = []
    if not times:
        warnings.append("no recurrence evidence for the seed point")
    # fiber cloud: cell centers of the rasterized seed ball
    pred = ball_fiber((x0, y0), ball_radius)
    xc = (np.arange(geom.n_x) + 0.5) * geom.h_x
    yc = geom.y_min + (np.arange(geom.n_y) + 0.5) * geom.h_y
    X, Y = np.meshgrid(xc, yc, indexing="ij")
    inside = pred(X, Y)
    pts = np.column_stack([X[inside], Y[inside]])
    occ, seed_occ, status, rounds = saturate_block_orbit(
        skew, pts, geom, max_iters=max_iters)
    if refine_rounds:
        # boundary circle samples give the cloud exact vertical extremes
        theta = 2.0 * np.pi * (np.arange(1024) + 0.5) / 1024
        ring = np.column_stack([x0 + ball_radius * np.cos(theta),
                                y0 + ball_radius * np.sin(theta)])
        env_min, env_max = refine_envelopes(skew, np.vstack([pts, ring]), geom,
                                            rounds=refine_rounds)
        occ = extend_to_envelopes(occ, geom, env_min, env_max)
        if occ[:, :, 0].any() or occ[:, :, -1].any():
            status = "window-exhausted"
    occ = close_fibers(occ)
    mask = GridMask(geom, occ, provenance={
        "seed": {"point": (x0, y0), "radius": ball_radius, "block_halfwidth": 0.5},
        "iterations": rounds, "refine_rounds": refine_rounds, "status": status})
    mask.occ = component_of(mask, seed_occ)
    inv = invariance_defect(skew, mask)
    return TauRegion(mask=mask, skew=skew, seed_point=(x0, y0),
                     ball_radius=ball_radius, status=status,
                     invariance=inv, recurrence_times=times, warnings=warnings)


@dataclass
class FiberFill:
    """Flood fill of a time-zero fiber complement from the bottom edge."""

    s: float
    fill: np.ndarray  # bool (n_x, n_y): the lower complement component
    separating: bool
    fiber_index: int
    shift_cells: int


def _fill_key(tau, s):
    geom = tau.geom
    it = int(geom.t_cell(wrap01(s)))
    shift = int(np.round(s / geom.h_y))
    return it, shift


def lower_component(tau, s):
    """Lower unbounded complement component of the flow-translated fiber.

    The obstruction is the time-s-mod-1 fiber of the region translated up by
    exactly s (rasterized once); the fill grows from the bottom window row
    through 4-adjacency with x wrap. A fill touching the top row is returned
    flagged not separating.
    """
    key = _fill_key(tau, s)
    cached = tau._fills.get(key)
    if cached is not None:
        return cached
    geom = tau.geom
    it, shift = key
    fiber = tau.mask.occ[it]
    obstruction = np.zeros_like(fiber)
    n_y = geom.n_y
    if shift >= 0:
        if shift < n_y:
            obstruction[:, shift:] = fiber[:, : n_y - shift]
    else:
        if -shift < n_y:
            obstruction[:, :shift] = fiber[:, -shift:]
    comp = ~obstruction
    lab, num = ndimage.label(comp, structure=_LABEL_STRUCTURE)
    parent = list(range(num + 1))
    a, b = lab[0, :], lab[-1, :]
    both = (a > 0) & (b > 0)
    _union_pairs(parent, a[both], b[both])

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    lut = np.array([find(i) for i in range(num + 1)])
    lab = lut[lab]
    bottom = set(np.unique(lab[:, 0])) - {0}
    fill = np.isin(lab, sorted(bottom))
    separating = not fill[:, -1].any()
    out = FiberFill(s=float(s), fill=fill, separating=separating,
                    fiber_index=it, shift_cells=shift)
    tau._fills[key] = out
    return out


@dataclass
class ContinuumApprox:
    """Boundary point cloud of the lower component: the separating continuum."""

    s: float
    points: np.ndarray  # (m, 2) cell centers (x, ytil)
    fill: FiberFill

    @property
    def separating(self):
        return self.fill.separating


def continuum_Cs(tau, s):
    """Boundary cells of the lower fill: obstruction cells adjacent to it."""
    fl = lower_component(tau, s)
    geom = tau.geom
    fill = fl.fill
    grown = fill.copy()
    grown[1:, :] |= fill[:-1, :]
    grown[:-1, :] |= fill[1:, :]
    grown[0, :] |= fill[-1, :]
    grown[-1, :] |= fill[0, :]
    grown[:, 1:] |= fill[:, :-1]
    grown[:, :-1] |= fill[:, 1:]
    boundary = grown & ~fill
    ix, iy = np.nonzero(boundary)
    xs = (ix + 0.5) * geom.h_x
    ys = geom.y_min + (iy + 0.5) * geom.h_y
    return ContinuumApprox(s=float(s), points=np.column_stack([xs, ys]), fill=fl)


@dataclass
class HeightValue:
    value: float
    ordering_ok: bool


def evaluate_h(tau, z, tol=None):
    """Height of an annulus point: bisect s on lower-component membership.

    Membership is monotone in s up to rasterization jitter; a violated
    bracket is reported through ordering_ok instead of raising.
    """
    geom = tau.geom
    if tol is None:
        tol = 0.5 * geom.h_y
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    x, y = float(z[0]), float(z[1])
    ix = int(geom.x_cell(x))

    def member(s):
        iy = int(np.floor((y - geom.y_min) / geom.h_y))
        if iy < 0:
            return True
        if iy >= geom.n_y:
            return False
        fl = lower_component(tau, s)
        if not fl.separating:
            # the translated obstruction left the window: everything is on
            # one side of the continuum, decided by the translation sign
            return fl.shift_cells >= 0
        return bool(fl.fill[ix, iy])

    span = geom.y_max - geom.y_min
    lo, hi = y - span, y + span
    ok = True
    if member(lo) or not member(hi):
        ok = False
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if member(mid):
            hi = mid
        else:
            lo = mid
    return HeightValue(value=0.5 * (lo + hi), ordering_ok=ok)


@dataclass
class EquivarianceReport:
    unit_translate_defect: float
    map_defect: float
    ordering_violations: int
    pairs_checked: int
    samples: int
    tol: float


def verify_equivariance(tau, samples=128, tol=None, s_ladder=64, seed=0):
    """Defects of the two height equivariances plus ladder ordering check.

    Reports max |h(z + (0,1)) - h(z) - 1| and |h(f z) - h(z) - rho| over
    samples, and counts ladder pairs s < s' (at least two s-steps apart)
    whose lower components fail strict inclusion.
    """
    geom = tau.geom
    if tol is None:
        tol = 0.5 * geom.h_y
    skew = tau.skew
    rho = skew.rho
    pts = lattice_points_2d(samples, seed=seed)
    xs = pts[:, 0]
    y_c = 0.5 * (geom.y_min + geom.y_max)
    ys = y_c - 0.75 + 1.5 * pts[:, 1]
    d_unit = 0.0
    d_map = 0.0
    for x, y in zip(xs, ys):
        h0 = evaluate_h(tau, (x, y), tol=tol).value
        h1 = evaluate_h(tau, (x, y + 1.0), tol=tol).value
        w = skew.spec.annulus_map(np.array([x, y]))
        h2 = evaluate_h(tau, (float(w[0]), float(w[1])), tol=tol).value
        d_unit = max(d_unit, abs(h1 - h0 - 1.0))
        d_map = max(d_map, abs(h2 - h0 - rho))
    violations = 0
    pairs = 0
    ladder = [j / s_ladder for j in range(s_ladder)]
    fills = {s: lower_component(tau, s) for s in ladder}
    min_sep = 2.0 * geom.h_y
    for i, s in enumerate(ladder):
        for s2 in ladder[i + 1:]:
            if s2 - s < min_sep:
                continue
            pairs += 1
            f1, f2 = fills[s].fill, fills[s2].fill
            subset = not (f1 & ~f2).any()
            strict = (f2 & ~f1).any()
            if not (subset and strict):
                violations += 1
    return EquivarianceReport(unit_translate_defect=float(d_unit),
                              map_defect=float(d_map),
                              ordering_violations=violations,
                              pairs_checked=pairs, samples=samples, tol=tol)


@dataclass
class FactorMap:
    """Sampled torus-to-circle factor with per-sample defect statistics."""

    x_grid: np.ndarray
    y_grid: np.ndarray
    values: np.ndarray  # lifted heights, shape (n_x, n_y)
    defect_max: float
    defect_mean: float
    rho: float
    resolution: tuple
    monotone_in_y: bool


def project_to_torus_factor(tau, grid=(64, 32), tol=None):
    """Sample the height on a unit-height window and measure the defect.

    The torus-level defect is the circle distance between h(f z) and
    h(z) + rho over all samples; the height is also checked to be
    nondecreasing along each sampled vertical line.
    """
    geom = tau.geom
    n_gx, n_gy = grid
    if tol is None:
        tol = 0.5 * geom.h_y
    y_c = 0.5 * (geom.y_min + geom.y_max)
    xs = (np.arange(n_gx) + 0.5) / n_gx
    ys = y_c - 0.5 + (np.arange(n_gy) + 0.5) / n_gy
    vals = np.zeros((n_gx, n_gy))
    imgs = np.zeros((n_gx, n_gy))
    skew = tau.skew
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            vals[i, j] = evaluate_h(tau, (x, y), tol=tol).value
            w = skew.spec.annulus_map(np.array([x, y]))
            imgs[i, j] = evaluate_h(tau, (float(w[0]), float(w[1])), tol=tol).value
    defects = circle_dist(wrap01(imgs), wrap01(vals + skew.rho))
    monotone = bool(np.all(np.diff(vals, axis=1) >= -2.0 * geom.h_y))
    return FactorMap(x_grid=xs, y_grid=ys, values=vals,
                     defect_max=float(np.max(defects)),
                     defect_mean=float(np.mean(defects)), rho=skew.rho,
                     resolution=(n_gx, n_gy), monotone_in_y=monotone)


def combine_transverse_factors(fm_vertical, fm_horizontal, spec, rho_pair,
                               samples=256, seed=0):
    """Pair a vertical and a (coordinate-swapped) horizontal factor.

    Returns the joint defect of (h1(swap z), h2(z)) against the target torus
    translation, per coordinate, over lattice samples. The factor maps are
    evaluated by bilinear lookup on their sample grids.
    """
    pts = lattice_points_2d(samples, seed=seed)

    def lookup(fm, x, y):
        xs, ys, vals = fm.x_grid, fm.y_grid, fm.values
        y_lift = ys[0] + (float(y) - ys[0]) % 1.0  # representative in the window
        i = int(np.clip(np.searchsorted(xs, float(x)) - 1, 0, xs.size - 1))
        j = int(np.clip(np.searchsorted(ys, y_lift) - 1, 0, ys.size - 1))
        return vals[i, j]

    d1 = []
    d2 = []
    for x, y in pts:
        z = np.array([x, y])
        fz = wrap01(spec.eval_lift(z))
        h2 = lookup(fm_vertical, x, y)
        h2f = lookup(fm_vertical, fz[0], fz[1])
        d2.append(circle_dist(wrap01(h2f), wrap01(h2 + rho_pair[1])))
        h1 = lookup(fm_horizontal, y, x)
        h1f = lookup(fm_horizontal, fz[1], fz[0])
        d1.append(circle_dist(wrap01(h1f), wrap01(h1 + rho_pair[0])))
    return {"horizontal_defect": float(np.max(d1)),
            "vertical_defect": float(np.max(d2)),
            "samples": samples, "seed": seed}
