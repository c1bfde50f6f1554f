"""Centralized skew-product on T x T x R, its flow symmetry, and grid saturation.

The skew-product advances a circle time coordinate rigidly and acts on an
annulus fiber by the underlying torus map with the mean vertical drift
subtracted, so bounded fiber orbits correspond to bounded vertical
deviations of the torus map. The diagonal flow (t, x, ytil) ->
(t + u, x, ytil - u) commutes with it and is an isometry; orbits of fiber
sets under both generate the invariant regions the factor construction
needs. Saturation runs as bulk-synchronous frontier rounds on a boolean
occupancy grid; the merged result is independent of intra-round ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .util import skew_dist, wrap01

_LABEL_STRUCTURE = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


@dataclass(frozen=True)
class SkewState:
    t: float
    x: float
    ytil: float

    def as_array(self):
        return np.array([self.t, self.x, self.ytil])

    @classmethod
    def from_array(cls, a):
        return cls(float(a[0]), float(a[1]), float(a[2]))


class CentralizedSkew:
    """Skew-product induced by a torus lift and a base angle rho.

    Immutable and shareable; all evaluators take (N, 3) state arrays with
    columns (t, x, ytil), t and x reduced to [0, 1).
    """

    def __init__(self, spec, rho, c_est=None):
        self.spec = spec
        self.rho = float(rho)
        self.k = spec.k
        self.c_est = None if c_est is None else float(c_est)

    def step(self, states, inverse=False):
        s = np.atleast_2d(np.asarray(states, dtype=float))
        t, x, ytil = s[:, 0], s[:, 1], s[:, 2]
        if not inverse:
            w = np.stack([x, ytil + t], axis=-1)
            img = self.spec.eval_lift(w)
            out = np.stack([
                wrap01(t + self.rho),
                wrap01(img[:, 0]),
                img[:, 1] - t - self.rho,
            ], axis=-1)
        else:
            w = np.stack([x, ytil + t], axis=-1)
            img = self.spec.eval_inverse(w)
            out = np.stack([
                wrap01(t - self.rho),
                wrap01(img[:, 0]),
                img[:, 1] - t + self.rho,
            ], axis=-1)
        return out.reshape(np.shape(np.asarray(states, dtype=float)))

    def iterate(self, states, n):
        """n-fold composition; the inverse map is used for n < 0."""
        out = np.asarray(states, dtype=float).copy()
        for _ in range(abs(int(n))):
            out = self.step(out, inverse=n < 0)
        return out

    def closed_form(self, states, n):
        """Independent route: conjugate the n-th power of the annulus map.

        The time coordinate advances rigidly by n*rho while the fiber is
        shifted up by the time lift, mapped n times, and shifted back down
        by the accumulated drift.
        """
        s = np.atleast_2d(np.asarray(states, dtype=float))
        t, x, ytil = s[:, 0], s[:, 1], s[:, 2]
        w = np.stack([x, ytil + t], axis=-1)
        n = int(n)
        for _ in range(abs(n)):
            w = self.spec.annulus_map(w, inverse=n < 0)
        out = np.stack([
            wrap01(t + n * self.rho),
            wrap01(w[:, 0]),
            w[:, 1] - n * self.rho - t,
        ], axis=-1)
        return out.reshape(np.shape(np.asarray(states, dtype=float)))

    def calibrate(self, n=2000, samples=32, seed=0):
        """Check rho against the sampled vertical rotation number."""
        from .rotation import vertical_rotation_number

        est, spread = vertical_rotation_number(self.spec, n=n, samples=samples,
                                               seed=seed)
        return {"rho": self.rho, "estimate": est, "spread": spread,
                "n": n, "consistent": abs(est - self.rho) <= 2.0 / n + spread}


def build_centralized(spec, rho, c_est=None):
    return CentralizedSkew(spec, rho, c_est=c_est)


def gamma_flow(states, u):
    """The commuting isometric flow (t, x, ytil) -> (t + u, x, ytil - u)."""
    s = np.asarray(states, dtype=float).copy()
    s2 = np.atleast_2d(s)
    s2[:, 0] = wrap01(s2[:, 0] + u)
    s2[:, 2] = s2[:, 2] - u
    return s2.reshape(np.shape(np.asarray(states, dtype=float)))


def iterate_F(skew, state, n):
    if isinstance(state, SkewState):
        return SkewState.from_array(skew.iterate(state.as_array(), n))
    return skew.iterate(state, n)


@dataclass
class CheckResult:
    defect: float
    threshold: float

    @property
    def passed(self):
        return self.defect <= self.threshold


def check_commutation(skew, samples=1000, seed=0, threshold=1e-9):
    """Max defect of F(Gamma^u s) vs Gamma^u(F s) over random states and u."""
    rng = np.random.default_rng(seed)
    s = np.column_stack([
        rng.uniform(0, 1, samples),
        rng.uniform(0, 1, samples),
        rng.uniform(-2, 2, samples),
    ])
    u = rng.uniform(-2, 2, samples)
    a = skew.step(gamma_flow(s, u))
    b = gamma_flow(skew.step(s), u)
    return CheckResult(defect=float(np.max(skew_dist(a, b))), threshold=threshold)


def check_closed_form(skew, n_values=(1, -1, 7, -7, 25, 50, -50), samples=150,
                      seed=0, threshold=1e-7):
    """Max defect of the iterated map against the conjugation closed form."""
    rng = np.random.default_rng(seed)
    s = np.column_stack([
        rng.uniform(0, 1, samples),
        rng.uniform(0, 1, samples),
        rng.uniform(-2, 2, samples),
    ])
    worst = 0.0
    for n in n_values:
        a = skew.iterate(s, n)
        b = skew.closed_form(s, n)
        worst = max(worst, float(np.max(skew_dist(a, b))))
    return CheckResult(defect=worst, threshold=threshold)


def vertical_orbit_bound(skew, state, n_max=10_000):
    """Sampled oscillation sup |ytil_m - ytil_n| over |m|, |n| <= n_max."""
    s0 = state.as_array() if isinstance(state, SkewState) else np.asarray(state, dtype=float)
    lo = hi = float(s0[2])
    for inverse in (False, True):
        cur = s0[None, :].copy()
        for _ in range(int(n_max)):
            cur = skew.step(cur, inverse=inverse)
            y = float(cur[0, 2])
            lo = min(lo, y)
            hi = max(hi, y)
    return hi - lo


# -- occupancy grids -----------------------------------------------------------


@dataclass(frozen=True)
class GridGeometry:
    """Regular cell grid over T x T x [y_min, y_max]; t and x wrap, y does not."""

    n_t: int
    n_x: int
    n_y: int
    y_min: float
    y_max: float

    @property
    def h_t(self):
        return 1.0 / self.n_t

    @property
    def h_x(self):
        return 1.0 / self.n_x

    @property
    def h_y(self):
        return (self.y_max - self.y_min) / self.n_y

    def t_cell(self, t):
        i = np.floor(wrap01(t) * self.n_t).astype(np.int64)
        return np.minimum(i, self.n_t - 1)

    def x_cell(self, x):
        i = np.floor(wrap01(x) * self.n_x).astype(np.int64)
        return np.minimum(i, self.n_x - 1)

    def y_cell(self, y):
        """Cell index of a height; may fall outside [0, n_y)."""
        return np.floor((np.asarray(y, dtype=float) - self.y_min) / self.h_y).astype(np.int64)

    def centers(self, it, ix, iy):
        t = (np.asarray(it) + 0.5) * self.h_t
        x = (np.asarray(ix) + 0.5) * self.h_x
        y = self.y_min + (np.asarray(iy) + 0.5) * self.h_y
        return t, x, y

    def fiber_shift_cells(self):
        """Gamma transport over one t cell, measured in y cells."""
        return self.h_t / self.h_y


def geometry_for(skew, center_y=0.0, n_t=256, n_x=256, n_y=512, half_height=None):
    """Window sized from the cached deviation bound, cells snapped to 1/M.

    The half height defaults to 2*c_est + 2 and the y cell height is snapped
    to an exact integer fraction of 1 so that the unit vertical translation
    is an exact cell count.
    """
    c = skew.c_est if skew.c_est is not None else 0.0
    if half_height is None:
        half_height = 2.0 * c + 2.0
    if half_height < 2.0 * c + 1.0:
        raise ValueError("window height must be at least 2*c_est + 1")
    m = int(np.ceil(n_y / (2.0 * half_height)))
    h_y = 1.0 / m
    y_min = (np.floor(center_y * m) - n_y // 2) * h_y
    return GridGeometry(n_t=n_t, n_x=n_x, n_y=n_y, y_min=float(y_min),
                        y_max=float(y_min + n_y * h_y))


@dataclass
class GridMask:
    geom: GridGeometry
    occ: np.ndarray  # bool, shape (n_t, n_x, n_y)
    provenance: dict = field(default_factory=dict)

    @property
    def count(self):
        return int(self.occ.sum())

    def copy(self):
        return GridMask(self.geom, self.occ.copy(), dict(self.provenance))


def ball_fiber(center, radius):
    """Predicate for an open annulus ball, usable as a block fiber set."""
    cx, cy = float(center[0]), float(center[1])
    r2 = float(radius) ** 2

    def pred(x, y):
        dx = np.abs(np.asarray(x) - cx) % 1.0
        dx = np.minimum(dx, 1.0 - dx)
        return dx * dx + (np.asarray(y) - cy) ** 2 < r2

    return pred


def make_block(fiber_pred, t_center, r, geom):
    """Rasterize the r-block around t_center swept from a fiber set.

    Fiber i is included when its center time is within r of t_center along
    the flow (the nearest fiber is always included so the r -> 0 limit is a
    single fiber slab); its content is the fiber set transported by the flow
    over the center offset, sampled at cell centers.
    """
    if not (0.0 < r <= 0.5):
        raise ValueError("block half-width must be in (0, 1/2]")
    occ = np.zeros((geom.n_t, geom.n_x, geom.n_y), dtype=bool)
    xc = (np.arange(geom.n_x) + 0.5) * geom.h_x
    yc = geom.y_min + (np.arange(geom.n_y) + 0.5) * geom.h_y
    X, Y = np.meshgrid(xc, yc, indexing="ij")
    nearest = int(geom.t_cell(t_center))
    for it in range(geom.n_t):
        u = (it + 0.5) * geom.h_t - t_center
        u = u - np.round(u)  # signed offset in [-1/2, 1/2]
        if abs(u) >= r - 1e-12 and it != nearest:
            continue
        # Gamma^u carries the fiber set at t_center to height y - u here
        occ[it] = fiber_pred(X, Y + u)
    return GridMask(geom, occ, provenance={"block": {"t": float(t_center), "r": float(r)}})


def _map_cells(skew, geom, it, ix, iy, inverse):
    """Image cell indices of the given cells under one skew-product step.

    Samples the cell center and four (x, y) corners inset by a quarter cell;
    the time coordinate advances rigidly so no time sampling is needed.
    Returns index arrays possibly outside the y window.
    """
    t, x, y = geom.centers(it, ix, iy)
    # corner samples inset to +-h/4 so exact gridline hits stay in their cell
    offs = [(0.0, 0.0), (-0.25, -0.25), (-0.25, 0.25), (0.25, -0.25), (0.25, 0.25)]
    pts = []
    for ox, oy in offs:
        pts.append(np.stack([
            t,
            x + ox * geom.h_x,
            y + oy * geom.h_y,
        ], axis=-1))
    pts = np.concatenate(pts, axis=0)
    img = skew.step(pts, inverse=inverse)
    jt = geom.t_cell(img[:, 0])
    jx = geom.x_cell(img[:, 1])
    jy = geom.y_cell(img[:, 2])
    return jt, jx, jy


def saturate_invariant_region(skew, seed_mask, max_iters=300, patience=25):
    """Grow the seed under the map and its inverse to a grid fixed point.

    Each round advances exact real orbits of the seed cell centers one more
    step in both directions and rasterizes them into the occupancy grid.
    Keeping the orbits in real arithmetic avoids the vertical quantization
    drift that iterating the rasterized map accumulates in the neutral
    direction; the rasterized union is the same set, evaluated without grid
    feedback. Growth stops once no round has added a cell for ``patience``
    consecutive rounds, at max_iters, or when the window's top or bottom row
    is reached ("window exhausted"). The connected component of the seed is
    extracted once at the end, using in-fiber 4-adjacency plus
    flow-transported adjacency between fibers.
    """
    geom = seed_mask.geom
    occ = seed_mask.occ.copy()
    it, ix, iy = np.nonzero(seed_mask.occ)
    t, x, y = geom.centers(it, ix, iy)
    pts = np.stack([t, x, y], axis=-1)
    fwd = pts.copy()
    bwd = pts.copy()
    status = "max-iters"
    rounds = 0
    stale = 0
    for rounds in range(1, max_iters + 1):
        fwd = skew.step(fwd)
        bwd = skew.step(bwd, inverse=True)
        new = np.zeros_like(occ)
        for img in (fwd, bwd):
            jt = geom.t_cell(img[:, 0])
            jx = geom.x_cell(img[:, 1])
            jy = geom.y_cell(img[:, 2])
            keep = (jy >= 0) & (jy < geom.n_y)
            new[jt[keep], jx[keep], jy[keep]] = True
        new &= ~occ
        if not new.any():
            stale += 1
            if stale >= patience:
                status = "fixed-point"
                break
            continue
        stale = 0
        occ |= new
        if new[:, :, 0].any() or new[:, :, -1].any():
            status = "window-exhausted"
            break
    comp = component_of(GridMask(geom, occ), seed_mask.occ)
    prov = dict(seed_mask.provenance)
    prov.update({"iterations": rounds, "status": status})
    return GridMask(geom, comp, prov)


def saturate_block_orbit(skew, fiber_points, geom, max_iters=300, patience=30,
                         sweep_cells=None):
    """Saturate a half-width block seed by transporting its fiber cloud.

    The image of an r-block under the skew-product is again an r-block, so
    the orbit union is assembled by iterating the two-dimensional fiber
    cloud exactly under the annulus map and sweeping each iterate across all
    fibers with the flow (a pure shear, rasterized per fiber). This keeps
    fiber-to-fiber structure exactly coherent and avoids per-fiber sampling
    tails. Returns the occupancy together with the stop status.
    """
    pts = np.asarray(fiber_points, dtype=float)
    occ = np.zeros((geom.n_t, geom.n_x, geom.n_y), dtype=bool)
    t_centers = (np.arange(geom.n_t) + 0.5) * geom.h_t
    rho = skew.rho

    # The flow offsets seen by a column over the run equidistribute with a
    # gap inversely proportional to the rounds times the cloud's x fraction;
    # sweeping each contribution over that band (gated on actual
    # equidistribution of the base angle) closes the sampling holes in the
    # offset direction. The sweep fattens edges by at most its own width,
    # uniformly, which cancels in all difference-based diagnostics.
    ts = np.sort(wrap01(rho * np.arange(-max_iters, max_iters + 1)))
    gaps = np.diff(np.concatenate([ts, [ts[0] + 1.0]]))
    gap = float(gaps.max())
    if sweep_cells is None:
        # both directions give 2*max_iters offsets, an x_frac share of which
        # reaches a given column; the observed maximal gap runs about twice
        # the mean gap
        x_frac = max(len(np.unique(geom.x_cell(pts[:, 0]))) / geom.n_x, 1e-3)
        cond_gap = 1.0 / (max_iters * x_frac)
        sweep_cells = max(gap, cond_gap) / geom.h_y
    sweep = 0.5 * sweep_cells * geom.h_y if gap < 0.05 else 0.0

    def raster_block(w, t_center):
        """Mark the half-width block of the cloud w centered at t_center."""
        u = t_centers - t_center
        u -= np.round(u)  # offsets in [-1/2, 1/2]
        jx = geom.x_cell(w[:, 0])
        # fiber i holds the cloud shifted down by its flow offset, swept over
        # the offset gap
        yy = w[None, :, 1] - u[:, None]
        it = np.broadcast_to(np.arange(geom.n_t)[:, None], yy.shape)
        jx2 = np.broadcast_to(jx[None, :], yy.shape)
        edge = False
        for dy in ((0.0,) if sweep == 0.0 else (-sweep, sweep)):
            jy = np.floor((yy + dy - geom.y_min) / geom.h_y).astype(np.int64)
            keep = (jy >= 0) & (jy < geom.n_y)
            occ[it[keep], jx2[keep], jy[keep]] = True
            edge |= bool(np.any(jy[keep] == 0)) or bool(np.any(jy[keep] == geom.n_y - 1))
        return edge

    raster_block(pts, 0.0)
    seed_occ = occ.copy()
    base = occ.sum()
    fwd = pts.copy()
    bwd = pts.copy()
    status = "max-iters"
    stale = 0
    rounds = 0
    for rounds in range(1, max_iters + 1):
        fwd = skew.spec.annulus_map(fwd)
        bwd = skew.spec.annulus_map(bwd, inverse=True)
        edge = raster_block(fwd - np.array([0.0, rounds * rho]), wrap01(rounds * rho))
        edge |= raster_block(bwd + np.array([0.0, rounds * rho]), wrap01(-rounds * rho))
        if edge:
            status = "window-exhausted"
            break
        total = occ.sum()
        if total == base:
            stale += 1
            if stale >= patience:
                status = "fixed-point"
                break
        else:
            stale = 0
            base = total
    return occ, seed_occ, status, rounds


def refine_envelopes(skew, fiber_points, geom, rounds=20_000):
    """Per-fiber, per-column vertical extremes of the block orbit union.

    Tracks min/max of the transported fiber cloud per x column as running
    scalars in exact real arithmetic, which makes tens of thousands of
    rounds affordable and closes the slow record tails that finite 3D
    rasterization leaves at the region's top and bottom edges. Returns
    (env_min, env_max) arrays of shape (n_t, n_x); columns never touched
    stay at +inf/-inf.
    """
    pts = np.asarray(fiber_points, dtype=float)
    t_centers = (np.arange(geom.n_t) + 0.5) * geom.h_t
    rho = skew.rho
    env_min = np.full((geom.n_t, geom.n_x), np.inf)
    env_max = np.full((geom.n_t, geom.n_x), -np.inf)

    def absorb(w, t_center):
        jx = geom.x_cell(w[:, 0])
        colmin = np.full(geom.n_x, np.inf)
        colmax = np.full(geom.n_x, -np.inf)
        np.minimum.at(colmin, jx, w[:, 1])
        np.maximum.at(colmax, jx, w[:, 1])
        u = t_centers - t_center
        u -= np.round(u)
        np.minimum(env_min, colmin[None, :] - u[:, None], out=env_min)
        np.maximum(env_max, colmax[None, :] - u[:, None], out=env_max)

    absorb(pts, 0.0)
    fwd = pts.copy()
    bwd = pts.copy()
    for n in range(1, int(rounds) + 1):
        fwd = skew.spec.annulus_map(fwd)
        bwd = skew.spec.annulus_map(bwd, inverse=True)
        shift = np.array([0.0, n * rho])
        absorb(fwd - shift, wrap01(n * rho))
        absorb(bwd + shift, wrap01(-n * rho))
    return env_min, env_max


def extend_to_envelopes(occ, geom, env_min, env_max):
    """Add the rows between the tracked envelopes to the occupancy.

    Valid when the region's fibers are vertically solid per column, which
    holds for maps acting column-wise on the annulus (rigid translations
    and circle-over-circle suspensions); the extension only restores the
    extreme rows that finite rasterization missed.
    """
    y_centers = geom.y_min + (np.arange(geom.n_y) + 0.5) * geom.h_y
    solid = ((y_centers[None, None, :] >= env_min[:, :, None])
             & (y_centers[None, None, :] <= env_max[:, :, None]))
    return occ | solid


def close_fibers(occ, x_halo=2, y_halo=1):
    """Morphological closing of each fiber, x-wrap aware.

    Regularizes the rasterized region at grid scale: single-column notches
    and pinholes left by finite orbit sampling are filled while flat edges
    stay put. Used as the grid-scale closure of the region before boundaries
    are extracted.
    """
    structure = np.ones((2 * x_halo + 1, 2 * y_halo + 1), dtype=bool)
    out = np.empty_like(occ)
    for it in range(occ.shape[0]):
        f = np.pad(occ[it], ((x_halo, x_halo), (y_halo, y_halo)), mode="wrap")
        f[:, :y_halo] = False
        f[:, -y_halo:] = False
        closed = ndimage.binary_closing(f, structure=structure)
        out[it] = closed[x_halo:-x_halo, y_halo:-y_halo]
    return out


def _union_pairs(parent, a, b):
    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in zip(a, b):
        ri, rj = find(int(i)), find(int(j))
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)


def label_mask(mask):
    """Label connected components under the product-metric grid topology.

    In-fiber cells use 4-connectivity with x wrap; cells in neighboring
    fibers (t wraps) are adjacent when their y intervals overlap after flow
    transport over one t cell width.
    """
    geom = mask.geom
    occ = mask.occ
    labels = np.zeros(occ.shape, dtype=np.int64)
    offset = 0
    for it in range(geom.n_t):
        lab, num = ndimage.label(occ[it], structure=_LABEL_STRUCTURE)
        lab = lab.astype(np.int64)
        lab[lab > 0] += offset
        labels[it] = lab
        offset += num
    parent = list(range(offset + 1))

    sigma = geom.fiber_shift_cells()
    shifts = sorted({int(np.floor(sigma)), int(np.ceil(sigma))})
    for it in range(geom.n_t):
        jt = (it + 1) % geom.n_t
        # x-wrap inside fiber it
        a = labels[it, 0, :]
        b = labels[it, -1, :]
        both = (a > 0) & (b > 0)
        _union_pairs(parent, a[both], b[both])
        # flow-transported adjacency to the next fiber: content at height row
        # iy here overlaps rows iy - shift there
        for sh in shifts:
            if sh >= 0:
                a = labels[it, :, sh:]
                b = labels[jt, :, : labels.shape[2] - sh]
            else:
                a = labels[it, :, :sh]
                b = labels[jt, :, -sh:]
            both = (a > 0) & (b > 0)
            _union_pairs(parent, a[both], b[both])

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    lut = np.array([find(i) for i in range(offset + 1)], dtype=np.int64)
    return lut[labels]


def component_of(mask, seed_occ):
    """Cells of the connected component(s) meeting the seed set."""
    labels = label_mask(mask)
    seed_labels = np.unique(labels[seed_occ & mask.occ])
    seed_labels = seed_labels[seed_labels > 0]
    return np.isin(labels, seed_labels) & mask.occ


def dilate_mask(occ):
    """One-cell box dilation; t and x wrap, y clamps."""
    out = occ.copy()
    for axis in (0, 1, 2):
        cur = out.copy()
        for d in (-1, 1):
            r = np.roll(cur, d, axis=axis)
            if axis == 2:  # y does not wrap
                if d == 1:
                    r[:, :, 0] = False
                else:
                    r[:, :, -1] = False
            out |= r
    return out


def invariance_defect(skew, mask, chunk=2_000_000):
    """One-sided check: F(mask) and F^-1(mask) inside mask dilated by a cell.

    Returns the number of source cells whose sampled image leaves the
    dilated mask, per direction.
    """
    geom = mask.geom
    dil = dilate_mask(mask.occ)
    idx = np.nonzero(mask.occ)
    bad = {"forward": 0, "backward": 0}
    for inverse, key in ((False, "forward"), (True, "backward")):
        for lo in range(0, idx[0].size, chunk):
            sl = slice(lo, lo + chunk)
            jt, jx, jy = _map_cells(skew, geom, idx[0][sl], idx[1][sl], idx[2][sl],
                                    inverse)
            inside = (jy >= 0) & (jy < geom.n_y)
            ok = np.zeros(jt.shape, dtype=bool)
            ok[inside] = dil[jt[inside], jx[inside], jy[inside]]
            npts = idx[0][sl].size
            per_cell = ok.reshape(5, npts).all(axis=0)
            bad[key] += int((~per_cell).sum())
    return bad


@dataclass
class FiberComponent:
    label: int
    size: int
    touches_bottom: bool
    touches_top: bool

    @property
    def unbounded(self):
        return self.touches_bottom or self.touches_top


def fiber_complement_components(mask, t):
    """Connected components of the fiber complement, with edge classification.

    Components are unbounded exactly when they touch the top or bottom
    window row. An empty fiber yields a single degenerate component flagged
    as touching both edges.
    """
    geom = mask.geom
    it = int(geom.t_cell(t))
    comp = ~mask.occ[it]
    lab, num = ndimage.label(comp, structure=_LABEL_STRUCTURE)
    if num == 0:
        return [], it
    # x wrap merges
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
    out = []
    for lbl in np.unique(lab[lab > 0]):
        cells = lab == lbl
        out.append(FiberComponent(
            label=int(lbl),
            size=int(cells.sum()),
            touches_bottom=bool(cells[:, 0].any()),
            touches_top=bool(cells[:, -1].any()),
        ))
    if mask.occ[it].sum() == 0:
        # degenerate: the whole fiber is one complement component
        out = [FiberComponent(label=out[0].label, size=out[0].size,
                              touches_bottom=True, touches_top=True)]
    return out, it
