"""Evaluable lifts of orientation-preserving circle homeomorphisms.

A lift is a strictly increasing real function commuting with x -> x + 1.
Three kinds are supported: rigid translations, piecewise-affine lifts given
by a breakpoint table on [0, 1), and truncated Denjoy-type constructions
obtained by blowing up finitely many orbit points of a rigid rotation into
gaps that are transported affinely one onto the next.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .util import wrap01

KIND_RIGID = "rigid"
KIND_PWA = "piecewise-affine"
KIND_DENJOY = "denjoy-truncated"


@dataclass(frozen=True)
class DenjoyGapTable:
    """Blow-up data: one gap per orbit index n in [-N, N].

    Positions are on the renormalized circle (total length 1). ``a``/``b`` are
    the left/right gap endpoints, ``base_angle`` the angle frac(n*alpha) the
    gap collapses to, ``length`` the raw inserted length before renormalizing
    by ``normalizer`` = 1 + sum(lengths).
    """

    indices: np.ndarray
    base_angle: np.ndarray
    length: np.ndarray
    a: np.ndarray
    b: np.ndarray
    normalizer: float
    truncation_tol: float

    def gap(self, n):
        """Endpoints (a_n, b_n) of the gap with orbit index n."""
        j = int(np.nonzero(self.indices == n)[0][0])
        return float(self.a[j]), float(self.b[j])

    def to_dict(self):
        return {
            "indices": self.indices.tolist(),
            "base_angle": self.base_angle.tolist(),
            "length": self.length.tolist(),
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "normalizer": self.normalizer,
            "truncation_tol": self.truncation_tol,
        }


class CircleLift:
    """Monotone degree-1 lift, evaluable at real arguments (vectorized).

    Immutable after construction; safe for concurrent evaluation.
    """

    def __init__(self, kind, *, alpha=0.0, bx=None, by=None, gap_table=None,
                 target_alpha=None):
        self.kind = kind
        self.alpha = float(alpha)
        self.gap_table = gap_table
        self.target_alpha = target_alpha
        if kind == KIND_RIGID:
            self.bx = None
            self.by = None
            self._bx_list = None
        else:
            bx = np.asarray(bx, dtype=float)
            by = np.asarray(by, dtype=float)
            _validate_pwa(bx, by)
            self.bx = bx
            self.by = by
            self._bx_list = bx.tolist()  # fast scalar bisect path

    # -- constructors ------------------------------------------------------

    @classmethod
    def rigid(cls, alpha):
        return cls(KIND_RIGID, alpha=float(alpha))

    @classmethod
    def piecewise_affine(cls, pairs):
        """From (x, value) pairs on [0,1); the table is sorted and closed at 0."""
        bx, by = _pwa_from_pairs(pairs)
        return cls(KIND_PWA, bx=bx, by=by)

    # -- evaluation --------------------------------------------------------

    def __call__(self, x):
        if self.kind == KIND_RIGID:
            out = np.asarray(x, dtype=float) + self.alpha
            return float(out) if np.ndim(x) == 0 else out
        return _pwa_eval(self.bx, self.by, x)

    def eval_scalar(self, x):
        """Scalar fast path used by long orbit loops."""
        if self.kind == KIND_RIGID:
            return x + self.alpha
        n = math.floor(x)
        u = x - n
        if u >= 1.0:  # x - floor(x) can round up to 1.0 for tiny negatives
            u = 0.0
            n += 1
        j = bisect.bisect_right(self._bx_list, u) - 1
        bx, by = self.bx, self.by
        if j + 1 < len(bx):
            x1, y1 = bx[j + 1], by[j + 1]
        else:
            x1, y1 = bx[0] + 1.0, by[0] + 1.0
        x0, y0 = bx[j], by[j]
        return n + y0 + (u - x0) * (y1 - y0) / (x1 - x0)

    def inverse(self):
        """Lift of the inverse homeomorphism (analytic, no root finding)."""
        if self.kind == KIND_RIGID:
            return CircleLift.rigid(-self.alpha)
        shift = np.floor(self.by)
        pairs = list(zip(wrap01(self.by), self.bx - shift))
        inv = CircleLift.piecewise_affine(pairs)
        return inv

    def to_definition(self):
        if self.kind == KIND_RIGID:
            return {"kind": KIND_RIGID, "alpha": self.alpha}
        if self.kind == KIND_DENJOY:
            gt = self.gap_table
            return {
                "kind": KIND_DENJOY,
                "alpha": self.target_alpha,
                "N": int(gt.indices.max()),
                "lengths": gt.length.tolist(),  # indexed by n + N
                "truncation_tol": gt.truncation_tol,
            }
        return {"kind": KIND_PWA,
                "breaks": [[float(x), float(v)] for x, v in zip(self.bx, self.by)]}

    @property
    def truncation_tol(self):
        if self.gap_table is not None:
            return self.gap_table.truncation_tol
        return 0.0


def eval_lift(lift, x):
    """Evaluate a lift at x (array or scalar)."""
    return lift(x)


def _validate_pwa(bx, by):
    if bx.ndim != 1 or bx.shape != by.shape or bx.size < 1:
        raise ValueError("breakpoint table must be two equal-length 1D arrays")
    if bx[0] != 0.0:
        raise ValueError("breakpoint table must start at x = 0")
    if np.any(bx < 0.0) or np.any(bx >= 1.0):
        raise ValueError("breakpoints must lie in [0, 1)")
    if np.any(np.diff(bx) <= 0.0):
        raise ValueError("breakpoints must be strictly increasing")
    if np.any(np.diff(by) <= 0.0) or not (by[-1] < by[0] + 1.0):
        raise ValueError("breakpoint values must be strictly increasing with winding 1")


def _pwa_from_pairs(pairs):
    pts = sorted((float(x), float(v)) for x, v in pairs)
    bx = np.array([p[0] for p in pts])
    by = np.array([p[1] for p in pts])
    if bx.size == 0:
        raise ValueError("empty breakpoint table")
    if np.any(np.diff(bx) <= 0.0):
        raise ValueError("duplicate breakpoints")
    if bx[0] != 0.0:
        # close the table at 0 using the wrap segment from (bx[-1]-1, by[-1]-1)
        x0, y0 = bx[-1] - 1.0, by[-1] - 1.0
        t = (0.0 - x0) / (bx[0] - x0)
        v0 = y0 + t * (by[0] - y0)
        bx = np.concatenate([[0.0], bx])
        by = np.concatenate([[v0], by])
    return bx, by


def _pwa_eval(bx, by, x):
    xa = np.asarray(x, dtype=float)
    n = np.floor(xa)
    u = xa - n
    bump = u >= 1.0  # x - floor(x) can round up to 1.0 for tiny negatives
    u = np.where(bump, 0.0, u)
    n = n + bump
    j = np.searchsorted(bx, u, side="right") - 1
    last = j + 1 >= bx.size
    x0 = bx[j]
    y0 = by[j]
    x1 = np.where(last, bx[0] + 1.0, bx[np.minimum(j + 1, bx.size - 1)])
    y1 = np.where(last, by[0] + 1.0, by[np.minimum(j + 1, bx.size - 1)])
    out = n + y0 + (u - x0) * (y1 - y0) / (x1 - x0)
    if np.ndim(x) == 0:
        return float(out)
    return out


# -- rotation number ---------------------------------------------------------

def rotation_number(lift, x0=0.0, n=10_000):
    """Estimate the rotation number from a length-n orbit segment.

    Returns (estimate, error_bound) with estimate = (g^n(x0) - x0)/n. The
    classical displacement bound puts the true rotation number within 1/n of
    the estimate; the bound adds the accumulated evaluation roundoff.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    if lift.kind == KIND_RIGID:
        # closed form: the orbit displacement is exactly n*alpha
        est = lift.alpha
        return est, 1.0 / n + 1e-15
    x = float(x0)
    for _ in range(n):
        x = lift.eval_scalar(x)
    est = (x - float(x0)) / n
    return float(est), 1.0 / n + n * 1e-15


# -- truncated Denjoy construction -------------------------------------------

def geometric_gap_schedule(total_mass=0.3, ratio=0.5):
    """Schedule l_n = c * ratio^|n| with c fixed by the total inserted mass.

    The mass is the untruncated sum over all n, c * (1 + ratio)/(1 - ratio).
    """
    if not (0.0 < total_mass < 1.0):
        raise ValueError("total mass must be in (0, 1)")
    c = total_mass * (1.0 - ratio) / (1.0 + ratio)
    return lambda n: c * ratio ** abs(n)


def build_denjoy(alpha, gap_schedule=None, N=40):
    """Blow up the orbit points frac(n*alpha), |n| <= N, into gaps.

    The returned lift transports gap n affinely onto gap n+1 for n < N; on
    the arcs between materialized gaps it is the affine order completion of
    the blown-up rotation, within the documented truncation tolerance
    (the untruncated schedule mass beyond |N|) of the ideal construction.
    """
    N = int(N)
    if N < 1:
        raise ValueError("N must be >= 1")
    if gap_schedule is None:
        gap_schedule = geometric_gap_schedule()
    idx = np.arange(-N, N + 1)
    lengths = np.array([float(gap_schedule(int(n))) for n in idx])
    if np.any(lengths <= 0.0):
        raise ValueError("gap lengths must be positive")
    S = float(lengths.sum())
    if S >= 1.0:
        raise ValueError("gap schedule mass must be < 1")
    theta = wrap01(idx * float(alpha))
    if np.min(np.diff(np.sort(theta))) <= 1e-9:
        raise ValueError("orbit points too close; reduce N or change alpha")

    # left endpoints: base angle plus the mass inserted strictly below it
    order = np.argsort(theta)
    rank = np.empty_like(order)
    rank[order] = np.arange(idx.size)
    csum = np.concatenate([[0.0], np.cumsum(lengths[order])])
    a = (theta + csum[rank]) / (1.0 + S)
    b = a + lengths / (1.0 + S)

    # truncation tolerance: untruncated tail of the same schedule, estimated
    # by continuing the supplied schedule for a long stretch
    tail = sum(float(gap_schedule(int(n))) + float(gap_schedule(int(-n)))
               for n in range(N + 1, N + 200))
    table = DenjoyGapTable(indices=idx, base_angle=theta, length=lengths,
                           a=a, b=b, normalizer=1.0 + S, truncation_tol=tail)

    # breakpoint table: endpoints of gaps -N..N-1 mapped onto gaps -N+1..N;
    # gap N carries no constraint and is absorbed by its free arc
    pos = {}
    for j, n in enumerate(idx):
        if n < N:
            jn = j + 1  # orbit index n+1 is at slot j+1 (idx is sorted by n)
            pos[a[j]] = a[jn]
            pos[b[j]] = b[jn]
    xs = np.array(sorted(pos))
    vals = np.array([pos[x] for x in xs])
    # unwrap image positions onto a single increasing lift branch
    lifted = vals.copy()
    wind = 0.0
    for k in range(1, lifted.size):
        if vals[k] <= vals[k - 1]:
            wind += 1.0
        lifted[k] = vals[k] + wind
    bx, by = _pwa_from_pairs(zip(xs, lifted))
    lift = CircleLift(KIND_DENJOY, bx=bx, by=by, gap_table=table,
                      target_alpha=float(alpha))

    # construction-time checks: affine transport of every constrained gap
    for j, n in enumerate(idx):
        if n < N:
            img_a = wrap01(lift(a[j]))
            img_b = wrap01(lift(b[j]))
            if abs(img_a - a[j + 1]) > 1e-10 or abs(img_b - b[j + 1]) > 1e-10:
                raise AssertionError("gap transport endpoints inconsistent")
    return lift


class DenjoySemiconjugacy:
    """Monotone circle map collapsing each materialized gap to its base angle."""

    def __init__(self, gap_table):
        self.table = gap_table
        S = gap_table.normalizer - 1.0
        order = np.argsort(gap_table.a)
        self._a_un = gap_table.a[order] * gap_table.normalizer
        self._len = gap_table.length[order]
        self._cum = np.concatenate([[0.0], np.cumsum(self._len)])
        self._S = S

    def __call__(self, y):
        u = np.asarray(wrap01(y), dtype=float) * self.table.normalizer
        j = np.searchsorted(self._a_un, u, side="right")
        j0 = np.maximum(j - 1, 0)
        # inserted mass strictly below u: all gaps before j-1, plus the part
        # of gap j-1 below u (the full length once u has passed it)
        partial = np.minimum(np.maximum(u - self._a_un[j0], 0.0), self._len[j0])
        mass = self._cum[j0] + np.where(j > 0, partial, 0.0)
        out = wrap01(u - mass)
        if np.ndim(y) == 0:
            return float(out)
        return out

    @property
    def truncation_tol(self):
        return self.table.truncation_tol


def denjoy_semiconjugacy(lift):
    """Factor map onto the target rotation for a denjoy-truncated lift."""
    if lift.kind != KIND_DENJOY:
        raise ValueError("semiconjugacy is defined for denjoy-truncated lifts")
    return DenjoySemiconjugacy(lift.gap_table)
