"""Shared numeric helpers: circle arithmetic, metrics, deterministic sampling."""

from __future__ import annotations

import math

import numpy as np

# Fixed double-precision irrational constants, recorded verbatim in config output.
GOLDEN_MEAN = (math.sqrt(5.0) - 1.0) / 2.0  # 0.6180339887498949
SQRT2_MINUS_1 = math.sqrt(2.0) - 1.0  # 0.41421356237309515

# R2 low-discrepancy sequence generator (plastic constant).
_PLASTIC = 1.324717957244746


def wrap01(x):
    """Reduce mod 1 with representatives in [0, 1), ties toward 0.

    Guards against the float artifact where tiny negatives reduce to 1.0.
    """
    r = np.asarray(x, dtype=float) % 1.0
    r = np.where(r >= 1.0, 0.0, r)
    if np.ndim(x) == 0:
        return float(r)
    return r


def circle_dist(a, b):
    """Distance on T = R/Z."""
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) % 1.0
    out = np.minimum(d, 1.0 - d)
    if np.ndim(out) == 0:
        return float(out)
    return out


def torus_dist(z, w):
    """Euclidean distance on T^2; z, w arrays with trailing axis of size 2."""
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    d = np.abs(z - w) % 1.0
    d = np.minimum(d, 1.0 - d)
    out = np.sqrt(np.sum(d * d, axis=-1))
    if out.ndim == 0:
        return float(out)
    return out


def annulus_dist(z, w):
    """Distance on the open annulus T x R; trailing axis (x, ytil)."""
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    dx = circle_dist(z[..., 0], w[..., 0])
    dy = z[..., 1] - w[..., 1]
    out = np.hypot(dx, dy)
    if out.ndim == 0:
        return float(out)
    return out


def skew_dist(s, r):
    """Distance on T x A, the sum d_T(t,t') + d_A(z,z'); trailing axis (t, x, ytil)."""
    s = np.asarray(s, dtype=float)
    r = np.asarray(r, dtype=float)
    out = circle_dist(s[..., 0], r[..., 0]) + annulus_dist(s[..., 1:], r[..., 1:])
    if np.ndim(out) == 0:
        return float(out)
    return out


def lattice_points_1d(count, seed=0, jitter=0.25):
    """Deterministic low-discrepancy points on [0,1): golden lattice + seeded jitter."""
    i = np.arange(count, dtype=float)
    base = (0.5 + i * GOLDEN_MEAN) % 1.0
    rng = np.random.default_rng(seed)
    return (base + jitter * rng.uniform(-1.0, 1.0, count) / max(count, 1)) % 1.0


def lattice_points_2d(count, seed=0, jitter=0.25):
    """Deterministic low-discrepancy points on [0,1)^2 (R2 sequence + seeded jitter)."""
    i = np.arange(count, dtype=float)[:, None]
    alphas = np.array([1.0 / _PLASTIC, 1.0 / _PLASTIC**2])
    base = (0.5 + i * alphas) % 1.0
    rng = np.random.default_rng(seed)
    return (base + jitter * rng.uniform(-1.0, 1.0, (count, 2)) / max(count, 1)) % 1.0


def convex_hull(points):
    """Convex hull of 2D points by the monotone chain, deterministic ordering.

    Returns hull vertices in counterclockwise order starting from the
    lexicographically smallest point. Degenerate inputs return the sorted
    unique points.
    """
    pts = np.asarray(points, dtype=float)
    uniq = sorted(set(map(tuple, pts.tolist())))
    if len(uniq) <= 2:
        return np.array(uniq, dtype=float).reshape(-1, 2)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in uniq:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(uniq):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1], dtype=float)
