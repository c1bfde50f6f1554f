"""Evaluable lifts of 2-torus homeomorphisms with explicit inverses.

Every map is a lift f = twist + displacement where the twist part is the
unimodular matrix [[1, k], [0, 1]] and the displacement is Z^2-periodic.
All evaluators are vectorized over a trailing axis of size 2 and every kind
ships an analytic inverse evaluator at construction.
"""

from __future__ import annotations

import math

import numpy as np

from .circle import CircleLift
from .util import wrap01

_CORNER_INSET = 0.25


def twist_matrix(k):
    return np.array([[1, k], [0, 1]], dtype=np.int64)


def apply_twist(k, z):
    """Apply [[1, k], [0, 1]] to points with trailing axis (x, y)."""
    z = np.asarray(z, dtype=float)
    out = z.copy()
    out[..., 0] = z[..., 0] + k * z[..., 1]
    return out


class TorusMapSpec:
    """Base class: a lift with twist k, a kind tag and analytic inverse."""

    kind = "abstract"
    k = 0

    def eval_lift(self, z):
        raise NotImplementedError

    def eval_inverse(self, z):
        raise NotImplementedError

    def displacement(self, z):
        return self.eval_lift(z) - apply_twist(self.k, np.asarray(z, dtype=float))

    def eval_torus(self, z):
        """Induced map on T^2 (representatives in [0,1))."""
        return wrap01(self.eval_lift(wrap01(np.asarray(z, dtype=float))))

    def eval_torus_inverse(self, z):
        return wrap01(self.eval_inverse(wrap01(np.asarray(z, dtype=float))))

    def annulus_map(self, z, inverse=False):
        """Induced map on the annulus T x R (second coordinate unrolled)."""
        z = np.asarray(z, dtype=float)
        w = z.copy()
        w[..., 0] = wrap01(z[..., 0])
        out = self.eval_inverse(w) if inverse else self.eval_lift(w)
        out[..., 0] = wrap01(out[..., 0])
        return out

    def to_definition(self):
        raise NotImplementedError


class RigidTranslation(TorusMapSpec):
    kind = "rigid"
    k = 0

    def __init__(self, a, b):
        self.offset = np.array([float(a), float(b)])

    def eval_lift(self, z):
        return np.asarray(z, dtype=float) + self.offset

    def eval_inverse(self, z):
        return np.asarray(z, dtype=float) - self.offset

    def to_definition(self):
        return {"kind": self.kind, "offset": self.offset.tolist()}


class DehnTwist(TorusMapSpec):
    """Pure twist z -> [[1, k], [0, 1]] z, zero displacement."""

    kind = "twist"

    def __init__(self, k):
        self.k = int(k)

    def eval_lift(self, z):
        return apply_twist(self.k, z)

    def eval_inverse(self, z):
        return apply_twist(-self.k, z)

    def to_definition(self):
        return {"kind": self.kind, "k": self.k}


class SuspensionMap(TorusMapSpec):
    """Discrete suspension of a circle homeomorphism over a circle base.

    In fundamental-domain coordinates (u, x) with u the base and x the fiber:
    (u, x) -> (base_lift(u) mod 1, fiber^m(x)) with m = floor(base_lift(u')),
    u' the representative of u in [0, 1). The lift commutes with Z^2 because
    m depends only on u mod 1.
    """

    kind = "suspension"
    k = 0

    def __init__(self, base_lift: CircleLift, fiber_lift: CircleLift):
        self.base = base_lift
        self.fiber = fiber_lift
        self._base_inv = base_lift.inverse()
        self._fiber_inv = fiber_lift.inverse()

    def _fiber_power(self, x, m):
        """Apply the fiber lift m(z)-fold, m an integer array (few values)."""
        x = np.array(x, dtype=float)
        m = np.asarray(m)
        sign = np.sign(m)
        count = np.abs(m)
        kmax = int(count.max()) if count.size else 0
        for step in range(kmax):
            fwd = (sign > 0) & (count > step)
            bwd = (sign < 0) & (count > step)
            if np.any(fwd):
                x[fwd] = self.fiber(x[fwd])
            if np.any(bwd):
                x[bwd] = self._fiber_inv(x[bwd])
        return x

    def _steps(self, u_frac):
        return np.floor(self.base(u_frac)).astype(np.int64)

    def eval_lift(self, z):
        shape = np.shape(np.asarray(z, dtype=float))
        z2 = np.atleast_2d(np.asarray(z, dtype=float))
        u, x = z2[..., 0], z2[..., 1]
        m = self._steps(wrap01(u))
        out = np.stack([self.base(u), self._fiber_power(x, m)], axis=-1)
        return out.reshape(shape)

    def eval_inverse(self, z):
        shape = np.shape(np.asarray(z, dtype=float))
        z2 = np.atleast_2d(np.asarray(z, dtype=float))
        up, xp = z2[..., 0], z2[..., 1]
        u = self._base_inv(up)
        m = self._steps(wrap01(u))
        out = np.stack([u, self._fiber_power(xp, -m)], axis=-1)
        return out.reshape(shape)

    def to_definition(self):
        return {
            "kind": self.kind,
            "base": self.base.to_definition(),
            "fiber": self.fiber.to_definition(),
        }


class DiskPush(TorusMapSpec):
    """Homeomorphism supported in a disk, translating center0 to center1.

    Realized as z + d * eta(|z - c| / R) with c the midpoint of the centers,
    d = center1 - center0 and eta a plateau bump (1 on [0, 1/2], affine to 0
    at 1). The map is the identity exactly outside the disk of radius R.
    """

    kind = "disk-push"
    k = 0

    def __init__(self, center0, center1, radius):
        c0 = np.asarray(center0, dtype=float)
        c1 = np.asarray(center1, dtype=float)
        radius = float(radius)
        if not (0.0 < radius < 0.25):
            raise ValueError("radius must be in (0, 1/4)")
        d = c1 - c0
        d = d - np.round(d)  # nearest torus representative of the push vector
        if np.linalg.norm(d) > 0.49 * radius:
            raise ValueError("centers too far apart for the radius")
        self.center0 = wrap01(c0)
        self.center1 = wrap01(c0 + d)
        self.push = d
        self.radius = radius
        self.midpoint = wrap01(c0 + 0.5 * d)

    def _eta(self, r):
        return np.clip(2.0 * (1.0 - r), 0.0, 1.0)

    def _rel(self, z):
        w = np.asarray(z, dtype=float) - self.midpoint
        return w - np.round(w)

    def eval_lift(self, z):
        z = np.asarray(z, dtype=float)
        w = self._rel(z)
        r = np.linalg.norm(w, axis=-1) / self.radius
        return z + self._eta(r)[..., None] * self.push

    def eval_inverse(self, z):
        z = np.asarray(z, dtype=float)
        w = self._rel(z)
        # points whose backward fiber cannot meet the support are fixed
        active = np.linalg.norm(w, axis=-1) <= self.radius + np.linalg.norm(self.push)
        out = z.copy()
        if not np.any(active):
            return out
        wa = w[active] if w.ndim > 1 else w
        # solve s = eta(|w - s*d| / R) by bisection; phi is strictly decreasing
        lo = np.zeros(wa.shape[:-1])
        hi = np.ones(wa.shape[:-1])
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            r = np.linalg.norm(wa - mid[..., None] * self.push, axis=-1) / self.radius
            phi = self._eta(r) - mid
            lo = np.where(phi > 0.0, mid, lo)
            hi = np.where(phi > 0.0, hi, mid)
        s = 0.5 * (lo + hi)
        if w.ndim > 1:
            out[active] = z[active] - s[..., None] * self.push
        else:
            out = z - s * self.push
        return out

    def to_definition(self):
        return {
            "kind": self.kind,
            "center0": self.center0.tolist(),
            "center1": self.center1.tolist(),
            "radius": self.radius,
        }


class ComposedMap(TorusMapSpec):
    """Composition chain, first element applied first."""

    kind = "composed"

    def __init__(self, chain):
        self.chain = list(chain)
        if not self.chain:
            raise ValueError("empty composition chain")
        self.k = sum(m.k for m in self.chain)

    def eval_lift(self, z):
        out = np.asarray(z, dtype=float)
        for m in self.chain:
            out = m.eval_lift(out)
        return out

    def eval_inverse(self, z):
        out = np.asarray(z, dtype=float)
        for m in reversed(self.chain):
            out = m.eval_inverse(out)
        return out

    def to_definition(self):
        return {"kind": self.kind, "maps": [m.to_definition() for m in self.chain]}


def eval_lift(spec, z):
    return spec.eval_lift(z)


def eval_inverse(spec, z):
    return spec.eval_inverse(z)


def make_disk_push(center0, center1, radius):
    c0 = np.asarray(center0, dtype=float)
    c1 = np.asarray(center1, dtype=float)
    d = (c1 - c0) - np.round(c1 - c0)
    if np.all(d == 0.0):
        return _IdentityPush(c0, radius)
    return DiskPush(center0, center1, radius)


class _IdentityPush(DiskPush):
    """Push with coincident centers: the identity."""

    def __init__(self, center, radius):
        radius = float(radius)
        if not (0.0 < radius < 0.25):
            raise ValueError("radius must be in (0, 1/4)")
        self.center0 = wrap01(np.asarray(center, dtype=float))
        self.center1 = self.center0
        self.push = np.zeros(2)
        self.radius = radius
        self.midpoint = self.center0

    def eval_lift(self, z):
        return np.asarray(z, dtype=float).copy()

    def eval_inverse(self, z):
        return np.asarray(z, dtype=float).copy()


# -- isotopy-class normalization ----------------------------------------------

def normalize_isotopy_class(A):
    """Conjugate a unipotent unimodular matrix into twist form.

    Returns (B, k) with B unimodular and B^-1 A B = [[1, k], [0, 1]], all in
    exact integer arithmetic. Rejects matrices that are not unipotent with
    determinant one.
    """
    M = [[int(A[0][0]), int(A[0][1])], [int(A[1][0]), int(A[1][1])]]
    det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    tr = M[0][0] + M[1][1]
    if det != 1 or tr != 2:
        raise ValueError("not unipotent: need det 1 and trace 2")
    if M[0][1] == 0 and M[1][0] == 0:
        # already a twist I_k with k possibly 0 (the identity)
        return ((1, 0), (0, 1)), M[0][1]
    if M[1][0] == 0:
        return ((1, 0), (0, 1)), M[0][1]
    # kernel of A - I is spanned by a primitive integer vector (a, c)
    p, q = M[0][0] - 1, M[0][1]
    if p == 0 and q == 0:
        p, q = M[1][0], M[1][1] - 1
    # row (p, q) annihilates (a, c): take (a, c) = (q, -p) made primitive
    a, c = q, -p
    g = math.gcd(abs(a), abs(c))
    a //= g
    c //= g
    if c < 0 or (c == 0 and a < 0):
        a, c = -a, -c
    # Bezout completion: (b, d) with a*d - b*c = 1, minimizing |b| + |d|
    g, x, y = _ext_gcd(a, c)
    assert g == 1
    b0, d0 = -y, x
    best = None
    t0 = 0
    if a * a + c * c > 0:
        t0 = round((-(b0 * a + d0 * c)) / (a * a + c * c))
    for t in range(t0 - 2, t0 + 3):
        b, d = b0 + t * a, d0 + t * c
        key = (abs(b) + abs(d), abs(b))
        if best is None or key < best[0]:
            best = (key, b, d)
    _, b, d = best
    B = ((a, b), (c, d))
    k = _conjugated_twist(M, B)
    return B, k


def _ext_gcd(a, b):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def _conjugated_twist(M, B):
    (a, b), (c, d) = B
    inv = ((d, -b), (-c, a))  # det B = 1
    AB = _mat_mul(M, B)
    C = _mat_mul(inv, AB)
    if C[0][0] != 1 or C[1][1] != 1 or C[1][0] != 0:
        raise AssertionError("conjugation did not reach twist form")
    return C[0][1]


def _mat_mul(P, Q):
    return (
        (P[0][0] * Q[0][0] + P[0][1] * Q[1][0], P[0][0] * Q[0][1] + P[0][1] * Q[1][1]),
        (P[1][0] * Q[0][0] + P[1][1] * Q[1][0], P[1][0] * Q[0][1] + P[1][1] * Q[1][1]),
    )
