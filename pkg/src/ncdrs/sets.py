"""Euclidean projections onto the compact sets of the catalog.

``project`` is the single-valued selection used by the algorithms.  Ties are
broken towards the lexicographically smallest candidate: Boolean ties go to 0,
Sign ties to -1, FinitePoints and CardinalityBox ties to the lowest index, and
the Sphere maps the origin to ``r * e_1``.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .model import (
    Boolean,
    Box,
    CardinalityBox,
    EnumerationTooLarge,
    EnumerationUnsupported,
    FinitePoints,
    HullUnsupported,
    Sign,
    Sphere,
    ValidationError,
    _set_violations,
    as_vector,
)

TIE_TOL = 1e-12
HULL_TOL = 1e-10
HULL_MAX_ITER = 10_000
MAX_ENUMERATION = 2**20


class NonconvexSet:
    def __init__(self, descriptor, dimension: int):
        problems = _set_violations(descriptor, dimension)
        if problems:
            raise ValidationError(problems)
        self.descriptor = descriptor
        self.dimension = int(dimension)
        if isinstance(descriptor, Box):
            self._lo = np.broadcast_to(descriptor.lo, self.dimension).astype(float)
            self._hi = np.broadcast_to(descriptor.hi, self.dimension).astype(float)

    def __repr__(self):
        return f"NonconvexSet({type(self.descriptor).__name__}, n={self.dimension})"

    @property
    def kind(self) -> str:
        return self.descriptor.kind

    @property
    def is_convex(self) -> bool:
        d = self.descriptor
        if isinstance(d, Box):
            return True
        if isinstance(d, FinitePoints):
            return len(d.points) == 1
        if isinstance(d, CardinalityBox):
            return d.k >= self.dimension
        return False

    @property
    def supports_hull(self) -> bool:
        return not isinstance(self.descriptor, CardinalityBox) or self.is_convex

    # ------------------------------------------------------------------

    def project(self, v) -> np.ndarray:
        v = as_vector(v, self.dimension)
        d = self.descriptor
        if isinstance(d, Boolean):
            return (v > 0.5).astype(float)
        if isinstance(d, Sign):
            return np.where(v > 0, 1.0, -1.0)
        if isinstance(d, FinitePoints):
            dist = ((d.points - v) ** 2).sum(axis=1)
            return d.points[int(np.argmin(dist))].copy()
        if isinstance(d, CardinalityBox):
            c = np.clip(v, -d.M, d.M)
            k = min(int(d.k), self.dimension)
            keep = np.argsort(-np.abs(v), kind="stable")[:k]
            out = np.zeros_like(v)
            out[keep] = c[keep]
            return out
        if isinstance(d, Sphere):
            nv = np.linalg.norm(v)
            if nv == 0.0:
                out = np.zeros_like(v)
                out[0] = d.r
                return out
            # already on the sphere up to rounding: keep v so that projection is idempotent
            if abs(nv - d.r) <= 4 * np.finfo(float).eps * d.r:
                return v.copy()
            return d.r * v / nv
        if isinstance(d, Box):
            return np.clip(v, self._lo, self._hi)
        raise TypeError(f"unknown set {d!r}")

    def project_all(self, v) -> list:
        """Every nearest point of the set to ``v`` (squared-distance ties within 1e-12)."""
        v = as_vector(v, self.dimension)
        d = self.descriptor
        if isinstance(d, (Boolean, Sign)):
            lo, hi = (0.0, 1.0) if isinstance(d, Boolean) else (-1.0, 1.0)
            # squared distance to hi minus squared distance to lo, per coordinate
            gap = (v - hi) ** 2 - (v - lo) ** 2
            tied = np.flatnonzero(np.abs(gap) <= TIE_TOL)
            if 2 ** len(tied) > MAX_ENUMERATION:
                raise EnumerationTooLarge(f"{2 ** len(tied)} tied projections")
            base = self.project(v)
            out = []
            for bits in itertools.product((lo, hi), repeat=len(tied)):
                p = base.copy()
                p[tied] = bits
                out.append(p)
            return out
        if isinstance(d, FinitePoints):
            dist = ((d.points - v) ** 2).sum(axis=1)
            return [p.copy() for p in d.points[dist <= dist.min() + TIE_TOL]]
        if isinstance(d, CardinalityBox):
            return self._cardinality_all(v)
        if isinstance(d, Sphere):
            if not np.any(v):
                raise EnumerationUnsupported("every point of the sphere is nearest to the origin")
            return [self.project(v)]
        if isinstance(d, Box):
            return [self.project(v)]
        raise TypeError(f"unknown set {d!r}")

    def _cardinality_all(self, v: np.ndarray) -> list:
        d = self.descriptor
        n = self.dimension
        k = min(int(d.k), n)
        c = np.clip(v, -d.M, d.M)
        # distance saved by keeping coordinate i instead of zeroing it
        gain = v**2 - (v - c) ** 2
        order = np.argsort(-gain, kind="stable")
        if k == 0 or k == n:
            return [self.project(v)]
        threshold = gain[order[k - 1]]
        sure = [i for i in range(n) if gain[i] > threshold + TIE_TOL]
        tied = [i for i in range(n) if abs(gain[i] - threshold) <= TIE_TOL]
        need = k - len(sure)
        if math.comb(len(tied), need) > MAX_ENUMERATION:
            raise EnumerationTooLarge("too many tied supports")
        seen = set()
        out = []
        for extra in itertools.combinations(tied, need):
            p = np.zeros(n)
            idx = list(sure) + list(extra)
            p[idx] = c[idx]
            key = p.tobytes()
            if key not in seen:
                seen.add(key)
                out.append(p)
        return out

    def project_hull(self, v) -> np.ndarray:
        """Projection onto the convex hull of the set."""
        v = as_vector(v, self.dimension)
        d = self.descriptor
        if isinstance(d, Boolean):
            return np.clip(v, 0.0, 1.0)
        if isinstance(d, Sign):
            return np.clip(v, -1.0, 1.0)
        if isinstance(d, Sphere):
            nv = np.linalg.norm(v)
            return v * (d.r / nv) if nv > d.r else v.copy()
        if isinstance(d, Box):
            return np.clip(v, self._lo, self._hi)
        if isinstance(d, FinitePoints):
            return v + min_norm_point(d.points - v)[0]
        if isinstance(d, CardinalityBox):
            if self.is_convex:
                return np.clip(v, -d.M, d.M)
            raise HullUnsupported("projection onto the hull of a cardinality box is not provided")
        raise TypeError(f"unknown set {d!r}")

    def contains(self, v, tol: float = 0.0) -> bool:
        if tol < 0:
            raise ValueError("tol must be nonnegative")
        v = as_vector(v, self.dimension)
        return bool(np.linalg.norm(self.project(v) - v) <= tol)

    def hull_contains(self, v, tol: float = 1e-9) -> bool:
        v = as_vector(v, self.dimension)
        return bool(np.linalg.norm(self.project_hull(v) - v) <= tol)

    def bounding_box(self) -> tuple:
        n = self.dimension
        d = self.descriptor
        if isinstance(d, Boolean):
            return np.zeros(n), np.ones(n)
        if isinstance(d, Sign):
            return -np.ones(n), np.ones(n)
        if isinstance(d, FinitePoints):
            return d.points.min(axis=0), d.points.max(axis=0)
        if isinstance(d, CardinalityBox):
            return -d.M * np.ones(n), d.M * np.ones(n)
        if isinstance(d, Sphere):
            return -d.r * np.ones(n), d.r * np.ones(n)
        return self._lo.copy(), self._hi.copy()

    def enumerate_points(self) -> np.ndarray:
        d = self.descriptor
        n = self.dimension
        if isinstance(d, FinitePoints):
            return d.points.copy()
        if isinstance(d, (Boolean, Sign)):
            if 2**n > MAX_ENUMERATION:
                raise EnumerationTooLarge(f"2**{n} vertices")
            vals = (0.0, 1.0) if isinstance(d, Boolean) else (-1.0, 1.0)
            return np.array(list(itertools.product(vals, repeat=n)))
        raise EnumerationUnsupported(f"{d.kind} sets are not finite")


def _affine_minimizer(Q: np.ndarray) -> np.ndarray:
    """Weights of the min-norm point of the affine hull of the rows of ``Q``."""
    m = len(Q)
    K = np.zeros((m + 1, m + 1))
    K[:m, :m] = Q @ Q.T
    K[:m, m] = 1.0
    K[m, :m] = 1.0
    rhs = np.zeros(m + 1)
    rhs[m] = 1.0
    sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    return sol[:m]


def min_norm_point(Q, tol: float = HULL_TOL, max_iter: int = HULL_MAX_ITER) -> tuple:
    """Wolfe's algorithm: nearest point to the origin in ``conv(rows of Q)``.

    Returns ``(point, weights)`` with ``weights`` over the rows of ``Q``.
    """
    Q = np.asarray(Q, dtype=float)
    m = len(Q)
    sq = (Q**2).sum(axis=1)
    scale = max(1.0, float(sq.max()))
    S = [int(np.argmin(sq))]
    w = np.array([1.0])
    x = Q[S[0]].copy()
    for _ in range(max_iter):
        dots = Q @ x
        j = int(np.argmin(dots))
        # x is optimal when no vertex improves the supporting hyperplane
        if x @ x - dots[j] <= tol * scale or j in S:
            break
        S.append(j)
        w = np.append(w, 0.0)
        for _ in range(m + 1):
            alpha = _affine_minimizer(Q[S])
            if np.all(alpha > 1e-14):
                w = alpha
                break
            neg = alpha <= 1e-14
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(neg, w / (w - alpha), np.inf)
            theta = float(min(1.0, np.min(ratios[neg])))
            w = theta * alpha + (1.0 - theta) * w
            keep = w > 1e-14
            keep[int(np.argmax(w))] = True
            S = [s for s, k in zip(S, keep) if k]
            w = w[keep]
            w = w / w.sum()
        x = w @ Q[S]
    weights = np.zeros(m)
    weights[S] = w
    return x, weights


def make_set(descriptor, dimension: int) -> NonconvexSet:
    return NonconvexSet(descriptor, dimension)


def project(cset: NonconvexSet, v) -> np.ndarray:
    return cset.project(v)


def project_all(cset: NonconvexSet, v) -> list:
    return cset.project_all(v)


def project_hull(cset: NonconvexSet, v) -> np.ndarray:
    return cset.project_hull(v)


def contains(cset: NonconvexSet, v, tol: float = 0.0) -> bool:
    return cset.contains(v, tol)
