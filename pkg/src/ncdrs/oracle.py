"""Ground truth by brute force.

Nothing here imports :mod:`ncdrs.prox` or :mod:`ncdrs.sets`; the routines are
written from the definitions so they can be used to check those modules.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import (
    L1,
    Affine,
    Boolean,
    Box,
    CardinalityBox,
    EnumerationTooLarge,
    FinitePoints,
    LeastSquares,
    OracleUnavailable,
    Quadratic,
    Sign,
    Zero,
    as_vector,
    evaluate_cost,
)

MAX_DIM = 20
MAX_K = 3
ARGMIN_TOL = 1e-12
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class EnumerableSet:
    points: np.ndarray


def enumerable(set_desc, n: int) -> EnumerableSet:
    if isinstance(set_desc, FinitePoints):
        return EnumerableSet(np.asarray(set_desc.points, dtype=float))
    if isinstance(set_desc, (Boolean, Sign)):
        if n > MAX_DIM:
            raise EnumerationTooLarge(f"2**{n} vertices exceeds the n <= {MAX_DIM} cap")
        vals = [0.0, 1.0] if isinstance(set_desc, Boolean) else [-1.0, 1.0]
        grids = np.meshgrid(*([vals] * n), indexing="ij")
        return EnumerableSet(np.stack([g.ravel() for g in grids], axis=1))
    raise OracleUnavailable(f"{set_desc.kind} set has no finite enumeration")


def _cost_values(cost, pts: np.ndarray) -> np.ndarray:
    if isinstance(cost, Zero):
        return np.zeros(len(pts))
    if isinstance(cost, Affine):
        return pts @ cost.q + cost.c
    if isinstance(cost, Quadratic):
        return 0.5 * np.einsum("ij,jk,ik->i", pts, cost.P, pts) + pts @ cost.q + cost.c
    if isinstance(cost, LeastSquares):
        r = pts @ cost.A.T - cost.b
        return 0.5 * (r**2).sum(axis=1)
    if isinstance(cost, L1):
        return cost.lam * np.abs(pts).sum(axis=1)
    raise TypeError(f"unknown cost {cost!r}")


def brute_force_argmin(cost, set_desc, n: int) -> tuple:
    """Exhaustive minimum of ``cost`` over the set.

    Returns ``(minimizers, value)``.  For a cardinality box the minimizers are
    one representative per optimal support, found by a convex solve over the
    box restricted to that support.
    """
    if isinstance(set_desc, CardinalityBox):
        return _cardinality_argmin(cost, set_desc, n)
    pts = enumerable(set_desc, n).points
    vals = np.empty(len(pts))
    # chunked so n = 20 stays within memory
    for start in range(0, len(pts), 65536):
        vals[start : start + 65536] = _cost_values(cost, pts[start : start + 65536])
    best = float(vals.min())
    idx = np.flatnonzero(vals <= best + ARGMIN_TOL)
    # exact values of the winners via the scalar evaluator
    exact = [evaluate_cost(cost, pts[i]) for i in idx]
    best = min(exact)
    return [pts[i].copy() for i, e in zip(idx, exact) if e <= best + ARGMIN_TOL], best


def _cardinality_argmin(cost, cset: CardinalityBox, n: int) -> tuple:
    if n > MAX_DIM or cset.k > MAX_K:
        raise EnumerationTooLarge(f"support enumeration capped at n <= {MAX_DIM}, k <= {MAX_K}")
    k = min(int(cset.k), n)
    results = []
    for support in itertools.combinations(range(n), k):
        lo = np.zeros(n)
        hi = np.zeros(n)
        lo[list(support)] = -cset.M
        hi[list(support)] = cset.M
        x, val = reference_convex_solve(cost, Box(lo, hi), n)
        results.append((val, x))
    best = min(v for v, _ in results)
    tol = 1e-8 * max(1.0, abs(best))
    return [x for v, x in results if v <= best + tol], best


# --------------------------------------------------------------------------
# prox by direct minimization


def _smooth_grad(cost, x: np.ndarray) -> np.ndarray:
    if isinstance(cost, Zero):
        return np.zeros_like(x)
    if isinstance(cost, Affine):
        return cost.q.copy()
    if isinstance(cost, Quadratic):
        return 0.5 * (cost.P + cost.P.T) @ x + cost.q
    if isinstance(cost, LeastSquares):
        return cost.A.T @ (cost.A @ x - cost.b)
    raise TypeError(f"{type(cost).__name__} is not smooth")


def _golden_section(phi, a: float, b: float, tol: float = 1e-12) -> float:
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = phi(c), phi(d)
    while b - a > tol * max(1.0, abs(a) + abs(b)):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = phi(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = phi(d)
    return 0.5 * (a + b)


def numeric_prox(cost, gamma: float, v, max_iter: int = 200_000) -> np.ndarray:
    """Minimize ``f(y) + ||y - v||^2 / (2 gamma)`` numerically.

    Separable L1 costs use a golden-section search per coordinate on
    ``[v_i - 10, v_i + 10]``; smooth costs use gradient descent with
    backtracking, started at ``v``.
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    v = as_vector(v)
    if isinstance(cost, L1):
        out = np.empty_like(v)
        for i, vi in enumerate(v):
            phi = lambda y, vi=vi: cost.lam * abs(y) + (y - vi) ** 2 / (2 * gamma)
            out[i] = _golden_section(phi, vi - 10.0, vi + 10.0)
        return out

    def grad(y):
        return _smooth_grad(cost, y) + (y - v) / gamma

    # the smooth catalog costs are quadratic, so a short enough step always
    # shrinks the gradient; backtracking on its norm avoids the rounding floor
    # of function-value tests
    y = v.copy()
    step = gamma
    g = grad(y)
    gn = float(np.linalg.norm(g))
    for _ in range(max_iter):
        if gn <= 1e-13 * max(1.0, float(np.abs(y).max())):
            break
        while step > 1e-20:
            cand = y - step * g
            gc = grad(cand)
            gcn = float(np.linalg.norm(gc))
            if gcn < gn:
                break
            step *= 0.5
        else:
            break
        y, g, gn = cand, gc, gcn
        step *= 2.0
    return y


# --------------------------------------------------------------------------
# convex reference solves


def _lipschitz(cost) -> float:
    if isinstance(cost, Quadratic):
        return float(np.linalg.eigvalsh(0.5 * (cost.P + cost.P.T)).max())
    if isinstance(cost, LeastSquares):
        return float(np.linalg.norm(cost.A, 2) ** 2)
    return 0.0


def _simplex_projection(w: np.ndarray) -> np.ndarray:
    # sort-based Euclidean projection onto the probability simplex
    u = np.sort(w)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, len(w) + 1)
    rho = np.nonzero(u - css / ind > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(w - theta, 0.0)


def reference_convex_solve(cost, set_desc, n: int, tol: float = 1e-8, max_iter: int = 500_000) -> tuple:
    """Minimize ``cost`` over a box or over the convex hull of finitely many points.

    Smooth costs use projected gradient with step ``1/L`` until the gradient
    mapping is below ``tol``.  An L1 cost is nonsmooth; it is handled by a
    projected subgradient method (50 000 iterations, best point kept), which
    is accurate to roughly 1e-4 only.

    Returns ``(minimizer, value)``.
    """
    if isinstance(set_desc, Box):
        lo = np.broadcast_to(np.asarray(set_desc.lo, dtype=float), n)
        hi = np.broadcast_to(np.asarray(set_desc.hi, dtype=float), n)
        P = None
        start = 0.5 * (lo + hi)
        proj = lambda x: np.clip(x, lo, hi)
        to_x = lambda x: x
    elif isinstance(set_desc, (FinitePoints, Boolean, Sign)):
        P = enumerable(set_desc, n).points
        start = np.full(len(P), 1.0 / len(P))
        proj = _simplex_projection
        to_x = lambda w: w @ P
    else:
        raise OracleUnavailable(f"no reference solve over {set_desc.kind}")

    if isinstance(cost, L1):
        return _subgradient_solve(cost, start, proj, to_x, P)

    L = _lipschitz(cost)
    if P is not None:
        L *= float(np.linalg.norm(P, 2) ** 2)
    step = 1.0 / L if L > 0 else 1.0
    u = start
    for _ in range(max_iter):
        g = _smooth_grad(cost, to_x(u))
        if P is not None:
            g = P @ g
        nxt = proj(u - step * g)
        mapping = np.linalg.norm(nxt - u) / step
        u = nxt
        if mapping <= tol:
            break
    x = to_x(u)
    return x, evaluate_cost(cost, x)


def _subgradient_solve(cost, start, proj, to_x, P, iters: int = 50_000) -> tuple:
    u = start
    best_x = to_x(u)
    best = evaluate_cost(cost, best_x)
    for t in range(1, iters + 1):
        x = to_x(u)
        g = cost.lam * np.sign(x)
        if P is not None:
            g = P @ g
        gn = np.linalg.norm(g)
        if gn == 0:
            break
        u = proj(u - (0.1 / math.sqrt(t)) * g / gn)
        x = to_x(u)
        val = evaluate_cost(cost, x)
        if val < best:
            best, best_x = val, x
    return best_x, best
