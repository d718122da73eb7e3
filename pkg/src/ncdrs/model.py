"""Problem descriptors, run configuration and trace records.

A problem is ``minimize f(x) subject to x in C`` where ``f`` is picked from a
small catalog of convex costs and ``C`` from a catalog of compact (mostly
nonconvex) sets.  Descriptors here are plain data; the behaviour lives in
:mod:`ncdrs.prox` and :mod:`ncdrs.sets`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

PSD_TOL = 1e-10


class DimensionError(ValueError):
    pass


class ValidationError(ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class EnumerationUnsupported(RuntimeError):
    """The projection set is a continuum and cannot be listed."""


class EnumerationTooLarge(RuntimeError):
    pass


class HullUnsupported(RuntimeError):
    pass


class OracleUnavailable(RuntimeError):
    pass


class UnsupportedPair(RuntimeError):
    pass


def as_vector(v, n: Optional[int] = None) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise DimensionError(f"expected length {n}, got {arr.shape[0]}")
    return arr


# --------------------------------------------------------------------------
# cost descriptors


@dataclass(frozen=True, eq=False)
class Zero:
    kind = "zero"


@dataclass(frozen=True, eq=False)
class Affine:
    """``f(x) = <q, x> + c``."""

    q: np.ndarray
    c: float = 0.0
    kind = "affine"

    def __post_init__(self):
        object.__setattr__(self, "q", as_vector(self.q))


@dataclass(frozen=True, eq=False)
class Quadratic:
    """``f(x) = 1/2 x'Px + q'x + c`` with ``P`` symmetric PSD."""

    P: np.ndarray
    q: np.ndarray
    c: float = 0.0
    kind = "quadratic"

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.P, dtype=float))
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "q", as_vector(self.q))

    @classmethod
    def shift(cls, a) -> "Quadratic":
        """``1/2 ||x - a||^2``."""
        a = as_vector(a)
        return cls(np.eye(a.size), -a, 0.5 * float(a @ a))


@dataclass(frozen=True, eq=False)
class LeastSquares:
    """``f(x) = 1/2 ||Ax - b||^2``."""

    A: np.ndarray
    b: np.ndarray
    kind = "least_squares"

    def __post_init__(self):
        object.__setattr__(self, "A", np.atleast_2d(np.asarray(self.A, dtype=float)))
        object.__setattr__(self, "b", as_vector(self.b))


@dataclass(frozen=True, eq=False)
class L1:
    """``f(x) = lam * ||x||_1``."""

    lam: float = 1.0
    kind = "l1"


CostDescriptor = Union[Zero, Affine, Quadratic, LeastSquares, L1]


# --------------------------------------------------------------------------
# set descriptors


@dataclass(frozen=True, eq=False)
class Boolean:
    """Vertices ``{0, 1}^n``."""

    kind = "boolean"


@dataclass(frozen=True, eq=False)
class Sign:
    """Vertices ``{-1, 1}^n``."""

    kind = "sign"


@dataclass(frozen=True, eq=False)
class FinitePoints:
    points: np.ndarray
    kind = "finite"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True, eq=False)
class CardinalityBox:
    """``{x : ||x||_0 <= k, ||x||_inf <= M}``."""

    k: int
    M: float
    kind = "cardinality_box"


@dataclass(frozen=True, eq=False)
class Sphere:
    r: float = 1.0
    kind = "sphere"


@dataclass(frozen=True, eq=False)
class Box:
    """``{x : lo <= x <= hi}``; scalar bounds broadcast to the dimension."""

    lo: np.ndarray
    hi: np.ndarray
    kind = "box"

    def __post_init__(self):
        object.__setattr__(self, "lo", np.atleast_1d(np.asarray(self.lo, dtype=float)))
        object.__setattr__(self, "hi", np.atleast_1d(np.asarray(self.hi, dtype=float)))


SetDescriptor = Union[Boolean, Sign, FinitePoints, CardinalityBox, Sphere, Box]


# --------------------------------------------------------------------------
# problem, config, trace


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    cost: CostDescriptor
    set: SetDescriptor
    dimension: int
    init: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.init is not None:
            object.__setattr__(self, "init", as_vector(self.init))


ALGORITHMS = ("nc-drs", "nc-admm", "relaxed", "convex-drs", "dual-drs")


@dataclass(frozen=True)
class RunConfig:
    gamma: float = 1.0
    max_iter: int = 10_000
    tol: float = 1e-8
    seed: int = 0
    restarts: int = 1
    init: Optional[np.ndarray] = None
    # only "lowest" (lexicographic-smallest selection) is implemented
    tie_break: str = "lowest"
    window: int = 50
    continuum_diameter_factor: float = 10.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 0:
            raise ValueError("max_iter must be nonnegative")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be unsigned")
        if self.tie_break != "lowest":
            raise ValueError(f"unsupported tie-break rule {self.tie_break!r}")
        if self.init is not None:
            object.__setattr__(self, "init", as_vector(self.init))


@dataclass(frozen=True, eq=False)
class IterateState:
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    n: int = 0


@dataclass(frozen=True)
class TraceRow:
    n: int
    step_norm: float  # ||z_n - z_{n-1}||, nan at n = 0
    fixed_residual: float  # ||T z_n - z_n|| for the algorithm's own step map
    obj_x: float
    obj_y: float
    best_so_far: float
    sigma_sq: Optional[float] = None


CONVERGED = "Converged"
CONTINUUM = "ContinuumSuspected"
MAX_ITER = "MaxIterReached"


@dataclass(frozen=True, eq=False)
class RunTrace:
    algorithm: str
    gamma: float
    rows: list
    z_history: np.ndarray
    final_state: IterateState
    best_feasible: np.ndarray
    best_value: float
    classification: str = MAX_ITER
    # "C" for nc-drs/nc-admm, "conv C" for the hull-based schemes
    feasible_for: str = "C"
    restart_summaries: list = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.rows) - 1


# --------------------------------------------------------------------------


def _cost_violations(cost, n: int) -> list:
    out = []
    if isinstance(cost, Zero):
        return out
    if isinstance(cost, Affine):
        if cost.q.shape != (n,):
            out.append(f"cost.q has length {cost.q.size}, expected {n}")
    elif isinstance(cost, Quadratic):
        if cost.P.shape != (n, n):
            out.append(f"cost.P has shape {cost.P.shape}, expected {(n, n)}")
        elif not np.allclose(cost.P, cost.P.T, atol=1e-12, rtol=0):
            out.append("cost.P is not symmetric")
        elif np.linalg.eigvalsh(cost.P).min() < -PSD_TOL:
            out.append("cost not convex: P has a negative eigenvalue")
        if cost.q.shape != (n,):
            out.append(f"cost.q has length {cost.q.size}, expected {n}")
    elif isinstance(cost, LeastSquares):
        if cost.A.shape[1] != n:
            out.append(f"cost.A has {cost.A.shape[1]} columns, expected {n}")
        if cost.b.shape != (cost.A.shape[0],):
            out.append("cost.b does not match the rows of cost.A")
    elif isinstance(cost, L1):
        if not cost.lam >= 0:
            out.append("cost.lambda must be nonnegative")
    else:
        out.append(f"unknown cost {type(cost).__name__}")
    if not out:
        for name in ("P", "q", "A", "b"):
            arr = getattr(cost, name, None)
            if arr is not None and not np.all(np.isfinite(arr)):
                out.append(f"cost.{name} has non-finite entries")
    return out


def _set_violations(cset, n: int) -> list:
    out = []
    if isinstance(cset, (Boolean, Sign)):
        pass
    elif isinstance(cset, FinitePoints):
        pts = cset.points
        if pts.shape[0] == 0:
            out.append("empty constraint set")
        elif pts.shape[1] != n:
            out.append(f"set.points have dimension {pts.shape[1]}, expected {n}")
        elif len(np.unique(pts, axis=0)) != len(pts):
            out.append("set.points are not pairwise distinct")
        elif not np.all(np.isfinite(pts)):
            out.append("set.points has non-finite entries")
    elif isinstance(cset, CardinalityBox):
        if int(cset.k) != cset.k or cset.k < 0:
            out.append("set.k must be a nonnegative integer")
        if not (cset.M > 0 and math.isfinite(cset.M)):
            out.append("set.M must be a positive finite bound")
    elif isinstance(cset, Sphere):
        if not (cset.r > 0 and math.isfinite(cset.r)):
            out.append("set.r must be a positive finite radius")
    elif isinstance(cset, Box):
        for name in ("lo", "hi"):
            arr = getattr(cset, name)
            if arr.size not in (1, n):
                out.append(f"set.{name} has length {arr.size}, expected {n}")
            elif not np.all(np.isfinite(arr)):
                out.append(f"set.{name} must be finite")
        if not out and np.any(np.broadcast_to(cset.lo, n) > np.broadcast_to(cset.hi, n)):
            out.append("empty constraint set: set.lo exceeds set.hi")
    else:
        out.append(f"unknown set {type(cset).__name__}")
    return out


def validate(spec: ProblemSpec) -> list:
    """Return human-readable violations of ``spec``; empty when well formed."""
    n = spec.dimension
    if int(n) != n or n < 1:
        return ["dimension must be a positive integer"]
    out = _cost_violations(spec.cost, n) + _set_violations(spec.set, n)
    if spec.init is not None and spec.init.shape != (n,):
        out.append(f"init has length {spec.init.size}, expected {n}")
    return out


def evaluate_cost(cost, x) -> float:
    """``f(x)`` for a cost descriptor, or for the cost of a :class:`ProblemSpec`."""
    if isinstance(cost, ProblemSpec):
        x = as_vector(x, cost.dimension)
        cost = cost.cost
    x = as_vector(x)
    if isinstance(cost, Zero):
        return 0.0
    if isinstance(cost, Affine):
        _check_len(cost.q, x)
        return float(cost.q @ x + cost.c)
    if isinstance(cost, Quadratic):
        _check_len(cost.q, x)
        return float(0.5 * x @ cost.P @ x + cost.q @ x + cost.c)
    if isinstance(cost, LeastSquares):
        if cost.A.shape[1] != x.size:
            raise DimensionError(f"expected length {cost.A.shape[1]}, got {x.size}")
        r = cost.A @ x - cost.b
        return float(0.5 * r @ r)
    if isinstance(cost, L1):
        return float(cost.lam * np.abs(x).sum())
    raise TypeError(f"unknown cost {cost!r}")


def _check_len(ref: np.ndarray, x: np.ndarray) -> None:
    if ref.shape != x.shape:
        raise DimensionError(f"expected length {ref.size}, got {x.size}")
