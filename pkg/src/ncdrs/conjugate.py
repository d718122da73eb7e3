"""Proximal maps of conjugate functions.

``f*`` is the Fenchel conjugate and ``g^v(x) = g(-x)`` the reversal.  The
dual Douglas-Rachford scheme needs two maps that are computable from the
primal objects alone:

* ``prox_{gamma f*v}(v) = v + gamma * prox_{f/gamma}(-v/gamma)``
* ``prox_{gamma s_C}(v) = v - gamma * P_{conv C}(v/gamma)`` for the support
  function ``s_C`` of a compact set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .model import L1, Box, Quadratic, UnsupportedPair, as_vector
from .prox import ProxFn
from .sets import NonconvexSet


def prox_conjugate_reversal(fn: ProxFn, gamma: float, v) -> np.ndarray:
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    v = as_vector(v, fn.dimension)
    return v + gamma * fn.prox(1.0 / gamma, -v / gamma)


def prox_support(cset: NonconvexSet, gamma: float, v) -> np.ndarray:
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    v = as_vector(v, cset.dimension)
    return v - gamma * cset.project_hull(v / gamma)


def conjugate_reversal_descriptor(cost: Quadratic) -> Quadratic:
    """Explicit ``f*v`` for a strictly convex quadratic.

    For ``f = 1/2 x'Px + q'x + c`` with ``P`` positive definite,
    ``f*v(y) = 1/2 (y + q)' P^-1 (y + q) - c``.
    """
    if not isinstance(cost, Quadratic):
        raise TypeError("closed-form conjugate only for quadratic costs")
    P = 0.5 * (cost.P + cost.P.T)
    Pinv = np.linalg.inv(P)
    Pinv = 0.5 * (Pinv + Pinv.T)
    return Quadratic(Pinv, Pinv @ cost.q, 0.5 * float(cost.q @ Pinv @ cost.q) - cost.c)


@dataclass(frozen=True, eq=False)
class ConjugatePair:
    """A convex cost together with the proximal map (γ = 1) of its conjugate."""

    primal: ProxFn
    conjugate_prox: Optional[Callable[[np.ndarray], np.ndarray]] = None
    conjugate: Optional[object] = None

    @property
    def conjugate_prox_available(self) -> bool:
        return self.conjugate_prox is not None

    @classmethod
    def quadratic_shift(cls, a) -> "ConjugatePair":
        # (1/2||x - a||^2)* = 1/2||y||^2 + <a, y>
        a = as_vector(a)
        primal = ProxFn(Quadratic.shift(a), a.size, gammas=(1.0,))
        conj = ProxFn(Quadratic(np.eye(a.size), a, 0.0), a.size, gammas=(1.0,))
        return cls(primal, lambda v: conj.prox(1.0, v), conj.cost)

    @classmethod
    def l1(cls, lam: float, n: int) -> "ConjugatePair":
        # (lam ||x||_1)* is the indicator of [-lam, lam]^n
        primal = ProxFn(L1(lam), n)
        box = NonconvexSet(Box(-lam, lam), n)
        return cls(primal, box.project, box.descriptor)

    @classmethod
    def from_cost(cls, cost, n: int) -> "ConjugatePair":
        if isinstance(cost, L1):
            return cls.l1(cost.lam, n)
        if isinstance(cost, Quadratic) and np.array_equal(cost.P, np.eye(n)):
            a = -cost.q
            if np.isclose(cost.c, 0.5 * float(a @ a), rtol=0, atol=1e-12):
                return cls.quadratic_shift(a)
        return cls(ProxFn(cost, n))


def moreau_residual(pair: ConjugatePair, v) -> float:
    """``||prox_f(v) + prox_{f*}(v) - v||``; zero for every convex pair."""
    if not pair.conjugate_prox_available:
        raise UnsupportedPair(f"no conjugate prox for {pair.primal!r}")
    v = as_vector(v, pair.primal.dimension)
    return float(np.linalg.norm(pair.primal.prox(1.0, v) + pair.conjugate_prox(v) - v))


def indicator_moreau_residual(cset: NonconvexSet, v) -> float:
    """Moreau residual for ``f = indicator of C``, with ``prox_f`` the selection onto ``C``.

    The identity needs ``f`` convex, so for a nonconvex ``C`` this is
    generally far from zero.
    """
    v = as_vector(v, cset.dimension)
    return float(np.linalg.norm(cset.project(v) + prox_support(cset, 1.0, v) - v))
