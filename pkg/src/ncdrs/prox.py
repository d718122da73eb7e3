"""Closed-form proximal operators for the cost catalog."""

from __future__ import annotations

from typing import Iterable

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .model import (
    L1,
    Affine,
    LeastSquares,
    Quadratic,
    ValidationError,
    Zero,
    _cost_violations,
    as_vector,
    evaluate_cost,
)


def soft_threshold(v: np.ndarray, t: float) -> np.ndarray:
    # |v_i| == t lands exactly on 0
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


class ProxFn:
    """A catalog cost with its proximal map.

    Quadratic families need a Cholesky factor of ``I + gamma*H`` (``H = P`` or
    ``A'A``).  Factors for the ``gammas`` passed at construction are built
    eagerly, so the object is never mutated afterwards; any other ``gamma`` is
    factored on the fly.
    """

    def __init__(self, cost, dimension: int, gammas: Iterable[float] = ()):
        problems = _cost_violations(cost, dimension)
        if problems:
            raise ValidationError(problems)
        self.cost = cost
        self.dimension = int(dimension)
        self._hessian = None
        self._linear = None
        if isinstance(cost, Quadratic):
            self._hessian = 0.5 * (cost.P + cost.P.T)
            self._linear = -cost.q
        elif isinstance(cost, LeastSquares):
            self._hessian = cost.A.T @ cost.A
            self._linear = cost.A.T @ cost.b
        self._factors = {float(g): self._factor(float(g)) for g in gammas} if self._hessian is not None else {}

    def _factor(self, gamma: float):
        if not gamma > 0:
            raise ValueError("gamma must be positive")
        return cho_factor(np.eye(self.dimension) + gamma * self._hessian)

    def __call__(self, x) -> float:
        return evaluate_cost(self.cost, as_vector(x, self.dimension))

    def prox(self, gamma: float, v) -> np.ndarray:
        """``argmin_y f(y) + ||y - v||^2 / (2 gamma)``."""
        if not gamma > 0:
            raise ValueError("gamma must be positive")
        v = as_vector(v, self.dimension)
        cost = self.cost
        if isinstance(cost, Zero):
            return v.copy()
        if isinstance(cost, Affine):
            return v - gamma * cost.q
        if isinstance(cost, L1):
            return soft_threshold(v, gamma * cost.lam)
        factor = self._factors.get(float(gamma))
        if factor is None:
            factor = self._factor(float(gamma))
        # (I + gamma H) y = v + gamma * (-q  or  A'b)
        return cho_solve(factor, v + gamma * self._linear)

    def reflected_prox(self, gamma: float, v) -> np.ndarray:
        v = as_vector(v, self.dimension)
        return 2.0 * self.prox(gamma, v) - v

    def gradient(self, x) -> np.ndarray:
        """Gradient for the smooth members of the catalog."""
        x = as_vector(x, self.dimension)
        cost = self.cost
        if isinstance(cost, Zero):
            return np.zeros_like(x)
        if isinstance(cost, Affine):
            return cost.q.copy()
        if isinstance(cost, L1):
            raise TypeError("L1 cost is not differentiable")
        return self._hessian @ x - self._linear

    @property
    def smooth(self) -> bool:
        return not isinstance(self.cost, L1)

    def __repr__(self):
        return f"ProxFn({type(self.cost).__name__}, n={self.dimension})"


def prox(fn: ProxFn, gamma: float, v) -> np.ndarray:
    return fn.prox(gamma, v)


def reflected_prox(fn: ProxFn, gamma: float, v) -> np.ndarray:
    return fn.reflected_prox(gamma, v)
