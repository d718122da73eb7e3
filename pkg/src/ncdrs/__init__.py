"""Douglas-Rachford and ADMM heuristics for convex costs over compact nonconvex sets."""

from .algorithms import DualState, run
from .model import (
    L1,
    Affine,
    Boolean,
    Box,
    CardinalityBox,
    FinitePoints,
    IterateState,
    LeastSquares,
    ProblemSpec,
    Quadratic,
    RunConfig,
    RunTrace,
    Sign,
    Sphere,
    Zero,
    evaluate_cost,
    validate,
)
from .prox import ProxFn
from .sets import NonconvexSet

__version__ = "0.1.0"
