import numpy as np
import pytest

from ncdrs.model import (
    L1,
    Affine,
    Boolean,
    Box,
    CardinalityBox,
    FinitePoints,
    LeastSquares,
    ProblemSpec,
    Quadratic,
    Sign,
    Sphere,
    Zero,
)
from ncdrs.prox import ProxFn
from ncdrs.sets import NonconvexSet


def random_psd(rng, n, rank=None):
    M = rng.normal(size=(n, rank or n))
    return M @ M.T


def random_cost(rng, n, kind):
    if kind == "zero":
        return Zero()
    if kind == "affine":
        return Affine(rng.normal(size=n), float(rng.normal()))
    if kind == "quadratic":
        return Quadratic(random_psd(rng, n), rng.normal(size=n), float(rng.normal()))
    if kind == "singular_quadratic":
        return Quadratic(random_psd(rng, n, rank=max(1, n // 2)), rng.normal(size=n))
    if kind == "least_squares":
        return LeastSquares(rng.normal(size=(n + 2, n)), rng.normal(size=n + 2))
    if kind == "l1":
        return L1(float(rng.uniform(0.1, 2.0)))
    raise ValueError(kind)


COST_KINDS = ["zero", "affine", "quadratic", "singular_quadratic", "least_squares", "l1"]


def random_set(rng, n, kind):
    if kind == "boolean":
        return Boolean()
    if kind == "sign":
        return Sign()
    if kind == "finite":
        return FinitePoints(rng.normal(size=(int(rng.integers(1, 7)), n)) * 2)
    if kind == "cardinality_box":
        return CardinalityBox(int(rng.integers(1, n + 1)), float(rng.uniform(0.5, 2.0)))
    if kind == "sphere":
        return Sphere(float(rng.uniform(0.5, 2.0)))
    if kind == "box":
        lo = rng.uniform(-2, 0, size=n)
        return Box(lo, lo + rng.uniform(0.1, 2, size=n))
    raise ValueError(kind)


SET_KINDS = ["boolean", "sign", "finite", "cardinality_box", "sphere", "box"]


def random_problem(rng, n=None, cost_kind=None, set_kind=None):
    n = n or int(rng.integers(1, 6))
    cost_kind = cost_kind or COST_KINDS[int(rng.integers(len(COST_KINDS)))]
    set_kind = set_kind or SET_KINDS[int(rng.integers(len(SET_KINDS)))]
    cost = random_cost(rng, n, cost_kind)
    cset = random_set(rng, n, set_kind)
    return ProblemSpec(cost, cset, n), ProxFn(cost, n), NonconvexSet(cset, n)


@pytest.fixture
def canonical():
    """1/2 (x - 0.6)^2 over {0, 1}."""
    spec = ProblemSpec(Quadratic.shift([0.6]), Boolean(), 1)
    return spec, ProxFn(spec.cost, 1, gammas=(1.0,)), NonconvexSet(spec.set, 1)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
