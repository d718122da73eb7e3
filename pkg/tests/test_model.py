import numpy as np
import pytest

from ncdrs.model import (
    L1,
    Boolean,
    Box,
    DimensionError,
    FinitePoints,
    LeastSquares,
    ProblemSpec,
    Quadratic,
    RunConfig,
    Sphere,
    evaluate_cost,
    validate,
)


def test_well_formed_problem_has_no_violations():
    spec = ProblemSpec(Quadratic(np.eye(2), np.zeros(2)), Boolean(), 2)
    assert validate(spec) == []


def test_empty_finite_set():
    spec = ProblemSpec(Quadratic(np.eye(1), [0.0]), FinitePoints(np.zeros((0, 1))), 1)
    assert "empty constraint set" in validate(spec)


def test_negative_eigenvalue_is_not_convex():
    P = np.array([[1.0, 2.0], [2.0, 1.0]])
    # eigenvalue oracle: trace 2, det -3 => roots 3 and -1
    assert np.isclose(np.linalg.eigvalsh(P).min(), -1.0)
    out = validate(ProblemSpec(Quadratic(P, np.zeros(2)), Boolean(), 2))
    assert any("cost not convex" in v for v in out)


def test_psd_tolerance():
    P = np.diag([1.0, -1e-11])
    assert validate(ProblemSpec(Quadratic(P, np.zeros(2)), Boolean(), 2)) == []


@pytest.mark.parametrize(
    "spec, fragment",
    [
        (ProblemSpec(Quadratic(np.eye(3), np.zeros(3)), Boolean(), 2), "cost.P"),
        (ProblemSpec(LeastSquares(np.ones((2, 2)), [1.0]), Boolean(), 2), "cost.b"),
        (ProblemSpec(L1(-1.0), Boolean(), 2), "lambda"),
        (ProblemSpec(L1(), FinitePoints([[0.0, 0.0], [0.0, 0.0]]), 2), "distinct"),
        (ProblemSpec(L1(), Sphere(0.0), 2), "set.r"),
        (ProblemSpec(L1(), Box([1.0, 0.0], [0.0, 1.0]), 2), "empty"),
        (ProblemSpec(L1(), Boolean(), 0), "dimension"),
    ],
)
def test_violations(spec, fragment):
    assert any(fragment in v for v in validate(spec))


def test_evaluate_cost_examples():
    assert evaluate_cost(Quadratic.shift([0.6]), [0.6]) == 0.0
    assert evaluate_cost(L1(1.0), [2.0, -3.0]) == 5.0
    A = np.array([[1.0, 0.0], [0.0, 2.0]])
    b = np.array([1.0, 2.0])
    # direct substitution: A @ (1, 1) = (1, 2) = b
    assert evaluate_cost(LeastSquares(A, b), [1.0, 1.0]) == 0.0


def test_evaluate_cost_checks_dimension():
    spec = ProblemSpec(L1(), Boolean(), 2)
    with pytest.raises(DimensionError):
        evaluate_cost(spec, [1.0, 2.0, 3.0])
    with pytest.raises(DimensionError):
        evaluate_cost(Quadratic.shift([0.6]), [1.0, 2.0])


def test_shift_quadratic_is_half_squared_distance():
    rng = np.random.default_rng(0)
    a, x = rng.normal(size=4), rng.normal(size=4)
    assert evaluate_cost(Quadratic.shift(a), x) == pytest.approx(0.5 * np.sum((x - a) ** 2), rel=1e-12)


@pytest.mark.parametrize("kw", [{"gamma": 0}, {"tol": -1}, {"restarts": 0}, {"tie_break": "highest"}])
def test_run_config_rejects(kw):
    with pytest.raises(ValueError):
        RunConfig(**kw)
