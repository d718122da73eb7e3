"""Expansiveness, descent-inequality audits and run classification.

For an operator ``T`` and points ``x, y``::

    eps   = max(0, ||Tx - Ty|| - ||x - y||)
    sigma = sqrt(max(0, ||Tx - Ty||^2 - ||x - y||^2))

both vanish for every pair exactly when ``T`` is nonexpansive.  Along a
Douglas-Rachford run with ``R = 2T - I`` and a fixed point ``z`` each step
satisfies::

    ||z_{n+1} - z||^2 <= ||z_n - z||^2 - 1/4 ||z_n - R z_n||^2 + 1/2 sigma^2(z_n, z)

and the whole sequence stays within
``r = sqrt(||z_0 - z||^2 + 1/2 sum_n sigma^2(z_n, z))`` of ``z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algorithms import build, cayley_map
from .model import (
    CONTINUUM,
    CONVERGED,
    MAX_ITER,
    ProblemSpec,
    RunConfig,
    RunTrace,
    as_vector,
    evaluate_cost,
)
from .oracle import brute_force_argmin, enumerable

CONFINEMENT_TOL = 1e-9
OPTIMALITY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class ExpansivenessSample:
    x: np.ndarray
    y: np.ndarray
    eps: float
    sigma: float


def expansiveness(op, x, y) -> ExpansivenessSample:
    x = as_vector(x)
    y = as_vector(y, x.size)
    d = float(np.linalg.norm(x - y))
    t = float(np.linalg.norm(op(x) - op(y)))
    return ExpansivenessSample(x, y, max(0.0, t - d), math.sqrt(max(0.0, t * t - d * d)))


def squared_expansiveness(op, x, y) -> float:
    """``sigma^2`` computed from squared norms directly (no square roots)."""
    x = as_vector(x)
    y = as_vector(y, x.size)
    diff = op(x) - op(y)
    return max(0.0, float(diff @ diff - (x - y) @ (x - y)))


@dataclass(frozen=True, eq=False)
class DescentAudit:
    reference_point: np.ndarray
    sigma_sq: np.ndarray  # sigma^2(z_n, z) for every recorded z_n
    sigma_sq_sum: float
    radius: float
    distances: np.ndarray  # ||z_n - z||
    slack: np.ndarray  # RHS - LHS of the per-step inequality, one per step
    residual_sq: np.ndarray  # ||R z_n - z_n||^2
    liminf_sigma_estimate: float
    confinement_violated: bool

    @property
    def min_slack(self) -> float:
        return float(self.slack.min()) if self.slack.size else math.inf

    @property
    def residual_sum(self) -> float:
        return float(self.residual_sq.sum())


def audit_run(trace: RunTrace, problem: ProblemSpec, reference_point=None, window: int = 50) -> DescentAudit:
    """Recompute the descent inequality along ``trace`` for a reference point.

    Without a reference point the final iterate is used, which requires the
    run to have converged.
    """
    zs = trace.z_history
    if reference_point is None:
        if trace.classification != CONVERGED:
            raise ValueError("a reference point is required for a run that did not converge")
        reference_point = zs[-1]
    z = as_vector(reference_point, problem.dimension)
    gammas = (trace.gamma, 1.0 / trace.gamma) if trace.algorithm == "dual-drs" else (trace.gamma,)
    fn, cset = build(problem, gammas)
    R = cayley_map(trace.algorithm, fn, cset, trace.gamma)
    Rz = R(z)
    Rzs = np.array([R(zn) for zn in zs])

    sig = np.maximum(0.0, ((Rzs - Rz) ** 2).sum(axis=1) - ((zs - z) ** 2).sum(axis=1))
    dist_sq = ((zs - z) ** 2).sum(axis=1)
    res_sq = ((Rzs - zs) ** 2).sum(axis=1)
    # one inequality per transition z_n -> z_{n+1}
    lhs = dist_sq[1:]
    rhs = dist_sq[:-1] - 0.25 * res_sq[:-1] + 0.5 * sig[:-1]
    total = float(sig.sum())
    radius = math.sqrt(dist_sq[0] + 0.5 * total)
    dist = np.sqrt(dist_sq)
    return DescentAudit(
        reference_point=z,
        sigma_sq=sig,
        sigma_sq_sum=total,
        radius=radius,
        distances=dist,
        slack=rhs - lhs,
        residual_sq=res_sq,
        liminf_sigma_estimate=float(sig[-window:].min()),
        confinement_violated=bool(np.any(dist > radius + CONFINEMENT_TOL)),
    )


def trailing_diameter(zs: np.ndarray, window: int = 50) -> float:
    tail = np.asarray(zs)[-window:]
    if len(tail) < 2:
        return 0.0
    diff = tail[:, None, :] - tail[None, :, :]
    return float(np.sqrt((diff**2).sum(axis=2)).max())


def classify(trace: RunTrace, config: RunConfig) -> str:
    """Label a finished run.

    ``Converged`` when the last step is within ``tol``.  When the iteration
    budget ran out, the steps are below ``sqrt(tol)`` but the trailing window
    of iterates is still spread wider than ``10 tol``, the run is labelled
    ``ContinuumSuspected``.  This is a finite-run heuristic, not a proof.
    """
    last = trace.rows[-1].step_norm if trace.rows else math.nan
    if last <= config.tol:
        return CONVERGED
    if (
        trace.iterations >= config.max_iter
        and last <= math.sqrt(config.tol)
        and trailing_diameter(trace.z_history, config.window) > config.continuum_diameter_factor * config.tol
    ):
        return CONTINUUM
    return MAX_ITER


@dataclass(frozen=True)
class OptimalityReport:
    value: float
    oracle_value: float
    gap: float
    value_optimal: bool
    near_argmin: bool

    @property
    def optimal(self) -> bool:
        return self.value_optimal and self.near_argmin


def optimality_check(x_star, problem: ProblemSpec, oracle_result=None) -> OptimalityReport:
    """Compare ``x_star`` with the brute-force minimum over ``C``."""
    if oracle_result is None:
        enumerable(problem.set, problem.dimension)  # OracleUnavailable unless finite
        oracle_result = brute_force_argmin(problem.cost, problem.set, problem.dimension)
    argmins, best = oracle_result
    x_star = as_vector(x_star, problem.dimension)
    val = evaluate_cost(problem.cost, x_star)
    near = min(float(np.abs(x_star - a).max()) for a in argmins) <= OPTIMALITY_TOL
    return OptimalityReport(val, best, val - best, val <= best + OPTIMALITY_TOL, near)
