"""Douglas-Rachford and ADMM iterations for convex costs over compact sets.

All step functions are pure.  The nonconvex schemes use the deterministic
projection selection of :class:`~ncdrs.sets.NonconvexSet`; the relaxed and
dual schemes use the projection onto the convex hull.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import conjugate
from .model import (
    ALGORITHMS,
    CONTINUUM,
    CONVERGED,
    MAX_ITER,
    HullUnsupported,
    IterateState,
    ProblemSpec,
    RunConfig,
    RunTrace,
    TraceRow,
    ValidationError,
    as_vector,
    evaluate_cost,
    validate,
)
from .prox import ProxFn
from .sets import NonconvexSet

FEASIBILITY_TOL = 1e-12
HULL_FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DualState:
    zeta: np.ndarray
    xi: np.ndarray
    psi: np.ndarray
    n: int = 0


# --------------------------------------------------------------------------
# operators


def dr_operator(fn: ProxFn, cset: NonconvexSet, gamma: float, z) -> np.ndarray:
    """``T z = P(2 prox(z) - z) + z - prox(z)``."""
    z = as_vector(z, cset.dimension)
    x = fn.prox(gamma, z)
    return cset.project(2.0 * x - z) + z - x


def cayley_operator(fn: ProxFn, cset: NonconvexSet, gamma: float, z) -> np.ndarray:
    """``R z = 2 T z - z``."""
    z = as_vector(z, cset.dimension)
    return 2.0 * dr_operator(fn, cset, gamma, z) - z


def pr_operator(fn: ProxFn, cset: NonconvexSet, gamma: float, z) -> np.ndarray:
    """``S z = (2P - I)(2 prox - I) z``."""
    w = fn.reflected_prox(gamma, z)
    return 2.0 * cset.project(w) - w


# --------------------------------------------------------------------------
# proximable wrappers for the convex scheme


class HullIndicator:
    """Indicator of ``conv C``; its prox is the hull projection for every gamma."""

    def __init__(self, cset: NonconvexSet):
        if not cset.supports_hull:
            raise HullUnsupported(f"no hull projection for {cset.kind}")
        self.cset = cset
        self.dimension = cset.dimension

    def prox(self, gamma: float, v) -> np.ndarray:
        return self.cset.project_hull(v)

    def __call__(self, x) -> float:
        return 0.0 if self.cset.hull_contains(x, HULL_FEASIBILITY_TOL) else math.inf


class SupportFunction:
    def __init__(self, cset: NonconvexSet):
        if not cset.supports_hull:
            raise HullUnsupported(f"no hull projection for {cset.kind}")
        self.cset = cset
        self.dimension = cset.dimension

    def prox(self, gamma: float, v) -> np.ndarray:
        return conjugate.prox_support(self.cset, gamma, v)


class ConjugateReversal:
    def __init__(self, fn: ProxFn):
        self.fn = fn
        self.dimension = fn.dimension

    def prox(self, gamma: float, v) -> np.ndarray:
        return conjugate.prox_conjugate_reversal(self.fn, gamma, v)


# --------------------------------------------------------------------------
# steps


def nc_drs_step(state: IterateState, fn: ProxFn, cset: NonconvexSet, gamma: float) -> IterateState:
    z = state.z
    x = fn.prox(gamma, z)
    y = cset.project(2.0 * x - z)
    return IterateState(x, y, z + y - x, state.n + 1)


def nc_admm_step(state: IterateState, fn: ProxFn, cset: NonconvexSet, gamma: float) -> IterateState:
    x = fn.prox(gamma, state.y - state.z)
    y = cset.project(x + state.z)
    return IterateState(x, y, state.z - y + x, state.n + 1)


def relaxed_nc_admm_step(state: IterateState, fn: ProxFn, cset: NonconvexSet, gamma_tilde: float) -> IterateState:
    """NC-ADMM with the projection onto ``conv C``.

    ``gamma_tilde`` is the reciprocal of the parameter of the dual
    Douglas-Rachford scheme it is derived from.
    """
    if not cset.supports_hull:
        raise HullUnsupported(f"no hull projection for {cset.kind}")
    x = fn.prox(gamma_tilde, state.y - state.z)
    y = cset.project_hull(x + state.z)
    return IterateState(x, y, state.z - y + x, state.n + 1)


def convex_drs_step(state: IterateState, prox_h, prox_g, gamma: float) -> IterateState:
    """Douglas-Rachford for ``minimize h + g``; both arguments expose ``prox(gamma, v)``."""
    z = state.z
    x = prox_h.prox(gamma, z)
    y = prox_g.prox(gamma, 2.0 * x - z)
    return IterateState(x, y, z + y - x, state.n + 1)


def dual_drs_step(state: DualState, fn: ProxFn, cset: NonconvexSet, gamma: float) -> DualState:
    """Douglas-Rachford on the dual, ``h = support function of C``, ``g = f*v``."""
    nxt = convex_drs_step(
        IterateState(state.zeta, state.xi, state.psi, state.n),
        SupportFunction(cset),
        ConjugateReversal(fn),
        gamma,
    )
    return DualState(nxt.x, nxt.y, nxt.z, nxt.n)


def relaxed_to_dual(state: IterateState, fn: ProxFn, gamma: float) -> DualState:
    """Dual starting point matching a relaxed NC-ADMM state ``(y_n, z_n)``.

    ``psi_n = gamma * (z_n + x_{n+1})`` where ``x_{n+1}`` is the relaxed
    x-update with parameter ``1/gamma``.
    """
    x_next = fn.prox(1.0 / gamma, state.y - state.z)
    psi = gamma * (state.z + x_next)
    zero = np.zeros_like(psi)
    return DualState(zero, zero, psi, state.n)


def dual_to_relaxed(prev: DualState, nxt: DualState, gamma: float) -> tuple:
    """Relaxed NC-ADMM quantities recovered from one dual step.

    Returns ``(y_{n+1}, z_{n+1}, x_{n+2})`` in relaxed indexing.
    """
    psi = prev.psi
    y = (psi - nxt.zeta) / gamma
    x_ahead = (nxt.xi - 2.0 * nxt.zeta + psi) / gamma
    z = nxt.psi / gamma - x_ahead
    return y, z, x_ahead


# --------------------------------------------------------------------------
# fixed-point maps used by the diagnostics


def cayley_map(kind: str, fn: ProxFn, cset: NonconvexSet, gamma: float) -> Callable:
    """``R = 2T - I`` for the Douglas-Rachford family."""
    if kind == "nc-drs":
        return lambda z: cayley_operator(fn, cset, gamma, z)
    if kind == "convex-drs":
        hull = HullIndicator(cset)

        def R(z):
            return 2.0 * convex_drs_step(IterateState(z, z, z), fn, hull, gamma).z - z

        return R
    if kind == "dual-drs":

        def R(psi):
            nxt = dual_drs_step(DualState(psi, psi, psi), fn, cset, gamma)
            return 2.0 * nxt.psi - psi

        return R
    raise ValueError(f"{kind} is not a Douglas-Rachford iteration")


# --------------------------------------------------------------------------
# driver


def build(spec: ProblemSpec, gammas=()) -> tuple:
    problems = validate(spec)
    if problems:
        raise ValidationError(problems)
    return ProxFn(spec.cost, spec.dimension, gammas), NonconvexSet(spec.set, spec.dimension)


class _Scheme:
    """One algorithm bound to a problem.

    ``initial`` and ``step`` return ``(state, x, y, w)`` where ``w`` is the
    scheme's fixed-point variable: ``z`` for the Douglas-Rachford schemes,
    ``psi`` for the dual one and the stacked ``(y, z)`` for the ADMM schemes
    (their ``z`` can stall while ``x`` and ``y`` still move).
    """

    def __init__(self, kind: str, fn: ProxFn, cset: NonconvexSet, gamma: float):
        if kind not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {kind!r}")
        self.on_hull = kind in ("relaxed", "convex-drs", "dual-drs")
        if self.on_hull and not cset.supports_hull:
            raise HullUnsupported(f"{kind} needs a hull projection, unavailable for {cset.kind}")
        self.kind, self.fn, self.cset, self.gamma = kind, fn, cset, gamma
        if kind == "convex-drs":
            self._hull = HullIndicator(cset)

    def initial(self, init: np.ndarray):
        cs = self.cset
        y0 = cs.project_hull(init) if self.on_hull else cs.project(init)
        if self.kind in ("nc-drs", "convex-drs"):
            return IterateState(init.copy(), y0, init.copy()), init, y0, init.copy()
        zero = np.zeros_like(init)
        st = IterateState(init.copy(), y0, zero)
        if self.kind in ("nc-admm", "relaxed"):
            return st, init, y0, np.concatenate([y0, zero])
        # dual-drs starts from the image of the relaxed start (y0, z0 = 0);
        # the recovered primal x runs one step ahead and is carried in the state
        dual = relaxed_to_dual(st, self.fn, self.gamma)
        return (dual, init.copy()), init, y0, dual.psi

    def step(self, state):
        k, fn, cs, g = self.kind, self.fn, self.cset, self.gamma
        if k == "dual-drs":
            dual, x_carry = state
            nxt = dual_drs_step(dual, fn, cs, g)
            y, _, x_ahead = dual_to_relaxed(dual, nxt, g)
            return (nxt, x_ahead), x_carry, y, nxt.psi
        if k == "nc-drs":
            st = nc_drs_step(state, fn, cs, g)
        elif k == "nc-admm":
            st = nc_admm_step(state, fn, cs, g)
        elif k == "relaxed":
            st = relaxed_nc_admm_step(state, fn, cs, g)
        else:
            st = convex_drs_step(state, fn, self._hull, g)
        w = st.z if k in ("nc-drs", "convex-drs") else np.concatenate([st.y, st.z])
        return st, st.x, st.y, w

    def feasible(self, y) -> bool:
        if self.on_hull:
            return self.cset.hull_contains(y, HULL_FEASIBILITY_TOL)
        return self.cset.contains(y, FEASIBILITY_TOL)


def _single_run(scheme: _Scheme, spec: ProblemSpec, config: RunConfig, init: np.ndarray, reference=None) -> RunTrace:
    cost = spec.cost
    state, x, y, w = scheme.initial(init)
    ws, views, steps = [w], [(x, y)], [math.nan]
    for _ in range(config.max_iter):
        state, x, y, w = scheme.step(state)
        step = float(np.linalg.norm(w - ws[-1]))
        ws.append(w)
        views.append((x, y))
        steps.append(step)
        if step <= config.tol:
            break
    # residual of the step map at every recorded state; the last one needs an extra step
    residuals = steps[1:] + [float(np.linalg.norm(scheme.step(state)[3] - ws[-1]))]

    sigma = [None] * len(ws)
    if reference is not None:
        R = cayley_map(scheme.kind, scheme.fn, scheme.cset, scheme.gamma)
        ref = as_vector(reference, spec.dimension)
        R_ref = R(ref)
        sigma = [max(0.0, float(np.sum((R(wn) - R_ref) ** 2) - np.sum((wn - ref) ** 2))) for wn in ws]

    rows = []
    best_val, best_pt = math.inf, None
    for n, ((xv, yv), step, res, sig) in enumerate(zip(views, steps, residuals, sigma)):
        oy = evaluate_cost(cost, yv)
        if oy < best_val and scheme.feasible(yv):
            best_val, best_pt = oy, yv.copy()
        rows.append(TraceRow(n, step, res, evaluate_cost(cost, xv), oy, best_val, sig))

    final = state[0] if scheme.kind == "dual-drs" else state
    zs = np.array(ws)
    trace = RunTrace(
        algorithm=scheme.kind,
        gamma=scheme.gamma,
        rows=rows,
        z_history=zs,
        final_state=final,
        best_feasible=best_pt,
        best_value=best_val,
        feasible_for="conv C" if scheme.on_hull else "C",
    )
    from .diagnostics import classify

    return replace(trace, classification=classify(trace, config))


def run(spec: ProblemSpec, kind: str, config: RunConfig, reference_point=None) -> RunTrace:
    """Iterate ``kind`` on ``spec`` until ``||z_{n+1} - z_n|| <= tol`` or ``max_iter``.

    The first restart starts from ``config.init`` (else ``spec.init``, else
    the origin).  Further restarts draw uniformly from the bounding box of
    ``C`` with its half-widths doubled, using ``config.seed``.  The trace of
    the restart with the lowest best-feasible value is returned (lowest
    index on ties) with a summary of all of them.
    """
    gammas = (config.gamma, 1.0 / config.gamma) if kind == "dual-drs" else (config.gamma,)
    fn, cset = build(spec, gammas)
    scheme = _Scheme(kind, fn, cset, config.gamma)
    n = spec.dimension
    init = config.init if config.init is not None else spec.init
    init = np.zeros(n) if init is None else as_vector(init, n)

    starts = [init]
    if config.restarts > 1:
        rng = np.random.default_rng(config.seed)
        lo, hi = cset.bounding_box()
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        for _ in range(config.restarts - 1):
            starts.append(rng.uniform(mid - 2.0 * half, mid + 2.0 * half))

    traces = []
    for z0 in starts:
        traces.append(_single_run(_Scheme(kind, fn, cset, config.gamma), spec, config, z0, reference_point))
    if len(traces) == 1:
        return traces[0]
    best = min(range(len(traces)), key=lambda i: (traces[i].best_value, i))
    summaries = [
        {
            "restart": i,
            "init": starts[i].tolist(),
            "best_value": t.best_value,
            "iterations": t.iterations,
            "classification": t.classification,
        }
        for i, t in enumerate(traces)
    ]
    return replace(traces[best], restart_summaries=summaries)


def attach_sigma(trace: RunTrace, sigma_sq) -> RunTrace:
    rows = [replace(r, sigma_sq=float(s)) for r, s in zip(trace.rows, sigma_sq)]
    return replace(trace, rows=rows)

