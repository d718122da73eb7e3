"""Command-line front end.

::

    ncdrs solve   --config problem.json --algorithm nc-drs [--audit [auto|REF]]
    ncdrs compare --config problem.json

``solve`` writes a CSV trace (to ``--output`` or stdout) and prints a one-line
JSON summary on stdout.  Exit status is 0 for ``Converged`` and
``ContinuumSuspected``, 2 for ``MaxIterReached`` and 1 for bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import algorithms, diagnostics, oracle
from .model import (
    ALGORITHMS,
    CONVERGED,
    MAX_ITER,
    L1,
    Affine,
    Boolean,
    Box,
    CardinalityBox,
    EnumerationTooLarge,
    FinitePoints,
    HullUnsupported,
    LeastSquares,
    OracleUnavailable,
    ProblemSpec,
    Quadratic,
    RunConfig,
    Sign,
    Sphere,
    ValidationError,
    Zero,
    validate,
)
from .sets import NonconvexSet

CSV_HEADER = ["n", "step_norm", "fixed_residual", "obj_x", "obj_y", "sigma_sq", "best_so_far"]


class ProblemFileError(ValueError):
    pass


def _require(d: dict, key: str, where: str):
    if key not in d:
        raise ProblemFileError(f"missing key {where}.{key}" if where else f"missing key {key}")
    return d[key]


def _array(d: dict, key: str, where: str, ndim: int):
    val = _require(d, key, where)
    try:
        arr = np.asarray(val, dtype=float)
    except (TypeError, ValueError):
        raise ProblemFileError(f"{where}.{key} is not numeric") from None
    if ndim == 2:
        arr = np.atleast_2d(arr)
    if arr.ndim != ndim and not (ndim == 1 and arr.ndim == 0):
        raise ProblemFileError(f"{where}.{key} must have {ndim} dimension(s)")
    return arr


def _number(d: dict, key: str, where: str, default=None):
    if key not in d and default is not None:
        return default
    val = _require(d, key, where)
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ProblemFileError(f"{where}.{key} must be a number")
    return val


def parse_cost(d: dict):
    kind = _require(d, "type", "cost")
    if kind == "zero":
        return Zero()
    if kind == "affine":
        return Affine(_array(d, "q", "cost", 1), float(_number(d, "c", "cost", 0.0)))
    if kind == "quadratic":
        return Quadratic(_array(d, "P", "cost", 2), _array(d, "q", "cost", 1), float(_number(d, "c", "cost", 0.0)))
    if kind == "least_squares":
        return LeastSquares(_array(d, "A", "cost", 2), _array(d, "b", "cost", 1))
    if kind == "l1":
        return L1(float(_number(d, "lambda", "cost", 1.0)))
    raise ProblemFileError(f"unknown cost.type {kind!r}")


def parse_set(d: dict):
    kind = _require(d, "type", "set")
    if kind == "boolean":
        return Boolean()
    if kind == "sign":
        return Sign()
    if kind == "finite":
        pts = _array(d, "points", "set", 2)
        return FinitePoints(pts.reshape(0, pts.shape[-1]) if pts.size == 0 else pts)
    if kind == "cardinality_box":
        k = _number(d, "k", "set")
        if int(k) != k:
            raise ProblemFileError("set.k must be an integer")
        return CardinalityBox(int(k), float(_number(d, "M", "set")))
    if kind == "sphere":
        return Sphere(float(_number(d, "r", "set")))
    if kind == "box":
        return Box(_array(d, "lo", "set", 1), _array(d, "hi", "set", 1))
    raise ProblemFileError(f"unknown set.type {kind!r}")


def parse_problem(doc: dict) -> ProblemSpec:
    if not isinstance(doc, dict):
        raise ProblemFileError("problem file must hold a JSON object")
    n = _require(doc, "dimension", "")
    if isinstance(n, bool) or not isinstance(n, int):
        raise ProblemFileError("dimension must be an integer")
    cost = _require(doc, "cost", "")
    cset = _require(doc, "set", "")
    if not isinstance(cost, dict) or not isinstance(cset, dict):
        raise ProblemFileError("cost and set must be JSON objects")
    init = _array(doc, "init", "", 1) if "init" in doc else None
    spec = ProblemSpec(parse_cost(cost), parse_set(cset), n, init)
    problems = validate(spec)
    if problems:
        raise ProblemFileError(problems[0])
    return spec


def load_problem(path: str) -> ProblemSpec:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"{path} is not valid JSON: {exc.msg}") from None
    return parse_problem(doc)


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return repr(float(v))


def _finite(v):
    return None if v is None or not math.isfinite(v) else float(v)


def write_trace(trace, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in trace.rows:
        w.writerow([r.n, _fmt(r.step_norm), _fmt(r.fixed_residual), _fmt(r.obj_x), _fmt(r.obj_y), _fmt(r.sigma_sq), _fmt(r.best_so_far)])


def _config(args) -> RunConfig:
    return RunConfig(
        gamma=args.gamma, max_iter=args.max_iter, tol=args.tol, seed=args.seed, restarts=args.restarts
    )


def _parse_reference(text: str, n: int) -> np.ndarray:
    try:
        val = json.loads(text) if text.strip().startswith("[") else [float(t) for t in text.split(",")]
        ref = np.asarray(val, dtype=float).reshape(-1)
    except (ValueError, TypeError):
        raise ProblemFileError(f"--audit reference {text!r} is not a vector literal") from None
    if ref.size != n:
        raise ProblemFileError(f"--audit reference has length {ref.size}, expected {n}")
    return ref


def cmd_solve(args) -> int:
    spec = load_problem(args.config)
    config = _config(args)
    kind = args.algorithm
    audit_ref = None
    if args.audit is not None:
        if kind not in ("nc-drs", "convex-drs", "dual-drs"):
            raise ProblemFileError(f"--audit needs a Douglas-Rachford algorithm, not {kind}")
        if args.audit != "auto":
            audit_ref = _parse_reference(args.audit, spec.dimension)
    trace = algorithms.run(spec, kind, config)

    summary = {
        "classification": trace.classification,
        "best_feasible": None if trace.best_feasible is None else trace.best_feasible.tolist(),
        "best_value": _finite(trace.best_value),
        "iterations": trace.iterations,
    }
    if args.audit is not None:
        ref = audit_ref
        if ref is None and trace.classification == CONVERGED:
            ref = trace.z_history[-1]
        if ref is None:
            print("audit skipped: run did not converge and no reference point was given", file=sys.stderr)
        else:
            audit = diagnostics.audit_run(trace, spec, ref, config.window)
            trace = algorithms.attach_sigma(trace, audit.sigma_sq)
            summary["radius"] = audit.radius
            summary["min_trailing_sigma_sq"] = audit.liminf_sigma_estimate

    line = json.dumps(summary)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            write_trace(trace, fh)
        print(line)
    else:
        buf = io.StringIO()
        write_trace(trace, buf)
        sys.stdout.write(buf.getvalue())
        print(line)
    return 2 if trace.classification == MAX_ITER else 0


def compare(spec: ProblemSpec, config: RunConfig) -> dict:
    cset = NonconvexSet(spec.set, spec.dimension)
    table = {}
    try:
        _, best = oracle.brute_force_argmin(spec.cost, spec.set, spec.dimension)
        table["oracle"] = {"best_value": best, "feasible": True, "iterations": None, "gap_to_oracle": 0.0}
    except (OracleUnavailable, EnumerationTooLarge):
        best = None
    kinds = ["nc-drs", "nc-admm"] + (["relaxed"] if cset.supports_hull else [])
    for kind in kinds:
        try:
            trace = algorithms.run(spec, kind, config)
        except HullUnsupported:
            continue
        pt = trace.best_feasible
        feasible = pt is not None and cset.contains(pt, 1e-9)
        row = {
            "best_value": _finite(trace.best_value),
            "feasible": feasible,
            "iterations": trace.iterations,
            # a hull point is a lower bound, not a competitor, so it gets no gap
            "gap_to_oracle": trace.best_value - best if (best is not None and feasible) else None,
        }
        if kind == "relaxed" and not feasible:
            row["note"] = "infeasible for C (hull point)"
        table[kind] = row
    return table


def cmd_compare(args) -> int:
    spec = load_problem(args.config)
    table = compare(spec, _config(args))
    text = json.dumps(table, indent=2, sort_keys=True) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="problem file (JSON)")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--output", default=None, help="output path (default stdout)")


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors: exit 1, keeping 2 for non-convergence
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ncdrs", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    solve = sub.add_parser("solve", help="run one algorithm and write its trace")
    _common(solve)
    solve.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    solve.add_argument(
        "--audit",
        nargs="?",
        const="auto",
        default=None,
        help='audit the descent inequality; "auto" uses the converged iterate, or pass a reference vector',
    )
    solve.set_defaults(func=cmd_solve)
    comp = sub.add_parser("compare", help="run every heuristic plus the brute-force oracle")
    _common(comp)
    comp.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ProblemFileError, ValidationError, HullUnsupported, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
