"""Compare the heuristics with exhaustive search on random Boolean least squares."""

import argparse
from dataclasses import dataclass

import numpy as np

from ncdrs import ProblemSpec, RunConfig, run
from ncdrs.model import Boolean, LeastSquares
from ncdrs.oracle import brute_force_argmin


@dataclass
class Config:
    n: int = 10
    rows: int = 15
    seeds: int = 10
    gamma: float = 1.0
    max_iter: int = 2000
    restarts: int = 1


def sweep(cfg: Config) -> list:
    out = []
    for seed in range(cfg.seeds):
        rng = np.random.default_rng(seed)
        spec = ProblemSpec(LeastSquares(rng.normal(size=(cfg.rows, cfg.n)), 2 * rng.normal(size=cfg.rows)), Boolean(), cfg.n)
        _, best = brute_force_argmin(spec.cost, spec.set, cfg.n)
        rc = RunConfig(gamma=cfg.gamma, max_iter=cfg.max_iter, restarts=cfg.restarts, seed=seed)
        row = {"seed": seed, "oracle": best}
        for kind in ("nc-drs", "nc-admm", "relaxed"):
            row[kind] = run(spec, kind, rc).best_value
        out.append(row)
    return out


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    for name, val in vars(Config()).items():
        p.add_argument(f"--{name.replace('_', '-')}", type=type(val), default=val)
    cfg = Config(**vars(p.parse_args()))
    print(f"{'seed':>4} {'oracle':>10} {'nc-drs':>10} {'nc-admm':>10} {'relaxed':>10}")
    for r in sweep(cfg):
        print(f"{r['seed']:4d} {r['oracle']:10.4f} {r['nc-drs']:10.4f} {r['nc-admm']:10.4f} {r['relaxed']:10.4f}")


if __name__ == "__main__":
    main()
