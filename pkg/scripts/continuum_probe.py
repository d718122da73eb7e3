"""Watch NC-DRS on 1/2||x||^2 over a circle, where every point of C is optimal."""

from dataclasses import dataclass

import numpy as np

from ncdrs import ProblemSpec, RunConfig, run
from ncdrs.diagnostics import trailing_diameter
from ncdrs.model import Quadratic, Sphere


@dataclass
class Config:
    radius: float = 1.0
    gamma: float = 0.5
    tol: float = 1e-14
    budgets: tuple = (10, 20, 40, 80)


def main(cfg: Config = Config()) -> None:
    spec = ProblemSpec(Quadratic(np.eye(2), np.zeros(2)), Sphere(cfg.radius), 2, init=np.array([3.0, 4.0]))
    for budget in cfg.budgets:
        t = run(spec, "nc-drs", RunConfig(gamma=cfg.gamma, tol=cfg.tol, max_iter=budget))
        print(
            f"max_iter={budget:3d} {t.classification:18s} last step {t.rows[-1].step_norm:.2e} "
            f"trailing diameter {trailing_diameter(t.z_history):.2e} best {t.best_value:.6f}"
        )


if __name__ == "__main__":
    main()
