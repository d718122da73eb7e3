"""Run every algorithm on 1/2 (x - 0.6)^2 over {0, 1} and audit the NC-DRS run."""

from dataclasses import dataclass

from ncdrs import ProblemSpec, RunConfig, run
from ncdrs.diagnostics import audit_run, optimality_check
from ncdrs.model import ALGORITHMS, Boolean, Quadratic
from ncdrs.prox import ProxFn


@dataclass
class Config:
    center: float = 0.6
    gamma: float = 1.0
    tol: float = 1e-10
    z0: float = 0.0


def main(cfg: Config = Config()) -> None:
    spec = ProblemSpec(Quadratic.shift([cfg.center]), Boolean(), 1)
    rc = RunConfig(gamma=cfg.gamma, tol=cfg.tol, init=[cfg.z0])
    for kind in ALGORITHMS:
        t = run(spec, kind, rc)
        print(f"{kind:11s} {t.classification:18s} iters={t.iterations:4d} best={t.best_value:.6g} at {t.best_feasible} ({t.feasible_for})")

    trace = run(spec, "nc-drs", rc)
    z_star = trace.z_history[-1]
    audit = audit_run(trace, spec, z_star)
    x_star = ProxFn(spec.cost, 1).prox(cfg.gamma, z_star)
    report = optimality_check(x_star, spec)
    print(f"\nfixed point z* = {z_star[0]:.10f}, x* = prox(z*) = {x_star[0]:.10f}")
    print(f"radius {audit.radius:.6f}, min slack {audit.min_slack:.3e}, sum sigma^2 {audit.sigma_sq_sum}")
    print(f"optimality gap {report.gap:.3e} -> optimal={report.optimal}")


if __name__ == "__main__":
    main()
