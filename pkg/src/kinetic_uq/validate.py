"""Fast self-checks behind the `validate` subcommand.

Each check prints one PASS/FAIL line; the count of failures is returned.
These are smoke-level invariants (conservation, estimator identities,
known quadrature values), not the full acceptance suite.
"""

import numpy as np

from .collision_ops import CollisionKernel, SpectralPlan, q_bgk, q_boltzmann_fast
from .equilibrium import maxwellian, moment_matched_maxwellian
from .phase_grid import VelocityGrid, compute_moments
from .uq_core import (CostModel, allocate_samples, lambda_star,
                      mscv_estimate_homogeneous, sample_z)
from .weno import weno5_derivative


def _check(name, ok, detail=""):
    tag = "PASS" if ok else "FAIL"
    suffix = f"  ({detail})" if detail else ""
    print(f"{tag}  {name}{suffix}")
    return 0 if ok else 1


def run_validation():
    failures = 0
    grid = VelocityGrid(32, 8.0)

    m = maxwellian(1.3, np.array([0.4, -0.2]), 1.2, grid)
    mom = compute_moments(m, grid)
    err = max(abs(mom.rho - 1.3), abs(mom.u[0] - 0.4), abs(mom.u[1] + 0.2),
              abs(mom.temperature - 1.2))
    failures += _check("maxwellian moments on resolved grid", err < 1e-8,
                       f"worst {err:.2e}")

    matched = moment_matched_maxwellian(
        (np.array([1.3]), np.array([0.4]), np.array([-0.2]),
         np.array([1.3 * (1.7 + 0.5 * 0.2)])), grid)[0]
    mm = compute_moments(matched, grid)
    err = max(abs(mm.rho - 1.3), abs(mm.u[0] - 0.4), abs(mm.u[1] + 0.2))
    failures += _check("moment matching residual", err < 1e-11, f"worst {err:.2e}")

    plan = SpectralPlan(VelocityGrid(16, 16.0), 4)
    kern = CollisionKernel(1.0)
    rng = np.random.default_rng(0)
    g = np.abs(rng.normal(size=(16, 16))) * maxwellian(1.0, np.zeros(2), 2.0, plan.grid)
    q = q_boltzmann_fast(g, g, kern, plan)
    mass = abs(q.sum() * plan.grid.cell_volume)
    failures += _check("spectral collision mass conservation", mass < 1e-8,
                       f"|mass(Q)| {mass:.2e}")

    qb = q_bgk(matched, 1.0, grid)
    failures += _check("bgk fixed point", float(np.max(np.abs(qb))) < 1e-12)

    x = np.linspace(0.0, 1.0, 64, endpoint=False)
    lin = 2.0 * x - 0.7
    d = weno5_derivative(lin, x[1] - x[0], +1, boundary="outflow")
    err = float(np.max(np.abs(d[3:-3] - 2.0)))
    failures += _check("weno5 exact on linear data", err < 1e-11, f"worst {err:.2e}")

    zs = sample_z(5, 123)
    failures += _check("sampling reproducible", np.array_equal(zs, sample_z(5, 123)))

    f_s = rng.normal(size=(40,))
    cv_s = 0.5 * f_s + 0.1 * rng.normal(size=(40,))
    est0 = mscv_estimate_homogeneous(f_s, cv_s, cv_s.mean(), "zero")
    failures += _check("lambda=0 reduces to plain Monte Carlo",
                       est0.value == np.mean(f_s))
    lam = lambda_star(f_s, np.full(40, 3.14))
    failures += _check("deterministic control variate guarded", lam == 0.0)

    cost = CostModel(n_v=32, n_angles=8)
    alloc = allocate_samples(cost, 10)
    failures += _check("cost allocation reference point", alloc == (1000, 819200),
                       f"got {alloc}")
    return failures
