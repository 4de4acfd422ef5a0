"""Two applied saddle problems solved to high accuracy.

* Policy evaluation: the regularized projected Bellman error of a random
  Markov chain, written as a saddle problem over value weights and a dual
  correction.
* Robust least squares: a regression whose observations are perturbed
  adversarially within a quadratic penalty.

Restarted AG-OG runs until the squared distance to the exact saddle point is
below 1e-12 and the iterate is compared with the closed-form solution.

    python demos/04_applications.py
"""

import numpy as np

from agog import algorithms as alg
from agog import problems as pb
from agog.core import PairVector


def solve(name, o):
    z0 = PairVector.zeros(o.n, o.m)
    res = alg.agog_restart_run(o, z0, 1e-12 * max(1.0, float(o.optimum.flat @ o.optimum.flat)))
    err = np.linalg.norm(res.final_ag.flat - o.optimum.flat)
    c = o.constants
    print(f"{name}: n={o.n}, m={o.m}, L={c.L:.3g}, mu={c.mu:.3g}, L_H={c.L_H:.3g}; "
          f"{len(res.epochs)} epochs, {res.counters.h_calls} coupling calls, "
          f"|z - z*| = {err:.2e}")


def main():
    solve("policy evaluation", pb.make_mspbe(n_states=30, feature_dim=8, gamma=0.9, seed=0,
                                             mu=0.1))
    solve("robust least squares", pb.make_robust_ls(n=20, m=40, rho=2.0, R=0.5, seed=0))


if __name__ == "__main__":
    main()
