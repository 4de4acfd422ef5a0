"""Iterations to reach a relative accuracy of 1e-8 on bilinear games.

For each condition number kappa of ``B^T B`` the restarted bilinear AG-OG and
OGDA are run until the squared distance to the saddle point drops below
``1e-8 |z*|^2``.  The fitted log-log slopes show the square-root dependence of
the accelerated method against the linear dependence of OGDA.

    python demos/02_bilinear_condition_sweep.py
"""

import numpy as np

from agog import algorithms as alg
from agog import problems as pb
from agog._kernels import ogda_iterations_to
from agog.core import PairVector
from agog.trace import RecordOptions


def instance(kappa):
    return pb.make_bilinear_game(pb.BilinearGameSpec(
        n=4, lambda_range=(1.0 / kappa, 1.0), seed=3,
        u_x=np.random.default_rng(5).standard_normal(4),
        u_y=np.random.default_rng(6).standard_normal(4)))


def main():
    kappas = [1e2, 1e3, 1e4, 1e5]
    rows = []
    for kappa in kappas:
        o = instance(kappa)
        zs = o.optimum.flat
        target = 1e-8 * float(zs @ zs)
        z0 = np.zeros(o.dim)
        r = alg.bilinear_agog_restart_run(o, PairVector.from_flat(z0, o.n), target,
                                          record=RecordOptions(stop_sq=target, record_every=100))
        it, sq = r.trace.column("iter"), r.trace.column("sq_dist")
        agog_it = int(it[np.argmax(sq <= target)])
        M, q = o.linear
        ogda_it = ogda_iterations_to(M, q, z0, zs, alg.ogda_eta(o.constants), target, 10**9)
        rows.append((kappa, agog_it, ogda_it))
        print(f"kappa {kappa:>8.0e}: restarted AG-OG {agog_it:>9} iterations, OGDA {ogda_it:>10}")
    k, a, g = (np.log(np.array(c, float)) for c in zip(*rows))
    print(f"log-log slope: restarted AG-OG {np.polyfit(k, a, 1)[0]:.2f}, "
          f"OGDA {np.polyfit(k, g, 1)[0]:.2f}")


if __name__ == "__main__":
    main()
