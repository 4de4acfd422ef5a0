"""Noisy oracles: stochastic AG-OG against stochastic extragradient.

Uses the bundled ``fig3b`` setting (entrywise Gaussian perturbation of the
coupling and individual-gradient matrices) with fewer seeds and a smaller
budget, and prints mean, median and spread of the squared distance.

    python demos/03_stochastic_oracles.py [--seeds 5] [--budget 4000]
"""

import argparse
import dataclasses

from agog import harness
from agog.config import load, specs_from_config


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--budget", type=int, default=4000)
    args = ap.parse_args()

    specs = [dataclasses.replace(s, seeds=list(range(args.seeds)), budget=args.budget)
             for s in specs_from_config(load("fig3b"))]
    groups = {s.label: harness.run_experiment(s) for s in specs}
    for a in harness.compare(groups):
        print(f"{a.algorithm:>14}: at {int(a.grid[-1])} queries mean {a.mean[-1]:.3e}, "
              f"median {a.median[-1]:.3e}, range [{a.min[-1]:.2e}, {a.max[-1]:.2e}]")


if __name__ == "__main__":
    main()
