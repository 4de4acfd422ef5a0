"""
Self-contained invariant checks with fixed seeds.

Each suite returns a list of :class:`Check` records carrying the measured
quantities, so ``agog verify`` can emit a machine-readable report.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List

import numpy as np

from . import algorithms as alg
from . import problems as pb
from . import schedules as sch
from .core import CallCounter, PairVector, gap_V
from .harness import check_bounds
from .trace import RecordOptions

IDENTITY_TOL = 1e-12
BATTERY_SIZE = 20
BATTERY_DIM = 50
BATTERY_K = 10_000
BOUND_KS = (10, 100, 1_000, 10_000)


@dataclass
class Check:
    id: str
    name: str
    passed: bool
    measured: Dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# seeded instance batteries


def sc_instance(seed: int, n: int = BATTERY_DIM):
    """Strongly-convex-strongly-concave quadratic game with ``mu_f = mu_g``.

    Smoothness constants are drawn log-uniformly (``L_f, L_g`` in [1, 100],
    ``L_H`` in [0.1, 10]) and random linear terms move ``z*`` off the origin.
    """
    r = np.random.default_rng([seed, 0x5C])
    mu = 1.0
    L_f, L_g = np.exp(r.uniform(0, math.log(100), size=2))
    L_H = math.exp(r.uniform(math.log(0.1), math.log(10)))
    spec = pb.QuadraticGameSpec.from_constants(
        n, n, L_f=L_f, mu_f=mu, L_g=L_g, mu_g=mu, L_H=L_H, mu_H=0.1 * L_H, seed=seed,
        b1=r.standard_normal(n), b2=r.standard_normal(n))
    return pb.make_quadratic_game(spec)


def unit_offset(oracle, seed: int) -> PairVector:
    u = np.random.default_rng([seed, 0x20]).standard_normal(oracle.dim)
    return PairVector.from_flat(oracle.optimum.flat + u / np.linalg.norm(u), oracle.n)


def bilinear_instance(seed: int, n: int = 10, kappa: float = 100.0):
    r = np.random.default_rng([seed, 0xB2])
    spec = pb.BilinearGameSpec(n=n, lambda_range=(1.0 / kappa, 1.0), u_x=r.standard_normal(n),
                               u_y=r.standard_normal(n), seed=seed)
    return pb.make_bilinear_game(spec)


def battery_runs(count: int = BATTERY_SIZE, K: int = BATTERY_K):
    """One AG-OG run of length ``K`` per battery instance, rows at ``BOUND_KS``."""
    out = []
    for s in range(count):
        o = sc_instance(s)
        res = alg.agog_run(o, unit_offset(o, s), K, record=RecordOptions(record_every=10))
        idx = [i for i, r in enumerate(res.trace.rows) if r.iter in BOUND_KS]
        res.trace.rows = [res.trace.rows[i] for i in idx]
        res.trace.extras = {k: [v[i] for i in idx] for k, v in res.trace.extras.items()}
        out.append((o, res))
    return out


# ---------------------------------------------------------------------------
# suites


def suite_bounds(count: int = BATTERY_SIZE, K: int = BATTERY_K) -> List[Check]:
    checks = []
    runs = battery_runs(count, K)
    ball_ratios, ratios_32, viol_32 = [], [], 0
    for o, res in runs:
        ball_ratios.append(check_bounds(res.trace, o, "iterate_ball").max_ratio)
        rep = check_bounds(res.trace, o, "agog_rate")
        ratios_32.append(rep.max_ratio)
        viol_32 += len(rep.violations)
    checks.append(Check("I1", "integer iterates stay in the initial ball",
                        max(ball_ratios) <= 1.0 + 1e-10,
                        dict(max_ratio=max(ball_ratios), instances=count, K=K)))
    checks.append(Check("I2", "deterministic rate bound at K = 10, 1e2, 1e3, 1e4", viol_32 == 0,
                        dict(max_ratio=max(ratios_32), violations=viol_32, instances=count)))

    worst, viol = 0.0, 0
    for s in range(5):
        o = bilinear_instance(s)
        res = alg.bilinear_agog_run(o, PairVector.zeros(o.n, o.m), 2000)
        rep = check_bounds(res.trace, o, "bilinear_rate")
        worst = max(worst, rep.max_ratio)
        viol += len(rep.violations)
    checks.append(Check("I7", "bilinear rate bound at every K", viol == 0,
                        dict(max_ratio=worst, violations=viol, instances=5, K=2000)))

    worst_gap = math.inf
    for s in range(3):
        o = sc_instance(s, n=10)
        rng = np.random.default_rng([s, 0x6A])
        zs = o.optimum
        mu = o.constants.mu
        for _ in range(1000):
            z = PairVector.from_flat(zs.flat + rng.standard_normal(o.dim) * rng.uniform(0, 3), o.n)
            d = z.flat - zs.flat
            worst_gap = min(worst_gap, gap_V(o, z, zs) - 0.5 * mu * float(d @ d))
    checks.append(Check("I10", "gap dominates (mu/2) squared distance", worst_gap >= -1e-9,
                        dict(min_slack=worst_gap, points=3000)))
    return checks


def _max_diff(a: List[np.ndarray], b: List[np.ndarray]) -> float:
    if len(a) != len(b):
        return math.inf
    return max(float(np.max(np.abs(x - y)) / max(1.0, float(np.max(np.abs(y)))))
               for x, y in zip(a, b))


def _collect(*names) -> Callable:
    store = {n: [] for n in names}

    def cb(state):
        for n in names:
            store[n].append(np.array(getattr(state, n)))

    cb.store = store
    return cb


def suite_reductions(K: int = 100) -> List[Check]:
    checks = []
    # H = 0: AG-OG against Nesterov's second scheme
    spec = pb.QuadraticGameSpec(n=8, m=8, A1_eigs=(0.5, 20.0), A3_eigs=(0.5, 30.0),
                                A2_sq_eigs=(0.0, 0.0), seed=3, b1=np.ones(8), b2=-np.ones(8))
    o = pb.make_quadratic_game(spec)
    z0 = unit_offset(o, 0)
    c1, c2 = _collect("z", "z_ag"), _collect("z", "z_ag")
    alg.agog_run(o, z0, K, callback=c1)
    alg.nesterov_run(o, z0, K, callback=c2)
    d = max(_max_diff(c1.store["z"], c2.store["z"]), _max_diff(c1.store["z_ag"], c2.store["z_ag"]))
    checks.append(Check("I3", "no coupling: iterates match Nesterov's second scheme",
                        d <= IDENTITY_TOL, dict(max_rel_diff=d, K=K)))

    # grad F = 0: AG-OG against past-extragradient OGDA with the same stepsizes
    o = bilinear_instance(1, n=6)
    z0 = PairVector.from_flat(np.random.default_rng(4).standard_normal(12), 6)
    sched = sch.agog_schedule(o.constants)
    c1, c2 = _collect("z", "z_half"), _collect("z", "z_half")
    alg.agog_run(o, z0, K, sched, callback=c1)
    alg.ogda_run(o, z0, K, eta=sched.eta, callback=c2)
    d = max(_max_diff(c1.store["z"], c2.store["z"]),
            _max_diff(c1.store["z_half"], c2.store["z_half"]))
    checks.append(Check("I4", "no individual part: iterates match OGDA", d <= IDENTITY_TOL,
                        dict(max_rel_diff=d, K=K)))

    # two-stepsize block against single-stepsize run on rescaled coordinates
    spec = pb.QuadraticGameSpec.from_constants(8, 6, L_f=64, mu_f=1, L_g=1, mu_g=1 / 64,
                                               L_H=1, mu_H=0.2, seed=5, b1=np.ones(8),
                                               b2=np.ones(6))
    o = pb.make_quadratic_game(spec)
    z0 = unit_offset(o, 1)
    s = math.sqrt(o.constants.mu_g / o.constants.mu_f)
    ob = pb.rescale_y(o, s)
    c1, c2 = _collect("z", "z_ag"), _collect("z", "z_ag")
    alg.agog_run(o, z0, K, scaling=True, callback=c1)
    alg.agog_run(ob, PairVector(z0.x, s * z0.y), K, callback=c2)
    t = np.concatenate([np.ones(o.n), np.full(o.m, 1.0 / s)])
    d = max(_max_diff(c1.store["z"], [t * v for v in c2.store["z"]]),
            _max_diff(c1.store["z_ag"], [t * v for v in c2.store["z_ag"]]))
    checks.append(Check("I5", "scaled run equals the two-stepsize update", d <= IDENTITY_TOL,
                        dict(max_rel_diff=d, K=K, y_ratio=o.constants.mu_f / o.constants.mu_g)))

    checks.append(_zero_noise_check())
    return checks


def _zero_noise_check(K: int = 200) -> Check:
    o = sc_instance(7, n=10)
    z0 = unit_offset(o, 7)
    so = pb.wrap_stochastic(o, pb.NoiseModel("additive", 0.0, 0.0, seed=11), stream=3)
    a = alg.sagog_run(so, z0, K)
    sched = sch.sagog_schedule(o.constants, 0.0, K)
    b = alg.agog_run(o, z0, K, sched)
    same = a.trace.rows == b.trace.rows and np.array_equal(a.final_ag.flat, b.final_ag.flat)
    return Check("I9", "zero noise reproduces the deterministic run bitwise", bool(same),
                 dict(K=K, D=sched.D))


def suite_accounting(K: int = 37) -> List[Check]:
    o = sc_instance(2, n=10)
    z0 = unit_offset(o, 2)
    so = pb.wrap_stochastic(o, pb.NoiseModel("additive", 0.1, 0.1), stream=0)
    checks = []
    cases = [
        ("agog", alg.agog_run(o, z0, K).counters, (K + 1, K)),
        ("sagog", alg.sagog_run(so, z0, K).counters, (K + 1, K)),
        ("ogda", alg.ogda_run(o, z0, K).counters, (K + 1, K + 1)),
        ("seg", alg.seg_run(o, z0, K).counters, (2 * K, 2 * K)),
    ]
    r = alg.agog_restart_run(o, z0, n_epochs=3, epoch_len=K)
    cases.append(("agog_restart", r.counters, (3 * K + 3, 3 * K)))
    for name, c, (h, f) in cases:
        checks.append(Check("I6", f"{name}: coupling and individual oracle calls",
                            (c.h_calls, c.f_calls) == (h, f),
                            dict(K=K, h_calls=c.h_calls, f_calls=c.f_calls,
                                 expected_h=h, expected_f=f)))
    return checks


def suite_stochastic(K: int = 300) -> List[Check]:
    o = sc_instance(4, n=10)
    z0 = unit_offset(o, 4)
    checks = []
    for kind in ("additive", "matrix_perturbation"):
        noise = pb.NoiseModel(kind, 0.1, 0.1, seed=5)
        a = alg.sagog_run(pb.wrap_stochastic(o, noise, 2), z0, K)
        b = alg.sagog_run(pb.wrap_stochastic(o, noise, 2), z0, K)
        c = alg.sagog_run(pb.wrap_stochastic(o, noise, 3), z0, K)
        checks.append(Check("I8", f"{kind}: same seed gives a bit-identical trace",
                             a.trace.same_rows(b.trace) and not a.trace.rows == c.trace.rows,
                             dict(K=K, other_seed_differs=a.trace.rows != c.trace.rows)))
    checks.append(_zero_noise_check())

    # empirical mean of noisy coupling evaluations at a fixed point
    noise = pb.NoiseModel("additive", 1.0, 1.0, seed=9)
    so = pb.wrap_stochastic(o, noise, 0)
    z = z0.flat
    N = 4000
    cnt = CallCounter()
    hs = np.array([so.H(z, cnt) for _ in range(N)])
    fs = np.array([so.gradF(z, cnt) for _ in range(N)])
    dev_h = float(np.linalg.norm(hs.mean(axis=0) - o.H(z)))
    dev_f = float(np.linalg.norm(fs.mean(axis=0) - o.gradF(z)))
    # sigma / sqrt(N) is the rms deviation of the mean; allow 4x
    lim = 4.0 / math.sqrt(N)
    checks.append(Check("unbiased", "noisy oracles average to the exact ones",
                        dev_h <= lim and dev_f <= lim,
                        dict(dev_H=dev_h, dev_F=dev_f, limit=lim, samples=N)))
    return checks


SUITES = {
    "bounds": suite_bounds,
    "reductions": suite_reductions,
    "accounting": suite_accounting,
    "stochastic": suite_stochastic,
}


def run_suite(name: str) -> List[Check]:
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name]()
