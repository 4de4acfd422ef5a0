"""
Experiment orchestration: build instances, run seeded solvers, aggregate
traces across seeds and evaluate convergence bounds against recorded rows.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import algorithms as alg
from . import problems as pb
from . import schedules as sch
from .core import PairVector
from .errors import ConfigurationError, DivergenceError
from .trace import RecordOptions, RunTrace

PROBLEM_FAMILIES = ("quadratic", "bilinear", "mspbe", "robust_ls")
ALGORITHM_NAMES = ("agog", "sagog", "ogda", "seg", "agog_direct", "nesterov",
                   "bilinear_agog", "bilinear_sagog")
RESTART_MODES = ("none", "fixed", "theory", "doubling")


# ---------------------------------------------------------------------------
# instance construction


def build_problem(cfg: dict, seed: int):
    """Instance described by a ``problem`` config section.

    ``cfg["seed"]`` pins the instance; when absent the run seed is used so
    that every seed sees a fresh instance.
    """
    fam = cfg.get("family", "quadratic")
    s = int(cfg.get("seed", seed))
    if fam == "quadratic":
        n = int(cfg["n"])
        m = int(cfg.get("m", n))
        b1 = b2 = None
        off = float(cfg.get("offset_scale", 0.0))
        if off:
            r = np.random.default_rng([s, 0xB1])
            b1, b2 = off * r.standard_normal(n), off * r.standard_normal(m)
        spec = pb.QuadraticGameSpec.from_constants(
            n, m, L_f=cfg["L_f"], mu_f=cfg["mu_f"], L_g=cfg["L_g"], mu_g=cfg["mu_g"],
            L_H=cfg["L_H"], mu_H=cfg.get("mu_H"), seed=s, b1=b1, b2=b2)
        oracle = pb.make_quadratic_game(spec)
    elif fam == "bilinear":
        n = int(cfg["n"])
        lr = cfg.get("lambda_range", [1.0, 1.0])
        off = float(cfg.get("offset_scale", 0.0))
        r = np.random.default_rng([s, 0xB2])
        u_x = off * r.standard_normal(n) if off else None
        u_y = off * r.standard_normal(n) if off else None
        oracle = pb.make_bilinear_game(pb.BilinearGameSpec(n=n, lambda_range=lr, u_x=u_x,
                                                           u_y=u_y, seed=s))
    elif fam == "mspbe":
        oracle = pb.make_mspbe(int(cfg["n_states"]), int(cfg["feature_dim"]),
                               float(cfg.get("gamma", 0.9)), seed=s,
                               mu=float(cfg.get("reg_mu", 1.0)))
    elif fam == "robust_ls":
        oracle = pb.make_robust_ls(int(cfg["n"]), int(cfg.get("m", cfg["n"])),
                                   float(cfg["rho"]), float(cfg.get("R", 1.0)), seed=s)
    else:
        raise ConfigurationError(f"problem.family: unknown family {fam!r}")
    eps = cfg.get("csc_eps")
    if eps:
        oracle = alg.regularize_csc(oracle, float(eps))
    return oracle


def initial_point(oracle, z0_cfg, seed: int) -> PairVector:
    """``run.z0``: ``"unit"`` (random unit vector), ``"unit_offset"`` (``z*`` plus
    a random unit vector), ``"zeros"`` or an explicit list of ``n + m`` numbers."""
    d = oracle.dim
    if isinstance(z0_cfg, (list, tuple)):
        if len(z0_cfg) != d:
            raise ConfigurationError(f"run.z0 has {len(z0_cfg)} entries, expected {d}")
        return PairVector.from_flat(np.array(z0_cfg, dtype=float), oracle.n)
    if z0_cfg == "zeros":
        return PairVector.zeros(oracle.n, oracle.m)
    u = np.random.default_rng([int(seed), 0x20]).standard_normal(d)
    u /= np.linalg.norm(u)
    if z0_cfg == "unit":
        return PairVector.from_flat(u, oracle.n)
    if z0_cfg == "unit_offset":
        if oracle.optimum is None:
            raise ConfigurationError("run.z0 = 'unit_offset' needs a known optimum")
        return PairVector.from_flat(oracle.optimum.flat + u, oracle.n)
    raise ConfigurationError(f"run.z0: unknown initialization {z0_cfg!r}")


# ---------------------------------------------------------------------------
# experiment spec


@dataclass
class ExperimentSpec:
    """One algorithm on one problem family over a list of seeds.

    ``K`` counts iterations (summed over epochs for restarted runs);
    ``budget`` counts gradient queries on the coupling oracle, the x-axis of
    every trace.  Exactly one of them is set.
    """

    problem: dict
    algorithm: dict
    seeds: Sequence[int] = (0,)
    K: Optional[int] = None
    budget: Optional[int] = None
    noise: Optional[dict] = None
    record_every: int = 1
    z0: object = "unit"
    gap: bool = False
    timing: bool = False
    threads: int = 1
    config_hash: str = ""

    def __post_init__(self):
        seeds = [int(s) for s in self.seeds]
        if not seeds:
            raise ConfigurationError("run.seeds must be non-empty")
        if len(set(seeds)) != len(seeds):
            raise ConfigurationError("run.seeds must be distinct")
        if any(s < 0 for s in seeds):
            raise ConfigurationError("run.seeds must be nonnegative")
        self.seeds = seeds
        if self.record_every < 1:
            raise ConfigurationError("run.record_every must be >= 1")
        if (self.K is None) == (self.budget is None):
            raise ConfigurationError("set exactly one of run.K and run.budget")
        if self.K is not None and self.K < 1:
            raise ConfigurationError("run.K must be >= 1")
        if self.budget is not None and self.budget < 2:
            raise ConfigurationError("run.budget must be >= 2")
        name = self.algorithm.get("name")
        if name not in ALGORITHM_NAMES:
            raise ConfigurationError(f"algorithm.name: unknown algorithm {name!r}")
        mode = self.restart_mode
        if mode not in RESTART_MODES:
            raise ConfigurationError(f"algorithm.restart.mode: unknown mode {mode!r}")
        if self.threads < 1:
            raise ConfigurationError("run.threads must be >= 1")

    @property
    def restart_mode(self) -> str:
        return (self.algorithm.get("restart") or {}).get("mode", "none")

    @property
    def label(self) -> str:
        if self.algorithm.get("label"):
            return self.algorithm["label"]
        name = self.algorithm["name"]
        return name if self.restart_mode == "none" else f"{name}_restart"


def _noise_model(noise: Optional[dict]):
    if not noise:
        return None
    return pb.NoiseModel(kind=noise.get("kind", "additive"),
                         sigma_H=float(noise.get("sigma_H", 0.0)),
                         sigma_F=float(noise.get("sigma_F", 0.0)),
                         seed=int(noise.get("seed", 0)))


def _iterations(spec: ExperimentSpec, per_iter: int, setup: int) -> int:
    """Iteration count for a single-loop run from ``K`` or the query budget."""
    if spec.K is not None:
        return spec.K
    K = (spec.budget - setup) // per_iter
    if K < 1:
        raise ConfigurationError("run.budget too small for one iteration")
    return K


def _restart_budget(spec: ExperimentSpec) -> dict:
    return dict(budget=spec.budget) if spec.budget is not None else dict(max_iters=spec.K)


def _dispatch(spec: ExperimentSpec, oracle, z0: PairVector, rec: RecordOptions):
    a = spec.algorithm
    name = a["name"]
    mode = spec.restart_mode
    restart = a.get("restart") or {}
    period = restart.get("period")
    scaling = bool(a.get("scaling", False))
    if name == "agog" and mode in ("fixed", "theory"):
        kw = _restart_budget(spec)
        return alg.agog_restart_run(
            oracle, z0, a.get("target_sq"), n_epochs=a.get("n_epochs"),
            epoch_len=period if mode == "fixed" else None, scaling=scaling, record=rec, **kw)
    if name == "sagog" and mode != "none":
        if mode == "theory":
            raise ConfigurationError("algorithm.restart.mode: sagog restarts are 'fixed' or "
                                     "'doubling'")
        return alg.sagog_restart_run(
            oracle, z0, spec.budget, restart="fixed" if mode == "fixed" else "doubling",
            period=period, gamma0=a.get("gamma0"), stepsize=a.get("stepsize", "sagog"),
            scaling=scaling, record=rec, max_iters=spec.K)
    if name == "bilinear_agog" and mode != "none":
        return alg.bilinear_agog_restart_run(
            oracle, z0, a.get("target_sq"), n_epochs=a.get("n_epochs"),
            epoch_len=period if mode == "fixed" else None, record=rec, **_restart_budget(spec))
    if mode != "none" and name != "seg":
        raise ConfigurationError(f"algorithm.restart: {name} does not support restarting")
    if name == "agog":
        return alg.agog_run(oracle, z0, _iterations(spec, 1, 1), scaling=scaling, record=rec)
    if name == "sagog":
        return alg.sagog_run(oracle, z0, _iterations(spec, 1, 1), gamma0=a.get("gamma0"),
                             stepsize=a.get("stepsize", "sagog"), scaling=scaling, record=rec)
    if name == "ogda":
        return alg.ogda_run(oracle, z0, _iterations(spec, 1, 1), eta=a.get("eta"), record=rec)
    if name == "seg":
        every = None
        if mode == "fixed":
            every = int(period)
        elif mode != "none":
            raise ConfigurationError("algorithm.restart.mode: seg restarts are 'fixed' only")
        return alg.seg_run(oracle, z0, _iterations(spec, 2, 0), restart_every=every,
                           eta=a.get("eta"), record=rec)
    if name == "agog_direct":
        return alg.agog_direct_run(oracle, z0, _iterations(spec, 1, 1),
                                   scaling=a.get("scaling"),
                                   averaging=a.get("averaging", "constant"), record=rec)
    if name == "nesterov":
        return alg.nesterov_run(oracle, z0, _iterations(spec, 1, 0), eta=a.get("eta"),
                                record=rec)
    if name == "bilinear_agog":
        return alg.bilinear_agog_run(oracle, z0, _iterations(spec, 1, 1), record=rec)
    if name == "bilinear_sagog":
        return alg.bilinear_sagog_run(oracle, z0, _iterations(spec, 1, 1),
                                      beta=float(a.get("beta", 1.0)), record=rec)
    raise ConfigurationError(f"algorithm.name: unknown algorithm {name!r}")


def run_single(spec: ExperimentSpec, seed: int) -> RunTrace:
    """One seeded run; raises :class:`DivergenceError` carrying the partial trace."""
    oracle = build_problem(spec.problem, seed)
    noise = _noise_model(spec.noise)
    if noise is not None:
        oracle = pb.wrap_stochastic(oracle, noise, stream=seed)
    z0 = initial_point(oracle, spec.z0, seed)
    rec = RecordOptions(record_every=spec.record_every, gap=spec.gap, timing=spec.timing,
                        algorithm=spec.label, problem=spec.problem.get("family", "quadratic"),
                        seed=seed)
    try:
        res = _dispatch(spec, oracle, z0, rec)
    except DivergenceError as err:
        if err.result is not None:
            err.result.trace.metadata.update(config_hash=spec.config_hash, seed=seed)
        raise
    md = res.trace.metadata
    md.update(config_hash=spec.config_hash, seed=seed, K=spec.K, budget=spec.budget,
              epochs=res.epochs)
    md.pop("schedule", None)
    return res.trace


def run_experiment(spec: ExperimentSpec) -> List[RunTrace]:
    """One trace per seed, in seed order; deterministic per seed."""
    if spec.threads == 1 or len(spec.seeds) == 1:
        return [run_single(spec, s) for s in spec.seeds]
    with ThreadPoolExecutor(max_workers=spec.threads) as pool:
        futures = [pool.submit(run_single, spec, s) for s in spec.seeds]
        return [f.result() for f in futures]


# ---------------------------------------------------------------------------
# aggregation


@dataclass
class Aggregate:
    """Per-grid-point statistics of ``sq_dist`` across seeds."""

    algorithm: str
    grid: np.ndarray
    mean: np.ndarray
    median: np.ndarray
    min: np.ndarray
    max: np.ndarray
    n_seeds: int
    seeds: List[int] = field(default_factory=list)

    def at(self, h_calls: int) -> Dict[str, float]:
        i = int(np.searchsorted(self.grid, h_calls, side="right")) - 1
        if i < 0:
            raise ValueError(f"{h_calls} lies before the first grid point {self.grid[0]}")
        return dict(mean=self.mean[i], median=self.median[i], min=self.min[i], max=self.max[i])


def carry_forward(trace: RunTrace, grid: np.ndarray) -> np.ndarray:
    """Value of the last row at or before each grid point (never interpolated)."""
    x = trace.column("h_calls")
    y = trace.column("sq_dist")
    idx = np.searchsorted(x, grid, side="right") - 1
    if np.any(idx < 0):
        raise ValueError("grid point precedes the first recorded row")
    return y[idx]


def common_grid(traces: Sequence[RunTrace]) -> np.ndarray:
    """Coarsest query grid among ``traces`` restricted to their shared range."""
    lo = max(t.rows[0].h_calls for t in traces)
    hi = min(t.rows[-1].h_calls for t in traces)
    best = None
    for t in traces:
        g = t.column("h_calls")
        g = g[(g >= lo) & (g <= hi)]
        if best is None or g.size < best.size:
            best = g
    if best is None or best.size == 0:
        best = np.array([hi], dtype=float)
    if best[-1] != hi:
        best = np.append(best, hi)
    return best


def aggregate(traces: Sequence[RunTrace], grid: Optional[np.ndarray] = None) -> Aggregate:
    """Mean, median, min and max of ``sq_dist`` across traces on a shared grid."""
    traces = [t for t in traces if len(t.rows)]
    if not traces:
        raise ValueError("aggregate needs at least one non-empty trace")
    if grid is None:
        grid = common_grid(traces)
    vals = np.vstack([carry_forward(t, grid) for t in traces])
    names = sorted({t.algorithm for t in traces})
    return Aggregate(algorithm=",".join(names), grid=np.asarray(grid, dtype=float),
                     mean=vals.mean(axis=0), median=np.median(vals, axis=0),
                     min=vals.min(axis=0), max=vals.max(axis=0), n_seeds=len(traces),
                     seeds=sorted({t.seed for t in traces}))


def compare(groups: Dict[str, Sequence[RunTrace]]) -> List[Aggregate]:
    """Aggregate several algorithms on one common gradient-query grid."""
    flat = [t for ts in groups.values() for t in ts if len(t.rows)]
    if not flat:
        raise ValueError("nothing to compare")
    grid = common_grid(flat)
    out = []
    for name, ts in groups.items():
        agg = aggregate(ts, grid)
        agg.algorithm = name
        out.append(agg)
    return out


def aggregate_rows(aggs: Sequence[Aggregate]) -> List[dict]:
    """Wide table: one row per grid point, five columns per algorithm."""
    rows = []
    grid = aggs[0].grid
    for i, g in enumerate(grid):
        row = {"h_calls": int(g)}
        for a in aggs:
            row[f"{a.algorithm}_mean"] = float(a.mean[i])
            row[f"{a.algorithm}_median"] = float(a.median[i])
            row[f"{a.algorithm}_min"] = float(a.min[i])
            row[f"{a.algorithm}_max"] = float(a.max[i])
            row[f"{a.algorithm}_n_seeds"] = a.n_seeds
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# bound checks

BOUND_RTOL = 1e-9


@dataclass
class BoundReport:
    bound: str
    max_ratio: float
    n_checked: int
    violations: List[dict]

    @property
    def passed(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return dict(bound=self.bound, max_ratio=self.max_ratio, n_checked=self.n_checked,
                    violations=self.violations, passed=self.passed)


def _epoch_offsets(trace: RunTrace):
    """Start iteration and starting metric of every epoch, keyed by epoch index."""
    eps = trace.metadata.get("epochs") or []
    out, it = {}, 0
    for e in eps:
        out[e["epoch"]] = (it, e["metric_start"])
        it += e["K"]
    return out


def check_bounds(trace: RunTrace, instance, bound: str, *, scaling: bool = False,
                 y_ratio: Optional[float] = None) -> BoundReport:
    """Compare every recorded row with a convergence bound.

    ``agog_rate``: deterministic AG-OG rate in the (possibly rescaled) metric.
    ``bilinear_rate``: bilinear rate ``64 kappa / (K+1)^2``.
    ``iterate_ball``: integer iterates stay in the initial ball; uses the running
    maximum over every iteration, not just recorded ones.
    Rows violating the bound by more than ``1e-9`` relative are listed.
    """
    if instance.optimum is None:
        raise ConfigurationError("check_bounds needs an instance with a known optimum")
    ex = trace.extras or {}
    sq0 = trace.metadata.get("metric0")
    if bound == "iterate_ball":
        mz = trace.metadata.get("max_metric_z")
        if mz is None or sq0 is None:
            raise ConfigurationError("trace lacks the iterate-distance record iterate_ball needs")
        ratio = math.sqrt(mz / sq0) if sq0 > 0 else 0.0
        viol = [] if ratio <= 1.0 + 1e-10 else [dict(iter=None, ratio=ratio)]
        return BoundReport("iterate_ball", ratio, 1, viol)
    metric = ex.get("metric_ag")
    if not metric or len(metric) != len(trace.rows):
        metric = [r.sq_dist for r in trace.rows]
    offsets = _epoch_offsets(trace)
    if bound == "agog_rate":
        base = sch.agog_schedule(instance.constants, scaling=scaling)
        L, mu, L_H = base.L, base.mu, base.L_H
        if mu <= 0:
            raise ConfigurationError("agog_rate needs mu > 0")

        def limit(K, s0):
            return sch.agog_rate_bound(K, L, mu, L_H, s0)
    elif bound == "bilinear_rate":
        d = instance.data
        if "lambda_min" not in d:
            raise ConfigurationError("bilinear_rate needs a bilinear instance")

        def limit(K, s0):
            return sch.bilinear_rate_bound(K, d["lambda_max"], d["lambda_min"], s0)
    else:
        raise ConfigurationError(f"unknown bound {bound!r}")
    worst, viol = 0.0, []
    for r, v in zip(trace.rows, metric):
        it0, s0 = offsets.get(r.epoch, (0, sq0))
        if s0 is None:
            s0 = trace.metadata.get("sq_dist0")
        K = r.iter - it0
        b = limit(K, s0)
        ratio = v / b if b > 0 else (0.0 if v == 0 else math.inf)
        worst = max(worst, ratio)
        if v > b * (1.0 + BOUND_RTOL):
            viol.append(dict(iter=r.iter, epoch=r.epoch, value=v, bound=b, ratio=ratio))
    return BoundReport(bound, worst, len(trace.rows), viol)
