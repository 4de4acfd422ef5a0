"""
Solver loops for separable minimax problems.

The workhorse is :func:`_agog_epoch`, one run of AcceleratedGradient-
OptimisticGradient from ``z_{-1/2} = z_ag_0 = z_0``.  Every iteration does

    z_md    = (1 - a_k) z_ag + a_k z
    z_half  = z - eta_k (H_prev + gradF(z_md))
    z_ag    = (1 - a_k) z_ag + a_k z_half
    H_half  = H(z_half)
    z       = z - eta_k (H_half + gradF(z_md))

with one fresh ``H`` and one fresh ``gradF`` evaluation; ``H_half`` is carried
over as the next ``H_prev``.  Deterministic, stochastic, restarted and bilinear
variants are thin drivers around this loop; OGDA, extragradient, AG-OG-Direct
and Nesterov's second scheme are provided as baselines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Union

import numpy as np

from . import schedules as sch
from .core import CallCounter, OracleBundle, PairVector, ProblemConstants
from .errors import ConfigurationError, DivergenceError
from .problems import StochasticOracle
from .trace import Recorder, RecordOptions, RunTrace, _Diverged, _Stop


@dataclass
class SolverState:
    """Iterates visible to a per-iteration callback (flat arrays)."""

    k: int
    z: np.ndarray
    z_ag: np.ndarray
    z_md: np.ndarray
    z_half: np.ndarray
    H_prev: np.ndarray
    counters: CallCounter


@dataclass
class RunResult:
    final_ag: PairVector
    final_z: PairVector
    trace: RunTrace
    counters: CallCounter
    epochs: List[dict] = field(default_factory=list)


def _as_flat(oracle, z0) -> np.ndarray:
    if isinstance(z0, PairVector):
        if (z0.n, z0.m) != (oracle.n, oracle.m):
            raise ConfigurationError(
                f"z0 blocks ({z0.n}, {z0.m}) do not match oracle ({oracle.n}, {oracle.m})")
        return z0.flat
    z = np.array(z0, dtype=float).reshape(-1)
    if z.size != oracle.n + oracle.m:
        raise ConfigurationError(f"z0 has {z.size} entries, expected {oracle.n + oracle.m}")
    return z


def _step_weights(oracle, y_ratio: float):
    if y_ratio == 1.0:
        return None
    return np.concatenate([np.ones(oracle.n), np.full(oracle.m, y_ratio)])


def _recorder(oracle, record: Optional[RecordOptions], algorithm: str, y_ratio: float = 1.0):
    opts = record if record is not None else RecordOptions()
    if not opts.algorithm:
        opts = RecordOptions(**{**opts.__dict__, "algorithm": algorithm})
    if not opts.problem:
        opts = RecordOptions(**{**opts.__dict__, "problem": getattr(oracle, "family", "")})
    return Recorder(oracle, opts, y_weight=1.0 / y_ratio)


def _result(oracle, rec: Recorder, z_out, z_int, counter, epochs=None, **meta) -> RunResult:
    tr = rec.trace
    tr.metadata.update(meta)
    tr.metadata.setdefault("mode", "benchmark" if oracle.optimum is not None else "blackbox")
    tr.metadata["max_metric_z"] = rec.max_metric_z
    tr.metadata["metric0"] = rec.metric0
    tr.metadata["sq_dist0"] = rec.sq0
    return RunResult(PairVector.from_flat(z_out, oracle.n), PairVector.from_flat(z_int, oracle.n),
                     tr, counter, epochs or [])


def _diverged(oracle, rec, err: _Diverged, z_out, z_int, counter, epochs=None):
    res = _result(oracle, rec, np.nan_to_num(z_out), np.nan_to_num(z_int), counter, epochs)
    return DivergenceError(f"{rec.trace.algorithm} diverged: {err.reason}", err.k, res)


# ---------------------------------------------------------------------------
# the AG-OG loop


def _agog_epoch(oracle, z0: np.ndarray, K: int, eta: Callable[[int], float], y_ratio: float,
                counter: CallCounter, rec: Recorder, epoch: int, it0: int,
                callback=None, record_end: bool = True, alpha: Optional[float] = None):
    """K iterations of AG-OG started at ``z_{-1/2} = z_ag = z = z0``.

    ``alpha`` fixes the averaging weight; by default it is ``2 / (k + 2)``.
    """
    w = _step_weights(oracle, y_ratio)
    z = z0.copy()
    z_ag = z0.copy()
    H_prev = oracle.H(z0, counter)
    try:
        for k in range(K):
            a = 2.0 / (k + 2) if alpha is None else alpha
            step = eta(k) if w is None else eta(k) * w
            z_md = (1.0 - a) * z_ag + a * z
            g = oracle.gradF(z_md, counter)
            z_half = z - step * (H_prev + g)
            z_ag = (1.0 - a) * z_ag + a * z_half
            H_half = oracle.H(z_half, counter)
            z = z - step * (H_half + g)
            if callback is not None:
                callback(SolverState(k, z, z_ag, z_md, z_half, H_prev, counter))
            H_prev = H_half
            rec.step(epoch, it0 + k + 1, counter, z_ag, z, force=record_end and k == K - 1)
    except _Stop as stop:
        stop.z_out, stop.z_int = z_ag, z
        raise
    return z_ag, z


def _check_K(K):
    if int(K) != K or K < 1:
        raise ConfigurationError(f"K must be a positive integer, got {K}")
    return int(K)


def agog_run(oracle: OracleBundle, z0, K: int, schedule: Optional[sch.ScheduleSet] = None, *,
             scaling: bool = False, record: Optional[RecordOptions] = None,
             callback=None, alpha: Optional[float] = None) -> RunResult:
    """Run AG-OG for ``K`` iterations and return ``z_ag_K``.

    Parameters
    ----------
    oracle : OracleBundle or StochasticOracle
    z0 : PairVector or array
    K : int
    schedule : ScheduleSet, optional
        Defaults to the deterministic schedule built from ``oracle.constants``;
        ``scaling=True`` uses the rescaled constants and two stepsizes.
    record : RecordOptions, optional
    callback : callable, optional
        Called with a :class:`SolverState` after every iteration.
    alpha : float, optional
        Constant averaging weight in place of ``2 / (k + 2)``.
    """
    K = _check_K(K)
    if schedule is None:
        schedule = sch.agog_schedule(oracle.constants, scaling=scaling)
    zf = _as_flat(oracle, z0)
    rec = _recorder(oracle, record, "agog", schedule.y_ratio)
    rec.start(zf)
    counter = CallCounter()
    z_ag = z = zf
    try:
        z_ag, z = _agog_epoch(oracle, zf, K, schedule.eta, schedule.y_ratio, counter, rec, 0, 0,
                              callback, alpha=alpha)
    except _Diverged as e:
        raise _diverged(oracle, rec, e, z_ag, z, counter) from None
    except _Stop as stop:
        z_ag, z = stop.z_out, stop.z_int
    return _result(oracle, rec, z_ag, z, counter, schedule=schedule)


def _epoch_sizes(epoch_len: int, n_epochs: Optional[int], budget: Optional[int],
                 max_iters: Optional[int] = None):
    """Yield epoch lengths for a fixed period.

    Stops after ``n_epochs`` epochs, when the coupling-call ``budget`` is spent
    (an epoch of length K costs K + 1 calls) or after ``max_iters`` iterations;
    the last epoch is truncated to whatever remains.
    """
    used = 0
    iters = 0
    e = 0
    while True:
        if n_epochs is not None and e >= n_epochs:
            return
        K = epoch_len
        if budget is not None:
            left = budget - used
            if left < 2:
                return
            K = min(K, left - 1)
        if max_iters is not None:
            if iters >= max_iters:
                return
            K = min(K, max_iters - iters)
        yield K
        used += K + 1
        iters += K
        e += 1


def _restart_driver(oracle, zf, sizes, eta_for_epoch, y_ratio, rec, counter, callback=None):
    """Warm-started epochs: each re-initializes z_{-1/2} = z_ag = z = previous output."""
    epochs = []
    z_out = z_int = zf
    it = 0
    for e, K in enumerate(sizes):
        before = rec.metric(z_out)
        eta = eta_for_epoch(e, K, z_out)
        try:
            z_out, z_int = _agog_epoch(oracle, z_out, K, eta, y_ratio, counter, rec, e, it, callback)
        except _Diverged as err:
            raise _diverged(oracle, rec, err, z_out, z_int, counter, epochs) from None
        except _Stop as stop:
            epochs.append(dict(epoch=e, K=rec.last_finite - it, metric_start=before,
                               metric_end=rec.metric(stop.z_out), stopped=True))
            return stop.z_out, stop.z_int, epochs
        it += K
        epochs.append(dict(epoch=e, K=K, metric_start=before, metric_end=rec.metric(z_out)))
    return z_out, z_int, epochs


def agog_restart_run(oracle: OracleBundle, z0, target_sq: Optional[float] = None, *,
                     n_epochs: Optional[int] = None, epoch_len: Optional[int] = None,
                     budget: Optional[int] = None, max_iters: Optional[int] = None,
                     schedule: Optional[sch.ScheduleSet] = None, scaling: bool = False,
                     record: Optional[RecordOptions] = None, callback=None) -> RunResult:
    """AG-OG with scheduled restarting.

    Theory mode (default): ``epoch_len`` comes from :func:`schedules.epoch_length`
    and, when the optimum is known, ``n_epochs = epoch_count(sq_dist0, target_sq)``
    so that each ``1/e`` contraction lands below ``target_sq``.  Passing
    ``epoch_len`` (e.g. 100) gives the fixed-period variant; then ``n_epochs``,
    ``budget`` (total coupling calls) or ``max_iters`` bounds the run.  Distances are measured in
    the schedule's metric, which is Euclidean unless ``scaling`` is on.
    """
    if schedule is None:
        schedule = sch.agog_schedule(oracle.constants, scaling=scaling)
    zf = _as_flat(oracle, z0)
    rec = _recorder(oracle, record, "agog_restart", schedule.y_ratio)
    rec.start(zf)
    mode = "theory" if epoch_len is None else "fixed"
    if epoch_len is None:
        epoch_len = sch.epoch_length(schedule.L, schedule.mu, schedule.L_H)
    if n_epochs is None and budget is None and max_iters is None:
        if target_sq is None:
            raise ConfigurationError("give target_sq, n_epochs, budget or max_iters")
        if oracle.optimum is None:
            raise ConfigurationError("without a known optimum the epoch count must be fixed")
        n_epochs = sch.epoch_count(rec.metric0, target_sq)
    counter = CallCounter()
    sizes = _epoch_sizes(epoch_len, n_epochs, budget, max_iters)
    z_out, z_int, epochs = _restart_driver(
        oracle, zf, sizes, lambda e, K, z: schedule.eta, schedule.y_ratio, rec, counter, callback)
    return _result(oracle, rec, z_out, z_int, counter, epochs, schedule=schedule,
                   restart=mode, epoch_len=epoch_len, n_epochs=len(epochs))


# ---------------------------------------------------------------------------
# stochastic variants


def _sigma_for(oracle, zf, gamma0=None) -> float:
    if not isinstance(oracle, StochasticOracle):
        return 0.0
    radius = None
    if oracle.noise.kind == "matrix_perturbation":
        if oracle.optimum is not None:
            zs = oracle.optimum.flat
            radius = 2.0 * np.linalg.norm(zf - zs) + np.linalg.norm(zs)
        elif gamma0 is not None:
            radius = np.linalg.norm(zf) + 3.0 * gamma0
    sH, sF = oracle.effective_sigmas(radius)
    return sch.combined_sigma(sH, sF)


def _dist_or_gamma(oracle, z, gamma0, y_ratio=1.0):
    if oracle.optimum is not None:
        d = z - oracle.optimum.flat
        n = oracle.n
        return math.sqrt(float(d[:n] @ d[:n]) + float(d[n:] @ d[n:]) / y_ratio), None
    if gamma0 is None:
        raise ConfigurationError("black-box mode needs gamma0 (bound on |z0 - z*|)")
    return None, gamma0


def sagog_run(oracle, z0, K: int, schedule: Optional[sch.ScheduleSet] = None, *,
              gamma0: Optional[float] = None, stepsize: str = "sagog", scaling: bool = False,
              record: Optional[RecordOptions] = None, callback=None) -> RunResult:
    """Stochastic AG-OG: :func:`agog_run` with noisy oracles.

    The cached ``H_prev`` is the previous noisy coupling sample and the noisy
    individual gradient at ``z_md`` is drawn once per iteration and used twice.
    The default schedule uses ``eta_sagog`` with ``D`` from the combined noise
    level and the exact initial distance (or ``gamma0`` in black-box mode);
    ``stepsize="agog"`` keeps the deterministic rule.
    """
    K = _check_K(K)
    zf = _as_flat(oracle, z0)
    if schedule is None:
        if stepsize == "agog":
            schedule = sch.agog_schedule(oracle.constants, scaling=scaling)
        else:
            base = sch.agog_schedule(oracle.constants, scaling=scaling)
            dist0, g0 = _dist_or_gamma(oracle, zf, gamma0, base.y_ratio)
            schedule = sch.sagog_schedule(oracle.constants, _sigma_for(oracle, zf, gamma0), K,
                                          dist0=dist0, gamma0=g0, scaling=scaling)
    rec = _recorder(oracle, record, "sagog", schedule.y_ratio)
    rec.start(zf)
    counter = CallCounter()
    z_ag = z = zf
    try:
        z_ag, z = _agog_epoch(oracle, zf, K, schedule.eta, schedule.y_ratio, counter, rec, 0, 0,
                              callback)
    except _Diverged as e:
        raise _diverged(oracle, rec, e, z_ag, z, counter) from None
    except _Stop as stop:
        z_ag, z = stop.z_out, stop.z_int
    return _result(oracle, rec, z_ag, z, counter, schedule=schedule)


def doubling_epochs(K_det: int, n_bias: Optional[int], budget: Optional[int],
                    max_iters: Optional[int] = None):
    """Epoch lengths: ``n_bias`` epochs of ``K_det``, then doubling.

    Truncated to the coupling-call ``budget`` and/or ``max_iters``.
    """
    used = 0
    iters = 0
    e = 0
    K = K_det
    while True:
        if n_bias is not None and e >= n_bias:
            K *= 2
        K_run = K
        if budget is not None:
            left = budget - used
            if left < 2:
                return
            K_run = min(K_run, left - 1)
        if max_iters is not None:
            if iters >= max_iters:
                return
            K_run = min(K_run, max_iters - iters)
        yield K_run
        used += K_run + 1
        iters += K_run
        e += 1


def sagog_restart_run(oracle, z0, budget: Optional[int] = None, *, restart: str = "doubling",
                      period: Optional[int] = None, gamma0: Optional[float] = None,
                      stepsize: str = "sagog", scaling: bool = False,
                      record: Optional[RecordOptions] = None, callback=None,
                      max_iters: Optional[int] = None) -> RunResult:
    """Restarted S-AG-OG within a budget of coupling-oracle calls (or ``max_iters``).

    ``restart="doubling"``: epochs of the deterministic restart length
    ``K_det`` until the squared distance is expected to reach the noise floor
    ``sigma^2 / (mu^2 K_det)`` (one ``1/e`` contraction per epoch), then epoch
    lengths double.  ``restart="fixed"``: every epoch has length ``period``.
    ``D`` is recomputed for every epoch from its horizon and the current
    distance (or a shrinking ``gamma0`` estimate in black-box mode).
    """
    if budget is None and max_iters is None:
        raise ConfigurationError("give a coupling-call budget or max_iters")
    if budget is not None and budget < 2:
        raise ConfigurationError("budget must allow at least one iteration")
    zf = _as_flat(oracle, z0)
    base = sch.agog_schedule(oracle.constants, scaling=scaling)
    if base.mu <= 0:
        raise ConfigurationError("restarted S-AG-OG needs mu > 0 (regularize C-SC inputs)")
    sigma = _sigma_for(oracle, zf, gamma0)
    rec = _recorder(oracle, record, "sagog_restart", base.y_ratio)
    rec.start(zf)
    K_det = sch.epoch_length(base.L, base.mu, base.L_H)
    n_bias = None
    if restart == "doubling":
        if sigma > 0:
            start = rec.metric0 if oracle.optimum is not None else gamma0**2
            n_bias = sch.epoch_count(start, sigma**2 / (base.mu**2 * K_det))
        sizes = doubling_epochs(K_det, n_bias, budget, max_iters)
    elif restart == "fixed":
        if not period:
            raise ConfigurationError("fixed restarting needs a period")
        sizes = _epoch_sizes(int(period), None, budget, max_iters)
    else:
        raise ConfigurationError(f"unknown restart mode {restart!r}")

    gamma = [gamma0]

    def eta_for_epoch(e, K, z):
        if stepsize == "agog" or sigma == 0:
            return base.eta
        dist, g0 = _dist_or_gamma(oracle, z, gamma[0], base.y_ratio)
        s = sch.sagog_schedule(oracle.constants, sigma, K, dist0=dist, gamma0=g0, scaling=scaling)
        if g0 is not None:
            shrink = math.exp(-0.5) if n_bias is None or e < n_bias else math.sqrt(0.5)
            gamma[0] = g0 * shrink
        return s.eta

    counter = CallCounter()
    z_out, z_int, epochs = _restart_driver(oracle, zf, sizes, eta_for_epoch, base.y_ratio, rec,
                                           counter, callback)
    return _result(oracle, rec, z_out, z_int, counter, epochs, restart=restart, K_det=K_det,
                   n_bias=n_bias, sigma=sigma)


# ---------------------------------------------------------------------------
# bilinear games


def _require_bilinear(oracle):
    if getattr(oracle, "family", None) != "bilinear":
        raise ConfigurationError(f"bilinear solver needs a bilinear instance, got {oracle.family}")


def bilinear_agog_run(oracle, z0, K: int, *, record: Optional[RecordOptions] = None,
                      callback=None) -> RunResult:
    """AG-OG on a bilinear game: averaged OGDA with ``eta = 1 / (2 L_H)``."""
    _require_bilinear(oracle)
    eta = 1.0 / (2.0 * oracle.constants.L_H)
    sched = sch.constant_schedule(eta, oracle.constants)
    res = agog_run(oracle, z0, K, sched, record=record or RecordOptions(algorithm="bilinear_agog"),
                   callback=callback)
    return res


def bilinear_agog_restart_run(oracle, z0, target_sq: Optional[float] = None, *,
                              n_epochs: Optional[int] = None, budget: Optional[int] = None,
                              epoch_len: Optional[int] = None, max_iters: Optional[int] = None,
                              record: Optional[RecordOptions] = None, callback=None) -> RunResult:
    """Restarted bilinear AG-OG; default period ``ceil(8 sqrt(e kappa))``."""
    _require_bilinear(oracle)
    d = oracle.data
    if epoch_len is None:
        epoch_len = sch.bilinear_epoch_length(d["lambda_max"], d["lambda_min"])
    eta = 1.0 / (2.0 * oracle.constants.L_H)
    sched = sch.constant_schedule(eta, oracle.constants)
    return agog_restart_run(oracle, z0, target_sq, n_epochs=n_epochs, epoch_len=epoch_len,
                            budget=budget, max_iters=max_iters, schedule=sched,
                            record=record or RecordOptions(algorithm="bilinear_agog_restart"),
                            callback=callback)


def bilinear_sagog_run(oracle, z0, K: int, beta: float = 1.0, *,
                       record: Optional[RecordOptions] = None, callback=None) -> RunResult:
    """Stochastic bilinear AG-OG with ``eta = 1 / (2 L_H sqrt(1 + beta))``."""
    _require_bilinear(oracle)
    if beta < 0:
        raise ConfigurationError("beta must be nonnegative")
    eta = 1.0 / (2.0 * oracle.constants.L_H * math.sqrt(1.0 + beta))
    sched = sch.constant_schedule(eta, oracle.constants)
    return agog_run(oracle, z0, K, sched, record=record or RecordOptions(algorithm="bilinear_sagog"),
                    callback=callback)


# ---------------------------------------------------------------------------
# convex-strongly-concave reduction


def regularize_csc(oracle: OracleBundle, eps: float) -> OracleBundle:
    """Add ``(eps/2)|x|^2`` to ``f`` so that ``mu_f`` grows by exactly ``eps``.

    The minimax point of the regularized instance is attached when the
    instance is linear-gradient.
    """
    from .problems import exact_minimax

    if not eps > 0:
        raise ConfigurationError(f"eps must be positive, got {eps}")
    c = oracle.constants
    gf, f = oracle.grad_f, oracle.f
    lin = None
    if oracle.linear is not None:
        M, q = oracle.linear
        M = M.copy()
        idx = np.arange(oracle.n)
        M[idx, idx] += eps
        lin = (M, q)
    split = None
    if oracle.affine_split is not None:
        MH, qH, MF, qF = oracle.affine_split
        MF = MF.copy()
        idx = np.arange(oracle.n)
        MF[idx, idx] += eps
        split = (MH, qH, MF, qF)
    out = oracle.replace(
        grad_f=lambda x: gf(x) + eps * x,
        f=None if f is None else (lambda x: f(x) + 0.5 * eps * float(x @ x)),
        constants=ProblemConstants(L_f=c.L_f + eps, mu_f=c.mu_f + eps, L_g=c.L_g, mu_g=c.mu_g,
                                   I_xx=c.I_xx, I_xy=c.I_xy, I_yy=c.I_yy),
        linear=lin,
        affine_split=split,
        optimum=None,
        data=dict(oracle.data, csc_eps=eps),
    )
    if lin is not None:
        out = out.replace(optimum=exact_minimax(out))
    return out


# ---------------------------------------------------------------------------
# baselines


def _eta_fn(eta) -> Callable[[int], float]:
    if callable(eta):
        return eta
    v = float(eta)
    return lambda k: v


def ogda_eta(c: ProblemConstants) -> float:
    """Baseline OGDA / extragradient stepsize ``1 / (2 max(L, L_H))``."""
    return 1.0 / (2.0 * max(c.L, c.L_H))


def ogda_run(oracle, z0, K: int, eta: Union[float, Callable, None] = None, *,
             record: Optional[RecordOptions] = None, callback=None) -> RunResult:
    """Single-call OGDA in past-extragradient form; reports the last iterate.

    ``z_half = z - eta W(z_half_prev)``, ``z = z - eta W(z_half)``, with
    ``z_{-1/2} = z_0``; one new evaluation of ``W`` per iteration.
    """
    K = _check_K(K)
    eta_k = _eta_fn(ogda_eta(oracle.constants) if eta is None else eta)
    zf = _as_flat(oracle, z0)
    rec = _recorder(oracle, record, "ogda")
    rec.start(zf)
    counter = CallCounter()
    z = zf.copy()
    w_prev = oracle.W(z, counter)
    try:
        for k in range(K):
            e = eta_k(k)
            z_half = z - e * w_prev
            w = oracle.W(z_half, counter)
            z = z - e * w
            if callback is not None:
                callback(SolverState(k, z, z, z, z_half, w_prev, counter))
            w_prev = w
            rec.step(0, k + 1, counter, z, z, force=k == K - 1)
    except _Diverged as err:
        raise _diverged(oracle, rec, err, z, z, counter) from None
    except _Stop:
        pass
    return _result(oracle, rec, z, z, counter)


def seg_run(oracle, z0, K: int, restart_every: Optional[int] = None,
            eta: Optional[float] = None, *, record: Optional[RecordOptions] = None,
            callback=None) -> RunResult:
    """(Stochastic) extragradient with uniform averaging of the extrapolated points.

    Two fresh ``W`` evaluations per iteration.  Every ``restart_every``
    iterations the method restarts from the current average.
    """
    K = _check_K(K)
    e = ogda_eta(oracle.constants) if eta is None else float(eta)
    period = K if restart_every is None else int(restart_every)
    if period < 1:
        raise ConfigurationError("restart_every must be positive")
    zf = _as_flat(oracle, z0)
    rec = _recorder(oracle, record, "seg" if restart_every is None else "seg_restart")
    rec.start(zf)
    counter = CallCounter()
    z = zf.copy()
    avg = zf.copy()
    t = 0
    epoch = 0
    try:
        for k in range(K):
            w = z - e * oracle.W(z, counter)
            z = z - e * oracle.W(w, counter)
            t += 1
            avg = avg + (w - avg) / t if t > 1 else w.copy()
            if callback is not None:
                callback(SolverState(k, z, avg, z, w, w, counter))
            rec.step(epoch, k + 1, counter, avg, z, force=k == K - 1)
            if t == period and k < K - 1:
                z = avg.copy()
                t = 0
                epoch += 1
    except _Diverged as err:
        raise _diverged(oracle, rec, err, avg, z, counter) from None
    except _Stop:
        pass
    return _result(oracle, rec, avg, z, counter)


def agog_direct_run(oracle, z0, K: int, *, scaling: Optional[bool] = None,
                    averaging: str = "constant", record: Optional[RecordOptions] = None,
                    callback=None) -> RunResult:
    """Single-loop AG-OG with the constant AG-OG-Direct stepsize ``eta``.

    ``averaging="constant"`` uses the weight ``alpha = eta * mu_f``, the
    strongly-convex momentum that makes a single loop converge linearly;
    ``"decaying"`` keeps the ``2 / (k + 2)`` weights of plain AG-OG.
    ``scaling`` defaults to on whenever both strong-convexity moduli are positive.
    """
    if averaging not in ("constant", "decaying"):
        raise ConfigurationError(f"averaging must be 'constant' or 'decaying', got {averaging!r}")
    c = oracle.constants
    if scaling is None:
        scaling = c.mu_f > 0 and c.mu_g > 0
    base = sch.agog_schedule(c, scaling=scaling)
    mu_f = base.mu if scaling else c.mu_f
    eta = sch.agog_direct_eta(base.L, mu_f, base.L_H)
    sched = sch.ScheduleSet(L=base.L, mu=base.mu, L_H=base.L_H, y_ratio=base.y_ratio,
                            kind="constant", eta_const=eta)
    alpha = eta * mu_f if averaging == "constant" else None
    res = agog_run(oracle, z0, K, sched, record=record or RecordOptions(algorithm="agog_direct"),
                   callback=callback, alpha=alpha)
    res.trace.metadata["averaging"] = averaging
    return res


def nesterov_run(oracle, z0, K: int, eta: Union[float, Callable, None] = None, *,
                 record: Optional[RecordOptions] = None, callback=None) -> RunResult:
    """Nesterov's second scheme on the full field ``W``.

    ``z_md = k/(k+2) z_ag + 2/(k+2) z``, ``z = z - eta_k W(z_md)``,
    ``z_ag = k/(k+2) z_ag + 2/(k+2) z``; default ``eta_k = (k+2) / (2L)``.
    """
    K = _check_K(K)
    if eta is None:
        L = oracle.constants.L
        if L <= 0:
            raise ConfigurationError("Nesterov's scheme needs L > 0")
        eta_k = lambda k: (k + 2) / (2.0 * L)  # noqa: E731
    else:
        eta_k = _eta_fn(eta)
    zf = _as_flat(oracle, z0)
    rec = _recorder(oracle, record, "nesterov")
    rec.start(zf)
    counter = CallCounter()
    z = zf.copy()
    z_ag = zf.copy()
    try:
        for k in range(K):
            z_md = k / (k + 2) * z_ag + 2.0 / (k + 2) * z
            z = z - eta_k(k) * oracle.W(z_md, counter)
            z_ag = k / (k + 2) * z_ag + 2.0 / (k + 2) * z
            if callback is not None:
                callback(SolverState(k, z, z_ag, z_md, z, z, counter))
            rec.step(0, k + 1, counter, z_ag, z, force=k == K - 1)
    except _Diverged as err:
        raise _diverged(oracle, rec, err, z_ag, z, counter) from None
    except _Stop:
        pass
    return _result(oracle, rec, z_ag, z, counter)


ALGORITHMS = {
    "agog": agog_run,
    "agog_restart": agog_restart_run,
    "sagog": sagog_run,
    "sagog_restart": sagog_restart_run,
    "bilinear_agog": bilinear_agog_run,
    "bilinear_agog_restart": bilinear_agog_restart_run,
    "bilinear_sagog": bilinear_sagog_run,
    "ogda": ogda_run,
    "seg": seg_run,
    "agog_direct": agog_direct_run,
    "nesterov": nesterov_run,
}
