"""Per-iteration run records and their CSV form."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, List, Optional

import numpy as np

from .core import CallCounter

CSV_HEADER = ("algorithm", "problem", "seed", "epoch", "iter", "h_calls", "f_calls",
              "sq_dist", "gap", "elapsed_ns")


@dataclass(frozen=True)
class TraceRow:
    epoch: int
    iter: int
    h_calls: int
    f_calls: int
    sq_dist: float
    gap: Optional[float] = None
    elapsed_ns: int = 0


@dataclass
class RunTrace:
    """Rows of one run plus metadata.

    ``extras`` holds per-row series that are not part of the CSV schema, e.g.
    ``sq_dist_z`` (distance of the integer iterate) used by bound checks.
    """

    algorithm: str
    problem: str
    seed: int
    rows: List[TraceRow] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def same_rows(self, other: "RunTrace") -> bool:
        return (self.algorithm, self.problem, self.seed, self.rows) == (
            other.algorithm, other.problem, other.seed, other.rows)


def _fmt_float(v) -> str:
    if v is None:
        return ""
    return repr(float(v))


def traces_to_csv(traces: Iterable[RunTrace]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for t in traces:
        for r in t.rows:
            w.writerow((t.algorithm, t.problem, t.seed, r.epoch, r.iter, r.h_calls, r.f_calls,
                        _fmt_float(r.sq_dist), _fmt_float(r.gap), r.elapsed_ns))
    return buf.getvalue()


def write_csv(path, traces: Iterable[RunTrace]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(traces_to_csv(traces))


def parse_csv(text: str) -> List[RunTrace]:
    """Inverse of :func:`traces_to_csv`; traces come back in first-seen order."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    out = {}
    for rec in reader:
        alg, prob, seed = rec[0], rec[1], int(rec[2])
        key = (alg, prob, seed)
        if key not in out:
            out[key] = RunTrace(alg, prob, seed)
        out[key].rows.append(TraceRow(
            epoch=int(rec[3]), iter=int(rec[4]), h_calls=int(rec[5]), f_calls=int(rec[6]),
            sq_dist=float(rec[7]), gap=float(rec[8]) if rec[8] != "" else None,
            elapsed_ns=int(rec[9])))
    return list(out.values())


def read_csv(path) -> List[RunTrace]:
    with open(path) as fh:
        return parse_csv(fh.read())


class _Stop(Exception):
    """Raised by the recorder once ``sq_dist`` reaches ``stop_sq``."""

    def __init__(self):
        super().__init__("target reached")
        self.z_out = None
        self.z_int = None


class _Diverged(Exception):
    def __init__(self, k, reason):
        super().__init__(reason)
        self.k = k
        self.reason = reason


@dataclass
class RecordOptions:
    """What a solver records: cadence, gap column, wall-clock column, labels."""

    record_every: int = 1
    gap: bool = False
    timing: bool = False
    algorithm: str = ""
    problem: str = ""
    seed: int = 0
    divergence_factor: float = 1e12
    stop_sq: Optional[float] = None


class Recorder:
    """Collects trace rows and watches for divergence.

    Distances are Euclidean in the rows; ``y_weight`` gives the metric
    ``|x - x*|^2 + y_weight |y - y*|^2`` used for the ``*_metric`` extras that
    the bound checks read (it differs from 1 only under the scaling reduction).
    """

    def __init__(self, oracle, opts: RecordOptions, y_weight: float = 1.0):
        if opts.record_every < 1:
            raise ValueError("record_every must be >= 1")
        self.oracle = oracle
        self.opts = opts
        self.n = oracle.n
        self.zstar = None if oracle.optimum is None else oracle.optimum.flat
        self.y_weight = y_weight
        self.trace = RunTrace(opts.algorithm, opts.problem, opts.seed)
        self.trace.extras = {"sq_dist_z": [], "metric_ag": [], "metric_z": []}
        self.sq0 = None
        self.metric0 = None
        self.last_finite = 0
        self.max_metric_z = 0.0
        self._t0 = 0
        if opts.gap and not getattr(oracle, "has_values", False):
            from .errors import UnsupportedDiagnosticError

            raise UnsupportedDiagnosticError("gap recording needs function values")

    def dist(self, z):
        if self.zstar is None:
            return math.nan
        d = z - self.zstar
        return float(d @ d)

    def metric(self, z):
        if self.zstar is None:
            return math.nan
        d = z - self.zstar
        if self.y_weight == 1.0:
            return float(d @ d)
        dx, dy = d[: self.n], d[self.n :]
        return float(dx @ dx) + self.y_weight * float(dy @ dy)

    def start(self, z0):
        self._t0 = time.perf_counter_ns()
        self.sq0 = self.dist(z0)
        self.metric0 = self.metric(z0)

    def step(self, epoch: int, it: int, counter: CallCounter, z_out, z_int=None, force=False):
        # any nan/inf coordinate propagates into these sums, so they double as finiteness checks
        if self.zstar is None:
            sq = math.nan
            probe = float(z_out.sum()) + (0.0 if z_int is None else float(z_int.sum()))
        else:
            sq = self.dist(z_out)
            mz = self.metric(z_int) if z_int is not None else 0.0
            probe = sq + mz
        if not math.isfinite(probe):
            raise _Diverged(self.last_finite, f"non-finite iterate at iteration {it}")
        if self.sq0 and sq > self.opts.divergence_factor * self.sq0:
            raise _Diverged(self.last_finite,
                            f"squared distance {sq:.3e} exceeds {self.opts.divergence_factor:g} "
                            f"x initial {self.sq0:.3e} at iteration {it}")
        self.last_finite = it
        if z_int is not None and self.zstar is not None and mz > self.max_metric_z:
            self.max_metric_z = mz
        stop = self.opts.stop_sq is not None and sq <= self.opts.stop_sq
        if not (force or stop) and it % self.opts.record_every:
            return
        gap = None
        if self.opts.gap and self.zstar is not None:
            from .core import gap_V_flat

            gap = gap_V_flat(self.oracle.base if hasattr(self.oracle, "base") else self.oracle,
                             z_out, self.zstar)
        el = time.perf_counter_ns() - self._t0 if self.opts.timing else 0
        rows = self.trace.rows
        if rows and rows[-1].iter == it:
            if stop:
                raise _Stop()
            return
        rows.append(TraceRow(epoch, it, counter.h_calls, counter.f_calls, sq, gap, el))
        ex = self.trace.extras
        ex["sq_dist_z"].append(self.dist(z_int) if z_int is not None else math.nan)
        ex["metric_ag"].append(self.metric(z_out))
        ex["metric_z"].append(self.metric(z_int) if z_int is not None else math.nan)
        if stop:
            raise _Stop()
