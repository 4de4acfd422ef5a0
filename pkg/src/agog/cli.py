"""Command-line driver: ``agog solve | verify | compare``.

Exit codes: 0 success, 1 verification failure, 2 divergence, 3 configuration
error.  Every file is written below ``--out-dir``; nothing is written before
the configuration has been validated and all runs have finished.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Dict, List, Optional

from . import config as cfgmod
from . import harness
from .errors import ConfigurationError, DivergenceError
from .trace import CSV_HEADER, RunTrace, traces_to_csv

EXIT_OK, EXIT_VERIFY, EXIT_DIVERGED, EXIT_CONFIG = 0, 1, 2, 3


def _global_flags(p: argparse.ArgumentParser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", default=d, help="JSON config path or bundled name (e.g. fig1a)")
    p.add_argument("--out-dir", dest="out_dir", default=d if suppress else "agog_out",
                   help="directory for every output file (default: agog_out)")
    p.add_argument("--seed", type=int, default=d, help="run a single seed (overrides run.seeds)")
    p.add_argument("--K", type=int, default=d, help="iterations (overrides run.K / run.budget)")
    p.add_argument("--threads", type=int, default=d, help="worker threads across seeds")
    p.add_argument("--format", choices=("csv", "json"), default=d if suppress else "csv",
                   help="output format of traces and tables")


def build_parser() -> argparse.ArgumentParser:
    epilog = cfgmod.keys_help() + "\n\nbundled configs: " + ", ".join(cfgmod.bundled_names())
    p = argparse.ArgumentParser(
        prog="agog", description="Separable minimax solvers: run, compare and verify.",
        epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    _global_flags(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", help="run every algorithm of a config over its seeds",
                       epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    _global_flags(s, suppress=True)
    v = sub.add_parser("verify", help="run a self-contained invariant suite")
    v.add_argument("suite", choices=("bounds", "reductions", "accounting", "stochastic"))
    _global_flags(v, suppress=True)
    c = sub.add_parser("compare", help="aggregate several configs on one query grid")
    c.add_argument("configs", nargs="+", help="config paths or bundled names")
    _global_flags(c, suppress=True)
    return p


# ---------------------------------------------------------------------------
# output helpers


def _trace_json(traces: List[RunTrace]) -> str:
    out = []
    for t in traces:
        meta = {k: v for k, v in t.metadata.items() if _jsonable(v)}
        out.append(dict(algorithm=t.algorithm, problem=t.problem, seed=t.seed, metadata=meta,
                        columns=list(CSV_HEADER[3:]),
                        rows=[[r.epoch, r.iter, r.h_calls, r.f_calls, r.sq_dist, r.gap,
                               r.elapsed_ns] for r in t.rows]))
    return json.dumps(out, indent=1)


def _jsonable(v) -> bool:
    try:
        json.dumps(v)
        return True
    except TypeError:
        return False


def _table_text(rows: List[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=1)
    if not rows:
        return ""
    cols = list(rows[0])
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join(repr(r[c]) if isinstance(r[c], float) else str(r[c]) for c in cols))
    return "\n".join(lines) + "\n"


def _write(out_dir: Path, files: Dict[str, str]) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        with open(out_dir / name, "w", newline="") as fh:
            fh.write(text)


def _err(msg: str) -> None:
    print(f"agog: {msg}", file=sys.stderr)


# ---------------------------------------------------------------------------
# commands


def _run_config(cfg: dict):
    """Run every algorithm of ``cfg``; returns ``({label: traces}, diverged)``."""
    groups, diverged = {}, []
    for spec in cfgmod.specs_from_config(cfg):
        try:
            groups[spec.label] = harness.run_experiment(spec)
        except DivergenceError as e:
            tr = e.result.trace if e.result is not None else None
            if tr is not None:
                tr.metadata["diverged_at"] = e.k
                groups[spec.label] = [tr]
            diverged.append(f"{spec.label}: {e}")
    return groups, diverged


def _trace_files(stem: str, groups: Dict[str, List[RunTrace]], fmt: str,
                 per_seed: bool) -> Dict[str, str]:
    files = {}
    ext = "csv" if fmt == "csv" else "json"
    for label, traces in groups.items():
        if per_seed:
            for t in traces:
                body = traces_to_csv([t]) if fmt == "csv" else _trace_json([t])
                files[f"{stem}_{label}_seed{t.seed}.{ext}"] = body
        else:
            body = traces_to_csv(traces) if fmt == "csv" else _trace_json(traces)
            files[f"{stem}_{label}.{ext}"] = body
    return files


def cmd_solve(args) -> int:
    if not getattr(args, "config", None):
        _err("solve needs --config")
        return EXIT_CONFIG
    try:
        cfg = cfgmod.load(args.config)
        cfg = cfgmod.apply_overrides(cfg, seed=args.seed, K=args.K, threads=args.threads)
        groups, diverged = _run_config(cfg)
    except ConfigurationError as e:
        _err(f"configuration error: {e}")
        return EXIT_CONFIG
    out = cfg.get("output", {})
    stem = out.get("name") or Path(args.config).name.removesuffix(".json")
    files = _trace_files(stem, groups, args.format, out.get("per_seed", True))
    if out.get("aggregate", True) and groups:
        aggs = harness.compare(groups)
        ext = "csv" if args.format == "csv" else "json"
        files[f"{stem}_aggregate.{ext}"] = _table_text(harness.aggregate_rows(aggs), args.format)
    meta = dict(config=cfg, config_hash=cfgmod.config_hash(cfg), diverged=diverged,
                runs={label: [{k: v for k, v in t.metadata.items() if _jsonable(v)}
                              for t in ts] for label, ts in groups.items()})
    files[f"{stem}_meta.json"] = json.dumps(meta, indent=1, sort_keys=True)
    _write(Path(args.out_dir), files)
    for label, ts in groups.items():
        last = [t.rows[-1].sq_dist for t in ts if t.rows]
        if last:
            print(f"{label}: {len(ts)} seed(s), final mean sq_dist {sum(last) / len(last):.3e}")
    if diverged:
        for d in diverged:
            _err(f"diverged: {d}")
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verification import run_suite

    checks = run_suite(args.suite)
    report = dict(suite=args.suite, passed=all(c.passed for c in checks),
                  checks=[c.as_dict() for c in checks])
    _write(Path(args.out_dir), {f"verify_{args.suite}.json": json.dumps(report, indent=1)})
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.id} {c.name}")
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def cmd_compare(args) -> int:
    try:
        cfgs = [cfgmod.apply_overrides(cfgmod.load(p), seed=args.seed, K=args.K,
                                       threads=args.threads) for p in args.configs]
        problems = {json.dumps(c["problem"], sort_keys=True) for c in cfgs}
        if len(problems) != 1:
            raise ConfigurationError("problem: compared configs must share one problem spec")
        groups: Dict[str, List[RunTrace]] = {}
        diverged = []
        for c in cfgs:
            g, d = _run_config(c)
            diverged += d
            for label, ts in g.items():
                have = {t.seed for t in groups.get(label, [])}
                groups.setdefault(label, []).extend(t for t in ts if t.seed not in have)
    except ConfigurationError as e:
        _err(f"configuration error: {e}")
        return EXIT_CONFIG
    aggs = harness.compare(groups)
    ext = "csv" if args.format == "csv" else "json"
    _write(Path(args.out_dir),
           {f"compare.{ext}": _table_text(harness.aggregate_rows(aggs), args.format)})
    for a in aggs:
        print(f"{a.algorithm}: {a.n_seeds} seed(s), mean sq_dist at {int(a.grid[-1])} "
              f"queries {a.mean[-1]:.3e}")
    if diverged:
        for d in diverged:
            _err(f"diverged: {d}")
        return EXIT_DIVERGED
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for k in ("threads",):
        v = getattr(args, k, None)
        if v is not None and v < 1:
            _err(f"--{k} must be >= 1")
            return EXIT_CONFIG
    if args.seed is not None and not 0 <= args.seed < 2**64:
        _err("--seed must be an unsigned 64-bit integer")
        return EXIT_CONFIG
    if args.K is not None and args.K < 1:
        _err("--K must be >= 1")
        return EXIT_CONFIG
    handler = {"solve": cmd_solve, "verify": cmd_verify, "compare": cmd_compare}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
