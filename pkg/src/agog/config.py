"""
JSON experiment configs.

:data:`SCHEMA` is the single source of truth: validation, the key listing in
``--help`` and the README table are all generated from it.
"""

from __future__ import annotations

import copy
import hashlib
import json
from importlib import resources
from pathlib import Path
from typing import Iterator, List, Tuple

import jsonschema

from .errors import ConfigurationError
from .harness import ALGORITHM_NAMES, PROBLEM_FAMILIES, RESTART_MODES, ExperimentSpec


def _num(desc, minimum=None, exclusive=False):
    s = {"type": "number", "description": desc}
    if minimum is not None:
        s["exclusiveMinimum" if exclusive else "minimum"] = minimum
    return s


def _int(desc, minimum=None):
    s = {"type": "integer", "description": desc}
    if minimum is not None:
        s["minimum"] = minimum
    return s


_ALGORITHM = {
    "type": "object",
    "additionalProperties": False,
    "required": ["name"],
    "description": "solver and its parameters",
    "properties": {
        "name": {"enum": list(ALGORITHM_NAMES), "description": "solver"},
        "label": {"type": "string", "description": "name used in outputs "
                                                   "(default: name, plus _restart when restarting)"},
        "scaling": {"type": "boolean",
                    "description": "two-stepsize rescaling for unequal strong-convexity moduli"},
        "restart": {
            "type": "object",
            "additionalProperties": False,
            "description": "restart schedule",
            "properties": {
                "mode": {"enum": list(RESTART_MODES),
                         "description": "none | fixed (every period iterations) | theory "
                                        "(rate-derived period) | doubling (stochastic)"},
                "period": _int("iterations per epoch in fixed mode", 1),
            },
        },
        "target_sq": _num("theory restarts: stop once the squared distance bound reaches this",
                          0, True),
        "n_epochs": _int("restarts: fixed number of epochs", 0),
        "stepsize": {"enum": ["sagog", "agog"],
                     "description": "sagog: noise-damped stepsize; agog: deterministic stepsize"},
        "gamma0": _num("upper bound on the initial distance (black-box mode)", 0, True),
        "averaging": {"enum": ["constant", "decaying"],
                      "description": "agog_direct: constant weight eta*mu_f or 2/(k+2)"},
        "beta": _num("bilinear_sagog noise-to-signal parameter", 0),
        "eta": _num("constant stepsize override for ogda, seg and nesterov", 0, True),
    },
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["problem", "algorithm", "run"],
    "properties": {
        "problem": {
            "type": "object",
            "additionalProperties": False,
            "required": ["family"],
            "description": "problem instance",
            "properties": {
                "family": {"enum": list(PROBLEM_FAMILIES), "description": "instance family"},
                "n": _int("x dimension (bilinear: both blocks)", 1),
                "m": _int("y dimension", 1),
                "L_f": _num("smoothness of f", 0),
                "mu_f": _num("strong convexity of f", 0),
                "L_g": _num("smoothness of g", 0),
                "mu_g": _num("strong convexity of g", 0),
                "L_H": _num("largest singular value of the coupling matrix", 0),
                "mu_H": _num("smallest singular value of the coupling matrix", 0),
                "lambda_range": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0},
                                 "minItems": 2, "maxItems": 2,
                                 "description": "bilinear: [min, max] eigenvalues of B^T B"},
                "offset_scale": _num("scale of random linear terms (0 puts the optimum at 0)", 0),
                "n_states": _int("mspbe: Markov chain states", 1),
                "feature_dim": _int("mspbe: feature dimension", 1),
                "gamma": _num("mspbe: discount factor in [0, 1)", 0),
                "reg_mu": _num("mspbe: ridge weight on x", 0),
                "rho": _num("robust_ls: penalty weight (> 1/2)", 0.5, True),
                "R": _num("robust_ls: norm of the observation perturbation", 0),
                "csc_eps": _num("add (eps/2)|x|^2 to f before solving", 0),
                "seed": _int("instance seed (default: the run seed)", 0),
            },
        },
        "algorithm": {
            "description": "one solver or a list of solvers sharing the problem",
            "oneOf": [_ALGORITHM, {"type": "array", "items": _ALGORITHM, "minItems": 1}],
        },
        "run": {
            "type": "object",
            "additionalProperties": False,
            "description": "run length and seeds",
            "properties": {
                "K": _int("iterations (summed over epochs when restarting)", 1),
                "budget": _int("coupling-oracle query budget (alternative to K)", 2),
                "seeds": {"type": "array", "items": {"type": "integer", "minimum": 0},
                          "minItems": 1, "uniqueItems": True, "description": "run seeds"},
                "record_every": _int("record one row every this many iterations", 1),
                "z0": {"oneOf": [{"enum": ["unit", "unit_offset", "zeros"]},
                                 {"type": "array", "items": {"type": "number"}}],
                       "description": "unit | unit_offset | zeros | explicit list"},
                "gap": {"type": "boolean", "description": "record the gap column"},
                "timing": {"type": "boolean", "description": "record elapsed_ns"},
                "threads": _int("worker threads across seeds", 1),
            },
        },
        "noise": {
            "type": "object",
            "additionalProperties": False,
            "description": "stochastic oracle (omit for deterministic runs)",
            "properties": {
                "kind": {"enum": ["additive", "matrix_perturbation"],
                         "description": "noise model"},
                "sigma_H": _num("coupling noise level", 0),
                "sigma_F": _num("individual-gradient noise level", 0),
                "seed": _int("master noise seed", 0),
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "description": "what solve writes",
            "properties": {
                "name": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$",
                         "description": "file stem for outputs"},
                "per_seed": {"type": "boolean", "description": "one trace file per seed"},
                "aggregate": {"type": "boolean", "description": "write the aggregate table"},
            },
        },
    },
}


def iter_keys(schema: dict = SCHEMA, prefix: str = "") -> Iterator[Tuple[str, str]]:
    """Every addressable key as ``(dotted.path, description)``."""
    props = schema.get("properties", {})
    for k, sub in props.items():
        path = f"{prefix}{k}"
        yield path, sub.get("description", "")
        if "oneOf" in sub:
            for alt in sub["oneOf"]:
                target = alt.get("items", alt) if alt.get("type") == "array" else alt
                if "properties" in target:
                    yield from iter_keys(target, path + ".")
                    break
        elif "properties" in sub:
            yield from iter_keys(sub, path + ".")


def keys_help() -> str:
    lines = ["config keys:"]
    for path, desc in iter_keys():
        lines.append(f"  {path:<28} {desc}")
    return "\n".join(lines)


def _error_path(err: jsonschema.ValidationError):
    best = err
    if err.context:
        best = max(err.context, key=lambda e: len(e.absolute_path))
    path = ".".join(str(p) for p in best.absolute_path)
    return path or "<root>", best.message


def validate(cfg: dict) -> None:
    """Raise :class:`ConfigurationError` naming the offending key."""
    v = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(v.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        path, msg = _error_path(errors[0])
        raise ConfigurationError(f"{path}: {msg}")
    run = cfg["run"]
    if ("K" in run) == ("budget" in run):
        raise ConfigurationError("run: set exactly one of K and budget")
    if cfg["problem"]["family"] == "quadratic":
        for k in ("n", "L_f", "mu_f", "L_g", "mu_g", "L_H"):
            if k not in cfg["problem"]:
                raise ConfigurationError(f"problem.{k}: required for quadratic games")
    if cfg["problem"]["family"] == "mspbe":
        for k in ("n_states", "feature_dim"):
            if k not in cfg["problem"]:
                raise ConfigurationError(f"problem.{k}: required for mspbe")
    if cfg["problem"]["family"] in ("bilinear", "robust_ls") and "n" not in cfg["problem"]:
        raise ConfigurationError("problem.n: required")


def config_hash(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def bundled_names() -> List[str]:
    root = resources.files("agog") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load(path_or_name: str) -> dict:
    """Read and validate a config file; bare names resolve to bundled configs."""
    p = Path(path_or_name)
    if not p.exists():
        stem = p.name[:-5] if p.name.endswith(".json") else p.name
        bundled = resources.files("agog") / "configs" / f"{stem}.json"
        if not bundled.is_file():
            raise ConfigurationError(f"config not found: {path_or_name}")
        text = bundled.read_text()
    else:
        try:
            text = p.read_text()
        except OSError as e:
            raise ConfigurationError(f"cannot read config {path_or_name}: {e}") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"malformed JSON in {path_or_name}: {e}") from None
    if not isinstance(cfg, dict):
        raise ConfigurationError("<root>: config must be a JSON object")
    validate(cfg)
    return cfg


def apply_overrides(cfg: dict, seed=None, K=None, threads=None) -> dict:
    cfg = copy.deepcopy(cfg)
    run = cfg["run"]
    if seed is not None:
        run["seeds"] = [int(seed)]
    if K is not None:
        run.pop("budget", None)
        run["K"] = int(K)
    if threads is not None:
        run["threads"] = int(threads)
    validate(cfg)
    return cfg


def algorithms_of(cfg: dict) -> List[dict]:
    a = cfg["algorithm"]
    return list(a) if isinstance(a, list) else [a]


def specs_from_config(cfg: dict) -> List[ExperimentSpec]:
    """One :class:`ExperimentSpec` per algorithm entry."""
    run = cfg["run"]
    h = config_hash(cfg)
    out = []
    for a in algorithms_of(cfg):
        out.append(ExperimentSpec(
            problem=cfg["problem"], algorithm=a, seeds=run.get("seeds", [0]),
            K=run.get("K"), budget=run.get("budget"), noise=cfg.get("noise"),
            record_every=run.get("record_every", 1), z0=run.get("z0", "unit"),
            gap=run.get("gap", False), timing=run.get("timing", False),
            threads=run.get("threads", 1), config_hash=h))
    labels = [s.label for s in out]
    if len(set(labels)) != len(labels):
        raise ConfigurationError("algorithm: entries need distinct labels")
    return out
