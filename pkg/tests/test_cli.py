import json
import subprocess
import sys

import pytest

from agog import cli
from agog import config as cfgmod
from agog import verification
from agog.verification import Check

SMALL = {
    "problem": {"family": "quadratic", "n": 4, "m": 4, "L_f": 4, "mu_f": 1, "L_g": 4,
                "mu_g": 1, "L_H": 1, "seed": 0},
    "algorithm": [{"name": "agog"}, {"name": "ogda"}],
    "run": {"K": 20, "seeds": [0, 1]},
    "output": {"name": "small"},
}


def _write_cfg(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def _main(tmp_path, *argv):
    return cli.main(["--out-dir", str(tmp_path / "out"), *argv])


def test_solve_writes_outputs(tmp_path):
    assert _main(tmp_path, "solve", "--config", _write_cfg(tmp_path, SMALL)) == 0
    names = sorted(p.name for p in (tmp_path / "out").iterdir())
    assert names == ["small_aggregate.csv", "small_agog_seed0.csv", "small_agog_seed1.csv",
                     "small_meta.json", "small_ogda_seed0.csv", "small_ogda_seed1.csv"]


def test_overrides_reach_metadata(tmp_path):
    cfg = _write_cfg(tmp_path, SMALL)
    assert _main(tmp_path, "solve", "--config", cfg, "--seed", "7", "--K", "100") == 0
    meta = json.loads((tmp_path / "out" / "small_meta.json").read_text())
    runs = meta["runs"]["agog"]
    assert [r["seed"] for r in runs] == [7] and runs[0]["K"] == 100
    rows = (tmp_path / "out" / "small_agog_seed7.csv").read_text().splitlines()
    assert len(rows) == 101


def test_json_format(tmp_path):
    cfg = _write_cfg(tmp_path, SMALL)
    assert _main(tmp_path, "solve", "--config", cfg, "--format", "json") == 0
    data = json.loads((tmp_path / "out" / "small_agog_seed0.json").read_text())
    assert json.dumps(data)
    assert (tmp_path / "out" / "small_aggregate.json").exists()


def test_malformed_json_writes_nothing(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert _main(tmp_path, "solve", "--config", str(p)) == 3
    assert not (tmp_path / "out").exists()


def test_unknown_key(tmp_path, capsys):
    cfg = dict(SMALL, problem=dict(SMALL["problem"], colour="red"))
    assert _main(tmp_path, "solve", "--config", _write_cfg(tmp_path, cfg)) == 3
    assert "colour" in capsys.readouterr().err
    assert not (tmp_path / "out").exists()


@pytest.mark.parametrize("flags", [["--K", "0"], ["--seed", "-1"], ["--threads", "0"]])
def test_bad_flags(tmp_path, flags):
    assert _main(tmp_path, "solve", "--config", _write_cfg(tmp_path, SMALL), *flags) == 3


def test_solve_needs_config(tmp_path):
    assert _main(tmp_path, "solve") == 3


def test_divergence_exit_code(tmp_path):
    cfg = dict(SMALL, algorithm={"name": "ogda", "eta": 50.0}, run={"K": 500, "seeds": [0]})
    assert _main(tmp_path, "solve", "--config", _write_cfg(tmp_path, cfg)) == 2
    meta = json.loads((tmp_path / "out" / "small_meta.json").read_text())
    assert meta["diverged"] and "diverged_at" in meta["runs"]["ogda"][0]


def test_verify_accounting(tmp_path):
    assert _main(tmp_path, "verify", "accounting") == 0
    report = json.loads((tmp_path / "out" / "verify_accounting.json").read_text())
    assert report["passed"] and report["checks"]


def test_verify_failure_exit_code(tmp_path, monkeypatch):
    monkeypatch.setitem(verification.SUITES, "accounting",
                        lambda: [Check("X", "forced failure", False, {})])
    assert _main(tmp_path, "verify", "accounting") == 1


def test_compare_single_config(tmp_path):
    assert _main(tmp_path, "compare", _write_cfg(tmp_path, SMALL)) == 0
    head = (tmp_path / "out" / "compare.csv").read_text().splitlines()[0]
    assert head.startswith("h_calls,agog_mean")


def test_compare_unions_seeds(tmp_path, capsys):
    a = _write_cfg(tmp_path, dict(SMALL, run={"K": 20, "seeds": [0, 1]}), "a.json")
    b = _write_cfg(tmp_path, dict(SMALL, run={"K": 20, "seeds": [1, 2]}), "b.json")
    assert _main(tmp_path, "compare", a, b) == 0
    assert "agog: 3 seed(s)" in capsys.readouterr().out


def test_compare_rejects_different_problems(tmp_path):
    a = _write_cfg(tmp_path, SMALL, "a.json")
    b = _write_cfg(tmp_path, dict(SMALL, problem=dict(SMALL["problem"], L_H=2)), "b.json")
    assert _main(tmp_path, "compare", a, b) == 3
    assert not (tmp_path / "out").exists()


def test_help_lists_every_key():
    out = subprocess.run([sys.executable, "-m", "agog", "--help"], capture_output=True,
                         text=True, check=True).stdout
    for key, _ in cfgmod.iter_keys():
        assert key in out


def test_bundled_configs_validate():
    for name in cfgmod.bundled_names():
        cfgmod.validate(cfgmod.load(name))
