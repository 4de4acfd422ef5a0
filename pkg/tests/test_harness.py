import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agog import harness
from agog import verification as ver
from agog.algorithms import agog_run
from agog.config import load, specs_from_config
from agog.errors import ConfigurationError
from agog.trace import RunTrace, TraceRow, parse_csv, traces_to_csv


def _spec(**kw):
    base = dict(problem=dict(family="quadratic", n=5, m=5, L_f=4, mu_f=1, L_g=4, mu_g=1, L_H=1,
                             seed=0),
                algorithm=dict(name="agog"), seeds=[0], K=10)
    base.update(kw)
    return harness.ExperimentSpec(**base)


def _trace(points, alg="a", seed=0):
    rows = [TraceRow(epoch=0, iter=i, h_calls=h, f_calls=h, sq_dist=v)
            for i, (h, v) in enumerate(points)]
    return RunTrace(alg, "p", seed, rows)


class TestRun:
    def test_row_count_and_calls(self):
        (tr,) = harness.run_experiment(_spec())
        assert len(tr.rows) == 10
        assert tr.rows[-1].h_calls == 11 and tr.rows[-1].iter == 10

    def test_same_seed_same_csv_bytes(self):
        spec = _spec(seeds=[0, 1], K=50)
        a = traces_to_csv(harness.run_experiment(spec))
        b = traces_to_csv(harness.run_experiment(spec))
        assert a.encode() == b.encode()

    def test_threads_do_not_change_results(self):
        spec = _spec(seeds=[0, 1, 2], K=40)
        one = harness.run_experiment(spec)
        many = harness.run_experiment(dataclasses.replace(spec, threads=3))
        assert [t.rows for t in one] == [t.rows for t in many]

    def test_budget_maps_to_iterations(self):
        for name, K in (("agog", 99), ("ogda", 99), ("seg", 50), ("nesterov", 100)):
            (tr,) = harness.run_experiment(_spec(algorithm=dict(name=name), K=None, budget=100))
            assert tr.rows[-1].iter == K
            assert tr.rows[-1].h_calls <= 100

    def test_fig1a_restart_beats_ogda(self):
        specs = {s.label: dataclasses.replace(s, seeds=[0]) for s in specs_from_config(load("fig1a"))}
        groups = {k: harness.run_experiment(specs[k]) for k in ("agog_restart", "ogda")}
        aggs = {a.algorithm: a for a in harness.compare(groups)}
        assert aggs["agog_restart"].mean[-1] < aggs["ogda"].mean[-1]

    @pytest.mark.parametrize("kw", [dict(seeds=[]), dict(seeds=[1, 1]), dict(K=None),
                                    dict(algorithm=dict(name="nope")), dict(record_every=0)])
    def test_spec_validation(self, kw):
        with pytest.raises(ConfigurationError):
            _spec(**kw)


class TestAggregate:
    def test_single_trace_is_identity(self):
        t = _trace([(1, 4.0), (3, 2.0), (5, 1.0)])
        a = harness.aggregate([t])
        np.testing.assert_array_equal(a.grid, [1, 3, 5])
        for col in (a.mean, a.median, a.min, a.max):
            np.testing.assert_array_equal(col, [4, 2, 1])

    def test_constant_traces(self):
        a = harness.aggregate([_trace([(1, 1.0), (5, 1.0)]), _trace([(1, 3.0), (5, 3.0)], seed=1)])
        assert a.mean.tolist() == [2, 2] and a.median.tolist() == [2, 2]
        assert (a.min[0], a.max[0], a.n_seeds) == (1, 3, 2)

    def test_carry_forward_never_interpolates(self):
        t = _trace([(1, 8.0), (10, 1.0)])
        vals = harness.carry_forward(t, np.array([1, 2, 9, 10]))
        assert vals.tolist() == [8, 8, 8, 1]

    def test_grid_before_first_row(self):
        with pytest.raises(ValueError):
            harness.carry_forward(_trace([(5, 1.0)]), np.array([1]))

    def test_common_grid_uses_shared_range(self):
        a = _trace([(1, 1.0), (2, 1.0), (3, 1.0), (4, 1.0)])
        b = _trace([(2, 1.0), (4, 1.0), (6, 1.0)], seed=1)
        np.testing.assert_array_equal(harness.common_grid([a, b]), [2, 4])

    def test_at_lookup(self):
        a = harness.aggregate([_trace([(1, 4.0), (3, 2.0)])])
        assert a.at(2)["mean"] == 4 and a.at(3)["mean"] == 2
        with pytest.raises(ValueError):
            a.at(0)

    def test_wide_rows(self):
        aggs = harness.compare({"x": [_trace([(1, 1.0), (2, 0.5)])],
                                "y": [_trace([(1, 2.0), (2, 1.0)], alg="b")]})
        rows = harness.aggregate_rows(aggs)
        assert [r["h_calls"] for r in rows] == [1, 2]
        assert rows[1]["x_mean"] == 0.5 and rows[1]["y_max"] == 1.0


class TestBounds:
    def test_iterate_ball_on_agog(self):
        o = ver.sc_instance(0, n=6)
        res = agog_run(o, ver.unit_offset(o, 0), 500)
        rep = harness.check_bounds(res.trace, o, "iterate_ball")
        assert rep.passed and rep.max_ratio <= 1 + 1e-10

    def test_needs_optimum(self):
        o = ver.sc_instance(0, n=3)
        res = agog_run(o, ver.unit_offset(o, 0), 5)
        with pytest.raises(ConfigurationError):
            harness.check_bounds(res.trace, o.replace(optimum=None), "agog_rate")


def test_csv_header_and_empty_gap():
    text = traces_to_csv([_trace([(1, 0.5)])])
    head, row = text.splitlines()
    assert head == "algorithm,problem,seed,epoch,iter,h_calls,f_calls,sq_dist,gap,elapsed_ns"
    assert row.split(",")[8] == ""


finite = st.floats(min_value=0, max_value=1e300, allow_nan=False, allow_infinity=False)


@settings(max_examples=100, deadline=None)
@given(vals=st.lists(finite, min_size=1, max_size=20),
       gaps=st.lists(st.one_of(st.none(), st.floats(-1e300, 1e300, allow_nan=False)),
                     min_size=20, max_size=20),
       seed=st.integers(0, 2**64 - 1), name=st.text("abc_,\"", min_size=1, max_size=8))
def test_csv_roundtrip(vals, gaps, seed, name):
    rows = [TraceRow(epoch=i // 3, iter=i, h_calls=i + 1, f_calls=i, sq_dist=v, gap=gaps[i],
                     elapsed_ns=i * 7) for i, v in enumerate(vals)]
    t = RunTrace(name, "quadratic", seed, rows)
    (back,) = parse_csv(traces_to_csv([t]))
    assert back.same_rows(t)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.floats(0, 1e6), min_size=3, max_size=3), min_size=1, max_size=6))
def test_aggregate_order_statistics(series):
    traces = [_trace([(1, a), (2, b), (3, c)], seed=i) for i, (a, b, c) in enumerate(series)]
    agg = harness.aggregate(traces)
    assert np.all(agg.min <= agg.median) and np.all(agg.median <= agg.max)
    assert np.all(agg.min <= agg.mean * (1 + 1e-12)) and np.all(agg.mean <= agg.max * (1 + 1e-12))
