"""Invariants checked over generated inputs."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from agog import algorithms as alg
from agog import problems as pb
from agog import verification as ver
from agog.core import PairVector, field_W, operator_H

SETTINGS = settings(max_examples=40, deadline=None)
seeds = st.integers(0, 2**32 - 1)


def _pair(rng, n, m):
    return PairVector(rng.standard_normal(n), rng.standard_normal(m))


@SETTINGS
@given(seed=seeds, n=st.integers(1, 6))
def test_bilinear_coupling_is_skew(seed, n):
    rng = np.random.default_rng(seed)
    o = pb.make_bilinear_game(pb.BilinearGameSpec(n=n, B=rng.standard_normal((n, n))))
    z, w = _pair(rng, n, n), _pair(rng, n, n)
    d = z.flat - w.flat
    inner = float((operator_H(o, z).flat - operator_H(o, w).flat) @ d)
    scale = np.linalg.norm(o.linear[0]) * float(d @ d)
    assert abs(inner) <= 1e-12 * max(scale, 1.0)


@SETTINGS
@given(seed=st.integers(0, 200))
def test_field_strongly_monotone(seed):
    o = ver.sc_instance(seed % 20, n=6)
    rng = np.random.default_rng(seed)
    z, w = _pair(rng, 6, 6), _pair(rng, 6, 6)
    d = z.flat - w.flat
    inner = float((field_W(o, z).flat - field_W(o, w).flat) @ d)
    assert inner >= o.constants.mu * float(d @ d) * (1 - 1e-9)
    assert float((operator_H(o, z).flat - operator_H(o, w).flat) @ d) >= -1e-9 * float(d @ d)


@SETTINGS
@given(seed=st.integers(0, 200))
def test_field_lipschitz(seed):
    o = ver.sc_instance(seed % 20, n=6)
    rng = np.random.default_rng(seed)
    z, w = _pair(rng, 6, 6), _pair(rng, 6, 6)
    dh = operator_H(o, z).flat - operator_H(o, w).flat
    assert np.linalg.norm(dh) <= o.constants.L_H * np.linalg.norm(z.flat - w.flat) * (1 + 1e-9)


@settings(max_examples=25, deadline=None)
@given(K=st.integers(1, 60), which=st.sampled_from(["agog", "ogda", "seg", "nesterov", "sagog"]))
def test_call_accounting(K, which):
    o = ver.sc_instance(0, n=3)
    z0 = ver.unit_offset(o, 0)
    if which == "sagog":
        o = pb.wrap_stochastic(o, pb.NoiseModel("additive", 0.1, 0.1), 0)
    run = dict(agog=alg.agog_run, ogda=alg.ogda_run, seg=alg.seg_run,
               nesterov=alg.nesterov_run, sagog=alg.sagog_run)[which]
    c = run(o, z0, K).counters
    want = dict(agog=(K + 1, K), sagog=(K + 1, K), ogda=(K + 1, K + 1), seg=(2 * K, 2 * K),
                nesterov=(K, K))[which]
    assert (c.h_calls, c.f_calls) == want


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 19), K=st.integers(1, 300))
def test_iterates_stay_in_initial_ball(seed, K):
    o = ver.sc_instance(seed, n=8)
    res = alg.agog_run(o, ver.unit_offset(o, seed), K)
    md = res.trace.metadata
    assert md["max_metric_z"] <= md["metric0"] * (1 + 1e-10)


@settings(max_examples=20, deadline=None)
@given(stream=st.integers(0, 2**63), kind=st.sampled_from(["additive", "matrix_perturbation"]))
def test_noise_replay(stream, kind):
    o = ver.sc_instance(1, n=4)
    z0 = ver.unit_offset(o, 1)
    noise = pb.NoiseModel(kind, 0.2, 0.1, seed=11)
    a = alg.sagog_run(pb.wrap_stochastic(o, noise, stream), z0, 15)
    b = alg.sagog_run(pb.wrap_stochastic(o, noise, stream), z0, 15)
    assert a.trace.same_rows(b.trace)
