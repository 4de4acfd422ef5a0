import math

import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from agog import schedules as sch
from agog.core import ProblemConstants
from agog.errors import ConfigurationError, DegenerateProblemError

pos = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)


class TestStepsizes:
    def test_eta_agog_examples(self):
        assert sch.eta_agog(0, 1, 0) == 1.0
        assert sch.eta_agog(0, 64, 1) == pytest.approx(2 / (128 + 2 * math.sqrt(3 + math.sqrt(3))))
        assert sch.eta_agog(0, 64, 1) == pytest.approx(0.0151114, abs=5e-8)
        assert sch.eta_agog(2, 4, 1) == pytest.approx(0.239502, abs=5e-7)

    def test_eta_agog_degenerate(self):
        with pytest.raises(DegenerateProblemError):
            sch.eta_agog(0, 0, 0)

    def test_eta_sagog_examples(self):
        assert sch.eta_sagog(0, 1, 1, 0) == pytest.approx(2 / (4 + 8 * math.sqrt(2 + math.sqrt(2))))
        assert sch.eta_sagog(0, 1, 1, 0) == pytest.approx(0.106484, abs=1e-6)
        assert sch.eta_sagog(0, 1, 0, 4) == 0.25

    def test_noise_factor(self):
        assert sch.noise_factor_A(0) == 1.0
        assert sch.noise_factor_A(1) == pytest.approx(math.sqrt(5))
        assert sch.noise_factor_A(9) == pytest.approx(19.6214, abs=5e-5)
        assert sch.noise_factor_A(9) == pytest.approx(math.sqrt(385))

    def test_damping_from_gamma0(self):
        assert sch.damping_D(1.0, 9, gamma0=math.sqrt(385)) == pytest.approx(1.0)

    def test_damping_zero_noise(self):
        assert sch.damping_D(0.0, 100, dist0=1.0) == 0.0

    def test_combined_sigma(self):
        assert sch.combined_sigma(0, 0) == 0
        assert sch.combined_sigma(1, 0) == pytest.approx(math.sqrt(3 * math.sqrt(2)))
        assert sch.combined_sigma(1, 0) == pytest.approx(2.05977, abs=5e-6)
        assert sch.combined_sigma(0, 1) == pytest.approx(math.sqrt(2))


class TestScaling:
    def test_fig1b_family(self):
        c = ProblemConstants(L_f=64, mu_f=1, L_g=1, mu_g=1 / 64, I_xy=1)
        s, r = sch.scaling_reduce(c)
        assert (s.L, s.L_H, r) == pytest.approx((64, 8, 64))

    def test_three_term_max(self):
        c = ProblemConstants(L_f=1, mu_f=1, L_g=4, mu_g=0.25, I_xx=3, I_xy=1, I_yy=0)
        s, r = sch.scaling_reduce(c)
        assert r == 4 and s.L_H == 3

    def test_needs_strong_convexity(self):
        with pytest.raises(ConfigurationError):
            sch.scaling_reduce(ProblemConstants(L_f=1, mu_f=0, L_g=1, mu_g=1))


class TestRestarts:
    @pytest.mark.parametrize("L, mu, L_H, want", [(1, 1, 0, 5), (100, 1, 0, 47), (1, 1, 10, 237)])
    def test_epoch_length(self, L, mu, L_H, want):
        assert sch.epoch_length(L, mu, L_H) == want

    def test_epoch_count(self):
        assert sch.epoch_count(1.0, 1.0) == 0
        assert sch.epoch_count(math.exp(3), 1.0) == 3
        assert sch.epoch_count(1.0, 1e-8) == 19

    def test_bilinear_epoch_length(self):
        assert sch.bilinear_epoch_length(1, 1) == 14
        assert sch.bilinear_epoch_length(100, 1) == 132

    def test_bilinear_restart_identity(self):
        # K + 1 = 8 sqrt(e kappa) makes the bound factor exactly 1/e
        for kappa in (1.0, 37.0, 1e4):
            K1 = 8 * math.sqrt(math.e * kappa)
            assert sch.bilinear_rate_bound(K1 - 1, kappa, 1.0, 1.0) == pytest.approx(1 / math.e)


@settings(max_examples=200, deadline=None)
@given(k=st.integers(0, 10**6), L=pos, L_H=pos)
def test_stepsize_contract(k, L, L_H):
    assert L_H * sch.eta_agog(k, L, L_H) <= math.sqrt(1 / (3 + math.sqrt(3))) + 1e-15


@settings(max_examples=200, deadline=None)
@given(k=st.integers(0, 10**6), L=pos, L_H=st.floats(0, 1e3))
@example(k=10**6, L=0.00390625, L_H=238.8125)  # saturated tail, once off by one ulp
def test_stepsize_monotone_and_bounded(k, L, L_H):
    a, b = sch.eta_agog(k, L, L_H), sch.eta_agog(k + 1, L, L_H)
    assert b >= a
    if L_H > 0:
        assert b <= 1 / (sch.SQRT_3P3 * L_H)


@settings(max_examples=100, deadline=None)
@given(k=st.integers(0, 10**6))
def test_alpha_in_unit_interval(k):
    assert 0 < sch.alpha(k) <= 1


@settings(max_examples=50, deadline=None)
@given(L=pos, L_H=pos, D=st.floats(0, 1e3))
def test_sagog_telescoping(L, L_H, D):
    # (k+2)/eta_k - (k+1)/eta_{k-1} is the same constant for every k; the
    # tolerance is relative to the operands, which grow like k
    want = 4 * sch.SQRT_2P2 * L_H
    for k in range(1, 10_001, 97):
        a = (k + 2) / sch.eta_sagog(k, L, L_H, D)
        d = a - (k + 1) / sch.eta_sagog(k - 1, L, L_H, D)
        assert abs(d - want) <= 1e-12 * a


@settings(max_examples=100, deadline=None)
@given(j=st.integers(0, 40), r=st.floats(1e-6, 1e6))
def test_epoch_count_is_minimal(j, r):
    n = sch.epoch_count(r * math.exp(j), r)
    assert n == j
