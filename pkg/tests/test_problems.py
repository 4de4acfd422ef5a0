import itertools

import numpy as np
import pytest

from agog import problems as pb
from agog.core import CallCounter
from agog.errors import InvalidSpecError, NoUniqueOptimumError


class TestQuadratic:
    def test_fig1a_constants(self):
        o = pb.make_quadratic_game(pb.QuadraticGameSpec(n=50, m=50, A1_eigs=(0.5, 32),
                                                        A3_eigs=(0.5, 32),
                                                        A2_sq_eigs=(0.25, 1.0), seed=0))
        c = o.constants
        assert (c.L_f, c.mu_f, c.L_g, c.mu_g) == pytest.approx((64, 1, 64, 1), rel=1e-10)
        assert c.L_H == pytest.approx(1.0, rel=1e-10)

    @pytest.mark.parametrize("seed", range(3))
    def test_spectrum_fidelity(self, seed):
        o = pb.make_quadratic_game(pb.QuadraticGameSpec.from_constants(
            7, 5, L_f=40, mu_f=0.3, L_g=9, mu_g=2, L_H=3, mu_H=0.5, seed=seed))
        d = o.data
        e1 = np.linalg.eigvalsh(d["A1"])
        e3 = np.linalg.eigvalsh(d["A3"])
        sv = np.linalg.svd(d["A2"], compute_uv=False)
        np.testing.assert_allclose([2 * e1[-1], 2 * e1[0], 2 * e3[-1], 2 * e3[0], sv[0], sv[-1]],
                                   [40, 0.3, 9, 2, 3, 0.5], rtol=1e-10)

    def test_decoupled_without_offsets_has_zero_optimum(self):
        o = pb.make_quadratic_game(pb.QuadraticGameSpec(n=3, m=3, A1_eigs=(1, 2), A3_eigs=(1, 2),
                                                        A2_sq_eigs=(0, 0), seed=1))
        assert not np.any(o.optimum.flat)

    def test_optimum_matches_grid_search(self):
        # x^T x + y^T x - y^T y + x1 + x2: minimise over x of max over y
        o = pb.make_quadratic_game(pb.QuadraticGameSpec(n=2, m=2, A1=np.eye(2), A2=np.eye(2),
                                                        A3=np.eye(2), b1=np.ones(2)))
        # the objective separates by coordinate: x_i^2 + y_i x_i - y_i^2 + x_i
        grid = np.arange(-1.0, 1.0 + 1e-9, 1e-3)
        X, Y = np.meshgrid(grid, grid, indexing="ij")
        val = X**2 + Y * X - Y**2 + X
        i = np.argmin(val.max(axis=1))
        x_best = grid[i]
        y_best = grid[np.argmax(val[i])]
        np.testing.assert_allclose(o.optimum.x, [x_best] * 2, atol=1e-3)
        np.testing.assert_allclose(o.optimum.y, [y_best] * 2, atol=1e-3)

    def test_nonpositive_mu_rejected(self):
        with pytest.raises(InvalidSpecError):
            pb.make_quadratic_game(pb.QuadraticGameSpec(n=2, m=2, A1_eigs=(0, 1), A3_eigs=(1, 1)))

    def test_singular_explicit_game_has_no_optimum(self):
        o = pb.make_quadratic_game(pb.QuadraticGameSpec(
            n=2, m=1, A1=np.diag([1.0, 0.0]), A2=np.array([[1.0, 0.0]]), A3=np.eye(1)))
        assert o.optimum is None
        with pytest.raises(NoUniqueOptimumError):
            pb.exact_minimax(o)


class TestBilinear:
    def test_optimum_by_hand(self):
        o = pb.make_bilinear_game(pb.BilinearGameSpec(n=2, B=np.eye(2), u_x=np.ones(2)))
        assert o.optimum.flat.tolist() == [0, 0, -1, -1]

    def test_zero_offsets_zero_optimum(self):
        o = pb.make_bilinear_game(pb.BilinearGameSpec(n=3, lambda_range=(0.1, 2), seed=3))
        assert np.allclose(o.optimum.flat, 0)

    def test_diagonal_spectrum(self):
        o = pb.make_bilinear_game(pb.BilinearGameSpec(n=2, B=np.diag([1.0, 10.0])))
        assert o.constants.L_H == pytest.approx(10)
        assert o.data["lambda_min"] == pytest.approx(1)
        assert o.data["kappa"] == pytest.approx(100)

    def test_rotation_keeps_singular_values(self):
        t = 0.7
        R = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
        o = pb.make_bilinear_game(pb.BilinearGameSpec(n=2, B=R @ np.diag([3.0, 0.5])))
        assert o.data["lambda_max"] == pytest.approx(9)
        assert o.data["lambda_min"] == pytest.approx(0.25)

    def test_rank_deficient_rejected(self):
        with pytest.raises(InvalidSpecError):
            pb.make_bilinear_game(pb.BilinearGameSpec(n=2, B=np.array([[1.0, 1.0], [1.0, 1.0]])))

    def test_skew_coupling(self, rng):
        o = pb.make_bilinear_game(pb.BilinearGameSpec(n=4, lambda_range=(0.2, 3), seed=1))
        for _ in range(20):
            z, w = rng.standard_normal(8), rng.standard_normal(8)
            d = z - w
            assert abs((o.H(z) - o.H(w)) @ d) <= 1e-12 * (d @ d)


class TestMSPBE:
    def test_scalar_saddle(self):
        # (1/2)x^2 - yx - (1/2)y^2 + y: eliminating y gives y = 1 - x, then x = 1/2
        o = pb.mspbe_from_data([[1.0]], [1.0], [[1.0]], mu=1.0)
        np.testing.assert_allclose(o.optimum.flat, [0.5, 0.5], atol=1e-14)

    def test_unregularized_optimum_is_A_inverse_b(self, rng):
        A = rng.standard_normal((4, 4)) + 4 * np.eye(4)
        b = rng.standard_normal(4)
        o = pb.mspbe_from_data(A, b, np.eye(4) + 0.1 * np.ones((4, 4)), mu=0.0)
        np.testing.assert_allclose(o.optimum.x, np.linalg.solve(A, b), rtol=1e-10)

    def test_zero_discount_is_symmetric(self):
        o = pb.make_mspbe(20, 4, gamma=0.0, seed=2)
        np.testing.assert_allclose(o.data["A"], o.data["C"], atol=1e-14)

    def test_random_residual(self):
        o = pb.make_mspbe(30, 5, gamma=0.9, seed=7)
        M, q = o.linear
        assert np.linalg.norm(M @ o.optimum.flat + q) <= 1e-10

    def test_singular_covariance_rejected(self):
        with pytest.raises(InvalidSpecError):
            pb.mspbe_from_data(np.eye(2), np.ones(2), np.diag([1.0, 0.0]))

    def test_bad_gamma(self):
        with pytest.raises(InvalidSpecError):
            pb.make_mspbe(5, 2, gamma=1.0)


class TestRobustLS:
    def test_identity_block_solve(self):
        # x = y from the x-block, x + y = 2 y0 from the y-block (A = I, rho = 1)
        y0 = np.array([1.0, 2.0])
        o = pb.robust_ls_from_data(np.eye(2), y0, rho=1.0)
        np.testing.assert_allclose(o.optimum.flat, [1, 2, 1, 2], atol=1e-14)

    def test_rho_boundary(self):
        pb.make_robust_ls(3, 4, rho=0.6, R=1.0)
        with pytest.raises(InvalidSpecError):
            pb.make_robust_ls(3, 4, rho=0.5, R=1.0)

    def test_seeded_residual(self):
        o = pb.make_robust_ls(3, 4, rho=1.0, R=0.5, seed=3)
        M, q = o.linear
        assert np.linalg.norm(M @ o.optimum.flat + q) <= 1e-10


class TestFiniteDifferences:
    """Central differences of the objective against the analytic oracles."""

    def _instances(self):
        yield pb.make_quadratic_game(pb.QuadraticGameSpec.from_constants(
            4, 3, 10, 1, 5, 2, 2, seed=1, b1=np.ones(4), b2=-np.ones(3)))
        yield pb.make_bilinear_game(pb.BilinearGameSpec(n=3, lambda_range=(0.5, 2), seed=2,
                                                        u_x=np.ones(3), u_y=np.arange(3.0)))
        yield pb.make_mspbe(10, 3, 0.8, seed=1)
        yield pb.make_robust_ls(3, 4, rho=1.0, R=1.0, seed=1)

    def test_gradients(self, rng):
        for o in self._instances():
            z = rng.standard_normal(o.dim)
            x, y = z[: o.n], z[o.n :]
            h = 1e-6 * (1 + np.linalg.norm(z))

            def fd(fun, v):
                g = np.empty_like(v)
                for i in range(v.size):
                    e = np.zeros_like(v)
                    e[i] = h
                    g[i] = (fun(v + e) - fun(v - e)) / (2 * h)
                return g

            pairs = [(fd(o.f, x), o.grad_f(x)), (fd(o.g, y), o.grad_g(y)),
                     (fd(lambda u: o.I(u, y), x), o.grad_I_x(x, y)),
                     (fd(lambda u: o.I(x, u), y), o.grad_I_y(x, y))]
            for num, ana in pairs:
                err = np.linalg.norm(num - ana) / max(np.linalg.norm(ana), 1e-8)
                assert err <= 1e-5, (o.family, err)


class TestRescale:
    def test_optimum_and_field(self, rng):
        o = pb.make_quadratic_game(pb.QuadraticGameSpec.from_constants(
            3, 2, 8, 1, 2, 0.25, 1, seed=1, b1=np.ones(3), b2=np.ones(2)))
        s = 0.5
        ob = pb.rescale_y(o, s)
        np.testing.assert_allclose(ob.optimum.y, s * o.optimum.y, rtol=1e-12)
        np.testing.assert_allclose(ob.optimum.x, o.optimum.x, rtol=1e-12)


class TestNoise:
    def _base(self):
        return pb.make_quadratic_game(pb.QuadraticGameSpec.from_constants(
            3, 3, 4, 1, 4, 1, 1, seed=0, b1=np.ones(3), b2=np.ones(3)))

    @pytest.mark.parametrize("kind", ["additive", "matrix_perturbation"])
    def test_zero_sigma_is_exact(self, kind, rng):
        o = self._base()
        so = pb.wrap_stochastic(o, pb.NoiseModel(kind, 0.0, 0.0, seed=1))
        z = rng.standard_normal(6)
        c = CallCounter()
        assert np.array_equal(so.H(z, c), o.H(z)) and np.array_equal(so.gradF(z, c), o.gradF(z))

    def test_additive_mean_and_variance(self):
        o = self._base()
        so = pb.wrap_stochastic(o, pb.NoiseModel("additive", 0.1, 0.1, seed=3))
        N = 100_000
        z = np.zeros(6)
        c = CallCounter()
        hs = np.array([so.H(z, c) for _ in range(N)]) - o.H(z)
        assert np.linalg.norm(hs.mean(axis=0)) <= 4 * 0.1 / np.sqrt(N)
        assert np.mean(np.sum(hs**2, axis=1)) <= 0.01 * (1 + 4 * np.sqrt(2 / N))

    def test_matrix_perturbation_equals_perturbed_matrices(self, rng):
        o = self._base()
        noise = pb.NoiseModel("matrix_perturbation", 0.3, 0.2, seed=5)
        so = pb.wrap_stochastic(o, noise, stream=2)
        z = rng.standard_normal(6)
        x, y = z[:3], z[3:]
        c = CallCounter()
        h = so.H(z, c)
        f = so.gradF(z, c)
        eh = so._h.sample(0).reshape(3, 3)
        ef = so._f.sample(0)
        E1, E3 = ef[:9].reshape(3, 3), ef[9:].reshape(3, 3)
        d = o.data
        A1, A2, A3 = d["A1"] + 0.2 * E1, d["A2"] + 0.3 * eh, d["A3"] + 0.2 * E3
        # gradients of x^T A1 x + y^T A2 x - y^T A3 y with the perturbed matrices
        np.testing.assert_allclose(h, np.concatenate([A2.T @ y, -A2 @ x]), atol=1e-14)
        np.testing.assert_allclose(f, np.concatenate([(A1 + A1.T) @ x + d["b1"],
                                                      (A3 + A3.T) @ y - d["b2"]]), atol=1e-14)

    def test_sample_depends_only_on_index(self):
        so = pb.wrap_stochastic(self._base(), pb.NoiseModel("additive", 1, 1, seed=9), stream=4)
        a = [so._h.sample(j).copy() for j in (5, 3000, 1)]
        fresh = so.for_stream(4)
        b = [fresh._h.sample(j) for j in (1, 3000, 5)]
        for u, v in zip(a, reversed(b)):
            assert np.array_equal(u, v)

    def test_streams_differ(self):
        noise = pb.NoiseModel("additive", 1, 1, seed=9)
        a = pb.wrap_stochastic(self._base(), noise, stream=0)._h.sample(0)
        b = pb.wrap_stochastic(self._base(), noise, stream=1)._h.sample(0)
        assert not np.array_equal(a, b)

    def test_oracle_kinds_are_independent_streams(self):
        so = pb.wrap_stochastic(self._base(), pb.NoiseModel("additive", 1, 1, seed=9))
        assert not np.array_equal(so._h.sample(0), so._f.sample(0))

    def test_matrix_noise_needs_matrix_family(self):
        o = pb.make_robust_ls(2, 2, 1.0, 1.0)
        with pytest.raises(Exception):
            pb.wrap_stochastic(o, pb.NoiseModel("matrix_perturbation", 0.1, 0.1))


def test_haar_is_orthogonal(rng):
    for d in (1, 3, 8):
        Q = pb.haar_orthogonal(d, rng)
        np.testing.assert_allclose(Q @ Q.T, np.eye(d), atol=1e-13)


def test_op_norm_power_iteration_matches_svd(rng):
    A = rng.standard_normal((600, 40))
    assert pb.op_norm(A) == pytest.approx(np.linalg.svd(A, compute_uv=False)[0], rel=1e-10)


def test_spread_endpoints_exact():
    for lo, hi, k in itertools.product((0.3, 1.0), (5.0, 7.0), (2, 5)):
        v = pb.spread(lo, hi, k)
        assert v[0] == lo and v[-1] == hi
