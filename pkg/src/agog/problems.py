"""
Synthetic separable minimax instances with exactly known minimax points.

Every generator returns an :class:`~agog.core.OracleBundle` whose gradient
field is affine, ``W(z) = M z + q``; the minimax point is obtained by a dense
solve of ``M z = -q`` and attached to the bundle.  Spectra are placed exactly by
orthogonal conjugation, so the smoothness and strong-convexity constants are
known in closed form rather than estimated.

:func:`wrap_stochastic` turns a bundle into a noisy oracle whose samples are
indexed by call number, so sample ``j`` does not depend on evaluation history.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import linalg as sla

from .core import CallCounter, OracleBundle, PairVector, ProblemConstants, affine_parts
from .errors import ConfigurationError, InvalidSpecError, NoUniqueOptimumError

# full SVD for the operator norm up to this size, power iteration beyond
SVD_LIMIT = 512


def haar_orthogonal(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal ``d x d`` matrix (QR with sign-fixed R)."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def spread(lo: float, hi: float, count: int) -> np.ndarray:
    """``count`` values from ``lo`` to ``hi`` inclusive, geometrically spaced."""
    if count == 1:
        if not math.isclose(lo, hi, rel_tol=0, abs_tol=0):
            raise InvalidSpecError(f"one eigenvalue cannot span [{lo}, {hi}]")
        return np.array([float(hi)])
    if lo == 0.0:
        return np.linspace(0.0, hi, count)
    v = np.geomspace(lo, hi, count)
    v[0], v[-1] = lo, hi
    return v


def op_norm(A: np.ndarray, tol: float = 1e-12, max_iter: int = 10_000) -> float:
    """Spectral norm: SVD at desk scale, power iteration on ``A^T A`` above."""
    if A.size == 0:
        return 0.0
    if max(A.shape) <= SVD_LIMIT:
        return float(np.linalg.svd(A, compute_uv=False)[0])
    rng = np.random.default_rng(0)
    v = rng.standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = A.T @ (A @ v)
        lam_new = float(np.linalg.norm(w))
        if lam_new == 0.0:
            return 0.0
        v = w / lam_new
        if abs(lam_new - lam) <= tol * lam_new:
            break
        lam = lam_new
    return math.sqrt(lam_new)


def _sym_from_spectrum(eigs: np.ndarray, rng) -> np.ndarray:
    Q = haar_orthogonal(eigs.size, rng)
    A = (Q * eigs) @ Q.T
    return 0.5 * (A + A.T)


# ---------------------------------------------------------------------------
# exact minimax point


def exact_minimax(oracle: OracleBundle) -> PairVector:
    """Solve ``M z* = -q`` for an instance with affine gradient field.

    Raises
    ------
    NoUniqueOptimumError
        If ``M`` is (numerically) singular.
    """
    if oracle.linear is None:
        raise ConfigurationError(f"{oracle.family} instance has no affine representation")
    M, q = oracle.linear
    s = np.linalg.svd(M, compute_uv=False)
    if s[-1] <= s[0] * M.shape[0] * np.finfo(float).eps * 10 or s[0] == 0:
        raise NoUniqueOptimumError(
            f"stationarity system of the {oracle.family} instance is singular "
            f"(sigma_min/sigma_max = {s[-1] / s[0] if s[0] else 0:.3e})"
        )
    lu = sla.lu_factor(M)
    z = sla.lu_solve(lu, -q)
    # one step of iterative refinement keeps the residual at rounding level
    z = z + sla.lu_solve(lu, -(M @ z + q))
    res = np.linalg.norm(M @ z + q)
    if res > 1e-10 * (s[0] * np.linalg.norm(z) + np.linalg.norm(q)) + 1e-300:
        raise NoUniqueOptimumError(f"linear solve residual {res:.3e} too large")
    return PairVector.from_flat(z, oracle.n)


def _attach_optimum(bundle: OracleBundle) -> OracleBundle:
    zstar = exact_minimax(bundle)
    M, q = bundle.linear
    w = np.linalg.norm(bundle.W(zstar.flat))
    scale = 1.0 + np.linalg.norm(q) + np.linalg.norm(M, 2) * np.linalg.norm(zstar.flat)
    if w > 1e-8 * scale:
        raise NoUniqueOptimumError(f"|W(z*)| = {w:.3e} exceeds tolerance")
    return bundle.replace(optimum=zstar)


# ---------------------------------------------------------------------------
# quadratic games


@dataclass
class QuadraticGameSpec:
    """``x^T A1 x + y^T A2 x - y^T A3 y + b1^T x + b2^T y``.

    Either give the spectra (``A1_eigs``, ``A3_eigs``: eigenvalue ranges;
    ``A2_sq_eigs``: range of the nonzero eigenvalues of ``A2^T A2``) or the
    matrices themselves.  Ranges are filled geometrically, endpoints included.
    """

    n: int
    m: int
    A1_eigs: Optional[Sequence[float]] = None
    A2_sq_eigs: Optional[Sequence[float]] = None
    A3_eigs: Optional[Sequence[float]] = None
    A1: Optional[np.ndarray] = None
    A2: Optional[np.ndarray] = None
    A3: Optional[np.ndarray] = None
    b1: Optional[np.ndarray] = None
    b2: Optional[np.ndarray] = None
    seed: int = 0

    @classmethod
    def from_constants(cls, n, m, L_f, mu_f, L_g, mu_g, L_H, mu_H=None, seed=0, b1=None, b2=None):
        """Spec whose instance has the given constants (``L_H = ||A2||``)."""
        mu_H = L_H if mu_H is None else mu_H
        return cls(n=n, m=m, A1_eigs=(mu_f / 2, L_f / 2), A3_eigs=(mu_g / 2, L_g / 2),
                   A2_sq_eigs=(mu_H**2, L_H**2), seed=seed, b1=b1, b2=b2)


def _check_range(name, r, positive):
    if r is None or len(r) != 2:
        raise InvalidSpecError(f"{name} must be a (low, high) pair")
    lo, hi = float(r[0]), float(r[1])
    if positive and lo <= 0:
        raise InvalidSpecError(f"{name} lower end must be positive, got {lo}")
    if lo < 0 or hi < lo:
        raise InvalidSpecError(f"{name} must satisfy 0 <= low <= high, got {r}")
    return lo, hi


def make_quadratic_game(spec: QuadraticGameSpec) -> OracleBundle:
    """Build a quadratic game with exact constants and attached minimax point.

    Games given by explicit ``A1`` or ``A3`` whose saddle point is not unique
    are returned with ``optimum=None``.
    """
    n, m = int(spec.n), int(spec.m)
    if n < 1 or m < 1:
        raise InvalidSpecError("n and m must be positive")
    rng = np.random.default_rng(spec.seed)

    if spec.A1 is not None:
        A1 = np.array(spec.A1, dtype=float)
        A1 = 0.5 * (A1 + A1.T)
        e1 = np.linalg.eigvalsh(A1)
        if e1[0] < -1e-12 * max(1.0, abs(e1[-1])):
            raise InvalidSpecError("A1 must be positive semidefinite")
        e1 = np.clip(e1, 0.0, None)
    else:
        lo, hi = _check_range("A1_eigs", spec.A1_eigs, positive=True)
        e1 = spread(lo, hi, n)
        A1 = _sym_from_spectrum(e1, rng)
    if spec.A3 is not None:
        A3 = np.array(spec.A3, dtype=float)
        A3 = 0.5 * (A3 + A3.T)
        e3 = np.linalg.eigvalsh(A3)
        if e3[0] < -1e-12 * max(1.0, abs(e3[-1])):
            raise InvalidSpecError("A3 must be positive semidefinite")
        e3 = np.clip(e3, 0.0, None)
    else:
        lo, hi = _check_range("A3_eigs", spec.A3_eigs, positive=True)
        e3 = spread(lo, hi, m)
        A3 = _sym_from_spectrum(e3, rng)
    if spec.A2 is not None:
        A2 = np.array(spec.A2, dtype=float).reshape(m, n)
        sv = np.linalg.svd(A2, compute_uv=False)
    else:
        lo, hi = _check_range("A2_sq_eigs", spec.A2_sq_eigs or (0.0, 0.0), positive=False)
        r = min(n, m)
        sv = np.sqrt(spread(lo, hi, r))
        U = haar_orthogonal(m, rng)[:, :r]
        V = haar_orthogonal(n, rng)[:, :r]
        A2 = (U * sv) @ V.T
    b1 = np.zeros(n) if spec.b1 is None else np.array(spec.b1, dtype=float).reshape(n)
    b2 = np.zeros(m) if spec.b2 is None else np.array(spec.b2, dtype=float).reshape(m)

    consts = ProblemConstants(
        L_f=2 * float(np.max(e1)), mu_f=2 * float(np.min(e1)),
        L_g=2 * float(np.max(e3)), mu_g=2 * float(np.min(e3)),
        I_xy=float(np.max(sv)) if sv.size else 0.0,
    )
    A1x2, A3x2, A2T = 2.0 * A1, 2.0 * A3, np.ascontiguousarray(A2.T)
    M = np.block([[A1x2, A2T], [-A2, A3x2]])
    q = np.concatenate([b1, -b2])
    bundle = OracleBundle(
        n=n, m=m,
        grad_f=lambda x: A1x2 @ x + b1,
        grad_g=lambda y: A3x2 @ y - b2,
        grad_I_x=lambda x, y: A2T @ y,
        grad_I_y=lambda x, y: A2 @ x,
        f=lambda x: float(x @ A1 @ x + b1 @ x),
        g=lambda y: float(y @ A3 @ y - b2 @ y),
        I=lambda x, y: float(y @ A2 @ x),
        constants=consts,
        linear=(M, q),
        affine_split=affine_parts(A1x2, A3x2, A2T, -A2, np.concatenate([b1, -b2]),
                                  np.zeros(n + m)),
        family="quadratic",
        data=dict(A1=A1, A2=A2, A3=A3, b1=b1, b2=b2, eig_A1=e1, eig_A3=e3, sv_A2=sv,
                  mu_H=float(np.min(sv)) if sv.size else 0.0),
    )
    if spec.A1 is not None or spec.A3 is not None:
        # explicit matrices may describe a convex-concave game without a unique
        # saddle point; it is returned without z* (see regularize_csc)
        try:
            return _attach_optimum(bundle)
        except NoUniqueOptimumError:
            return bundle
    return _attach_optimum(bundle)


# ---------------------------------------------------------------------------
# bilinear games


@dataclass
class BilinearGameSpec:
    """``I(x, y) = x^T B y + x^T u_x + u_y^T y`` with ``f = g = 0``.

    Give ``B`` directly or a range ``lambda_range`` of eigenvalues of ``B^T B``.
    """

    n: int
    B: Optional[np.ndarray] = None
    u_x: Optional[np.ndarray] = None
    u_y: Optional[np.ndarray] = None
    lambda_range: Optional[Sequence[float]] = None
    seed: int = 0


def make_bilinear_game(spec: BilinearGameSpec) -> OracleBundle:
    n = int(spec.n)
    rng = np.random.default_rng(spec.seed)
    if spec.B is not None:
        B = np.array(spec.B, dtype=float)
        if B.shape != (n, n):
            raise InvalidSpecError(f"B must be {n} x {n}, got {B.shape}")
        sv = np.linalg.svd(B, compute_uv=False)
    else:
        lo, hi = _check_range("lambda_range", spec.lambda_range, positive=True)
        sv = np.sqrt(spread(lo, hi, n))[::-1]
        B = (haar_orthogonal(n, rng) * sv) @ haar_orthogonal(n, rng).T
    if sv[-1] <= sv[0] * n * np.finfo(float).eps * 10:
        raise InvalidSpecError("B must have full rank")
    u_x = np.zeros(n) if spec.u_x is None else np.array(spec.u_x, dtype=float).reshape(n)
    u_y = np.zeros(n) if spec.u_y is None else np.array(spec.u_y, dtype=float).reshape(n)
    lam_max, lam_min = float(sv[0] ** 2), float(sv[-1] ** 2)
    BT = np.ascontiguousarray(B.T)
    zero = np.zeros((n, n))
    M = np.block([[zero, B], [-BT, zero]])
    q = np.concatenate([u_x, -u_y])
    bundle = OracleBundle(
        n=n, m=n,
        grad_f=lambda x: np.zeros_like(x),
        grad_g=lambda y: np.zeros_like(y),
        grad_I_x=lambda x, y: B @ y + u_x,
        grad_I_y=lambda x, y: BT @ x + u_y,
        f=lambda x: 0.0,
        g=lambda y: 0.0,
        I=lambda x, y: float(x @ B @ y + x @ u_x + u_y @ y),
        constants=ProblemConstants(L_f=0.0, L_g=0.0, mu_f=0.0, mu_g=0.0, I_xy=float(sv[0])),
        linear=(M, q),
        affine_split=affine_parts(zero, zero, B, -BT, np.zeros(2 * n), q),
        family="bilinear",
        data=dict(B=B, u_x=u_x, u_y=u_y, lambda_max=lam_max, lambda_min=lam_min,
                  kappa=lam_max / lam_min),
    )
    return _attach_optimum(bundle)


# ---------------------------------------------------------------------------
# policy evaluation (MSPBE) and robust least squares


def mspbe_from_data(A, b, C, mu: float = 1.0) -> OracleBundle:
    """Saddle form ``(mu/2)|x|^2 - y^T A x - (1/2)|y|_C^2 + b^T y``."""
    A = np.array(A, dtype=float, ndmin=2)
    C = np.array(C, dtype=float, ndmin=2)
    b = np.array(b, dtype=float).reshape(-1)
    d = A.shape[0]
    if A.shape != (d, d) or C.shape != (d, d) or b.size != d:
        raise InvalidSpecError("A, C must be d x d and b of length d")
    if mu < 0:
        raise InvalidSpecError("regularization mu must be nonnegative")
    C = 0.5 * (C + C.T)
    ec = np.linalg.eigvalsh(C)
    if ec[0] <= 1e-10 * max(ec[-1], 1e-300):
        raise InvalidSpecError("feature covariance C is rank deficient")
    AT = np.ascontiguousarray(A.T)
    M = np.block([[mu * np.eye(d), -AT], [A, C]])
    q = np.concatenate([np.zeros(d), -b])
    bundle = OracleBundle(
        n=d, m=d,
        grad_f=lambda x: mu * x,
        grad_g=lambda y: C @ y - b,
        grad_I_x=lambda x, y: -(AT @ y),
        grad_I_y=lambda x, y: -(A @ x),
        f=lambda x: 0.5 * mu * float(x @ x),
        g=lambda y: 0.5 * float(y @ C @ y) - float(b @ y),
        I=lambda x, y: -float(y @ A @ x),
        constants=ProblemConstants(L_f=mu, mu_f=mu, L_g=float(ec[-1]), mu_g=float(ec[0]),
                                   I_xy=op_norm(A)),
        linear=(M, q),
        affine_split=affine_parts(mu * np.eye(d), C, -AT, A, np.concatenate([np.zeros(d), -b]),
                                  np.zeros(2 * d)),
        family="mspbe",
        data=dict(A=A, b=b, C=C, mu=mu),
    )
    return _attach_optimum(bundle)


def make_mspbe(n_states: int, feature_dim: int, gamma: float, seed: int = 0,
               mu: float = 1.0, n_samples: Optional[int] = None) -> OracleBundle:
    """Policy-evaluation instance estimated from a seeded synthetic trajectory.

    A random Markov chain with Gaussian features and uniform rewards is
    simulated for ``n_samples`` transitions; the empirical ``A``, ``b``, ``C``
    define the saddle problem, regularized by ``(mu/2)|x|^2``.
    """
    if not 0.0 <= gamma < 1.0:
        raise InvalidSpecError(f"gamma must lie in [0, 1), got {gamma}")
    if feature_dim > n_states:
        raise InvalidSpecError("feature_dim cannot exceed n_states (C would be singular)")
    rng = np.random.default_rng(seed)
    T = n_samples or 50 * n_states
    P = rng.dirichlet(np.ones(n_states), size=n_states)
    phi = rng.standard_normal((n_states, feature_dim))
    reward = rng.uniform(0.0, 1.0, size=n_states)
    states = np.empty(T + 1, dtype=int)
    states[0] = rng.integers(n_states)
    cum = np.cumsum(P, axis=1)
    u = rng.uniform(size=T)
    for t in range(T):
        states[t + 1] = min(int(np.searchsorted(cum[states[t]], u[t])), n_states - 1)
    cur, nxt = phi[states[:-1]], phi[states[1:]]
    A = cur.T @ (cur - gamma * nxt) / T
    b = cur.T @ reward[states[:-1]] / T
    C = cur.T @ cur / T
    return mspbe_from_data(A, b, C, mu=mu)


def robust_ls_from_data(A, y0, rho: float) -> OracleBundle:
    """Penalized robust least squares ``(1/2)|Ax - y|^2 - rho |y - y0|^2``."""
    if rho <= 0.5:
        raise InvalidSpecError(f"rho must exceed 1/2 for strong concavity, got {rho}")
    A = np.array(A, dtype=float, ndmin=2)
    m, n = A.shape
    y0 = np.array(y0, dtype=float).reshape(m)
    AT = np.ascontiguousarray(A.T)
    AtA = AT @ A
    ea = np.clip(np.linalg.eigvalsh(AtA), 0.0, None)
    c = 2.0 * rho - 1.0
    M = np.block([[AtA, -AT], [A, c * np.eye(m)]])
    q = np.concatenate([np.zeros(n), -2.0 * rho * y0])
    bundle = OracleBundle(
        n=n, m=m,
        grad_f=lambda x: AtA @ x,
        grad_g=lambda y: c * y - 2.0 * rho * y0,
        grad_I_x=lambda x, y: -(AT @ y),
        grad_I_y=lambda x, y: -(A @ x),
        f=lambda x: 0.5 * float(x @ AtA @ x),
        g=lambda y: rho * float((y - y0) @ (y - y0)) - 0.5 * float(y @ y),
        I=lambda x, y: -float(y @ A @ x),
        constants=ProblemConstants(L_f=float(ea[-1]), mu_f=float(ea[0]), L_g=c, mu_g=c,
                                   I_xy=op_norm(A)),
        linear=(M, q),
        affine_split=affine_parts(AtA, c * np.eye(m), -AT, A, q, np.zeros(n + m)),
        family="robust_ls",
        data=dict(A=A, y0=y0, rho=rho),
    )
    return _attach_optimum(bundle)


def make_robust_ls(n: int, m: int, rho: float, R: float, seed: int = 0) -> OracleBundle:
    """Robust regression with observations ``y0 = A x_true + e``, ``|e| = R``."""
    if rho <= 0.5:
        raise InvalidSpecError(f"rho must exceed 1/2 for strong concavity, got {rho}")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n)) / math.sqrt(m)
    e = rng.standard_normal(m)
    y0 = A @ rng.standard_normal(n) + R * e / np.linalg.norm(e)
    return robust_ls_from_data(A, y0, rho)


# ---------------------------------------------------------------------------
# rescaling of the y-block


def rescale_y(oracle: OracleBundle, s: float) -> OracleBundle:
    """Instance in coordinates ``(x, y_hat) = (x, s y)``.

    With ``s = sqrt(mu_g / mu_f)`` both blocks share the strong-convexity
    modulus ``mu_f``.
    """
    if s <= 0:
        raise ConfigurationError("scale must be positive")
    n = oracle.n
    c = oracle.constants
    inv = 1.0 / s

    def unscale(y):
        return y * inv

    t = np.concatenate([np.ones(n), np.full(oracle.m, inv)])
    lin = None
    if oracle.linear is not None:
        M, q = oracle.linear
        lin = (t[:, None] * M * t[None, :], t * q)
    split = None
    if oracle.affine_split is not None:
        MH, qH, MF, qF = oracle.affine_split
        split = (t[:, None] * MH * t[None, :], t * qH, t[:, None] * MF * t[None, :], t * qF)
    opt = None
    if oracle.optimum is not None:
        opt = PairVector(oracle.optimum.x, s * oracle.optimum.y)
    return OracleBundle(
        n=n, m=oracle.m,
        grad_f=oracle.grad_f,
        grad_g=lambda y: inv * oracle.grad_g(unscale(y)),
        grad_I_x=lambda x, y: oracle.grad_I_x(x, unscale(y)),
        grad_I_y=lambda x, y: inv * oracle.grad_I_y(x, unscale(y)),
        f=oracle.f,
        g=None if oracle.g is None else (lambda y: oracle.g(unscale(y))),
        I=None if oracle.I is None else (lambda x, y: oracle.I(x, unscale(y))),
        constants=ProblemConstants(L_f=c.L_f, mu_f=c.mu_f, L_g=c.L_g * inv**2,
                                   mu_g=c.mu_g * inv**2, I_xx=c.I_xx, I_xy=c.I_xy * inv,
                                   I_yy=c.I_yy * inv**2),
        optimum=opt,
        linear=lin,
        affine_split=split,
        family=oracle.family,
        data=dict(oracle.data, y_scale=s),
    )


# ---------------------------------------------------------------------------
# stochastic oracles


NOISE_KINDS = ("additive", "matrix_perturbation")
_KIND_CODES = {"H": 1, "F": 2}


@dataclass(frozen=True)
class NoiseModel:
    """Noise attached to a stochastic oracle.

    ``additive``: isotropic Gaussian vector with total second moment
    ``sigma_H^2`` (coupling) or ``sigma_F^2`` (individual gradient).
    ``matrix_perturbation``: every call perturbs the game matrices entrywise
    with fresh ``N(0, sigma^2)`` noise; ``sigma_H`` applies to ``A2`` (or ``B``),
    ``sigma_F`` to ``A1`` and ``A3``.
    """

    kind: str = "additive"
    sigma_H: float = 0.0
    sigma_F: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ConfigurationError(f"noise kind must be one of {NOISE_KINDS}, got {self.kind!r}")
        if self.sigma_H < 0 or self.sigma_F < 0:
            raise ConfigurationError("noise levels must be nonnegative")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigurationError("noise seed must be an unsigned 64-bit integer")


class _CounterStream:
    """Gaussian vectors indexed by call number, generated in keyed blocks.

    Block ``b`` is drawn from a Philox generator whose counter starts at
    ``[0, b, 0, 0]``, so row ``j`` depends only on the key and ``j``.
    """

    def __init__(self, key: np.ndarray, dim: int):
        self.key = key
        self.dim = dim
        self.block = max(1, min(1024, (1 << 18) // max(dim, 1)))
        self._b = -1
        self._rows = None

    def sample(self, j: int) -> np.ndarray:
        b, r = divmod(j, self.block)
        if b != self._b:
            bitgen = np.random.Philox(key=self.key, counter=np.array([0, b, 0, 0], dtype=np.uint64))
            self._rows = np.random.Generator(bitgen).standard_normal((self.block, self.dim))
            self._b = b
        return self._rows[r]


def _stream_key(master: int, stream: int, kind: str) -> np.ndarray:
    ss = np.random.SeedSequence([int(master), int(stream), _KIND_CODES[kind]])
    return ss.generate_state(2, dtype=np.uint64)


class StochasticOracle:
    """Noisy view of an :class:`OracleBundle`.

    Noise sample ``j`` of each oracle kind is a pure function of
    ``(noise.seed, stream, kind, j)``, where ``j`` is the value of the run's call
    counter when the call is made.
    """

    def __init__(self, base: OracleBundle, noise: NoiseModel, stream: int = 0):
        if noise.kind == "matrix_perturbation" and base.family not in ("quadratic", "bilinear"):
            raise ConfigurationError(
                f"matrix_perturbation noise needs a quadratic or bilinear instance, got {base.family}"
            )
        self.base = base
        self.noise = noise
        self.stream = int(stream)
        self._fallback = CallCounter()
        n, m = base.n, base.m
        self._n, self._m = n, m
        self._additive = noise.kind == "additive"
        self._quadratic = base.family == "quadratic"
        if noise.kind == "additive":
            h_dim = f_dim = n + m
        elif base.family == "quadratic":
            h_dim, f_dim = m * n, n * n + m * m
        else:
            h_dim, f_dim = n * m, 1
        self._h = _CounterStream(_stream_key(noise.seed, self.stream, "H"), h_dim)
        self._f = _CounterStream(_stream_key(noise.seed, self.stream, "F"), f_dim)

    def for_stream(self, stream: int) -> "StochasticOracle":
        return StochasticOracle(self.base, self.noise, stream)

    # delegated attributes
    n = property(lambda self: self.base.n)
    m = property(lambda self: self.base.m)
    dim = property(lambda self: self.base.dim)
    constants = property(lambda self: self.base.constants)
    optimum = property(lambda self: self.base.optimum)
    family = property(lambda self: self.base.family)
    data = property(lambda self: self.base.data)
    linear = property(lambda self: self.base.linear)
    has_values = property(lambda self: self.base.has_values)

    def F_value(self, z):
        return self.base.F_value(z)

    def H(self, z: np.ndarray, counter: Optional[CallCounter] = None) -> np.ndarray:
        counter = counter if counter is not None else self._fallback
        j = counter.h_calls
        h = self.base.H(z, counter)
        s = self.noise.sigma_H
        if s == 0:
            return h
        e = self._h.sample(j)
        if self._additive:
            return h + (s / math.sqrt(e.size)) * e
        n, m = self._n, self._m
        x, y = z[:n], z[n:]
        if self._quadratic:
            E2 = e.reshape(m, n)  # perturbation of A2
            h[:n] += s * (y @ E2)
            h[n:] -= s * (E2 @ x)
        else:
            E = e.reshape(n, n)  # perturbation of B
            h[:n] += s * (E @ y)
            h[n:] -= s * (x @ E)
        return h

    def gradF(self, z: np.ndarray, counter: Optional[CallCounter] = None) -> np.ndarray:
        counter = counter if counter is not None else self._fallback
        j = counter.f_calls
        gF = self.base.gradF(z, counter)
        s = self.noise.sigma_F
        if s == 0 or not (self._additive or self._quadratic):
            return gF
        e = self._f.sample(j)
        if self._additive:
            return gF + (s / math.sqrt(e.size)) * e
        n, m = self._n, self._m
        nn = n * n
        E1 = e[:nn].reshape(n, n)
        E3 = e[nn:].reshape(m, m)
        x, y = z[:n], z[n:]
        # (E + E^T) v computed as E v + v E
        gF[:n] += s * (E1 @ x + x @ E1)
        gF[n:] += s * (E3 @ y + y @ E3)
        return gF

    def W(self, z: np.ndarray, counter: Optional[CallCounter] = None) -> np.ndarray:
        return self.gradF(z, counter) + self.H(z, counter)

    def effective_sigmas(self, radius: Optional[float] = None):
        """``(sigma_H, sigma_F)`` bounds on the per-call noise second moment.

        For matrix perturbations the noise scales with the iterate, so a bound
        ``radius >= |z|`` on the region visited is required.
        """
        if self.noise.kind == "additive":
            return self.noise.sigma_H, self.noise.sigma_F
        if radius is None:
            raise ConfigurationError("matrix_perturbation noise needs an iterate-norm bound")
        d = max(self.n, self.m)
        sH = self.noise.sigma_H * math.sqrt(d) * radius
        sF = 0.0 if self.family == "bilinear" else self.noise.sigma_F * math.sqrt(2 * (d + 1)) * radius
        return sH, sF


def wrap_stochastic(oracle: OracleBundle, noise: NoiseModel, stream: int = 0) -> StochasticOracle:
    """Wrap a deterministic instance with a seeded, counter-indexed noise model."""
    return StochasticOracle(oracle, noise, stream)
