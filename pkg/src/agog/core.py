"""
Block vectors, oracle bundles and diagnostics for separable minimax problems.

A separable problem reads ``min_x max_y f(x) + I(x, y) - g(y)``.  Its gradient
field splits as ``W(z) = grad F(z) + H(z)`` with

    grad F(z) = [grad f(x); grad g(y)]
    H(z)      = [grad_x I(x, y); -grad_y I(x, y)]

Solvers work on flat ``float64`` arrays ``z = [x; y]``; :class:`PairVector` is the
public, block-aware wrapper.  Oracle calls are tallied in a :class:`CallCounter`
owned by each run, never in global state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from .errors import ConfigurationError, UnsupportedDiagnosticError

# above this many coordinates squared distances use compensated summation
FSUM_THRESHOLD = 10_000


@dataclass(frozen=True, eq=False)
class PairVector:
    """A point ``z = [x; y]`` with fixed block sizes ``n = len(x)``, ``m = len(y)``."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(-1)
        y = np.array(self.y, dtype=float).reshape(-1)
        if x.size < 1 or y.size < 1:
            raise ConfigurationError("both blocks of a PairVector need at least one entry")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ConfigurationError("PairVector entries must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def m(self) -> int:
        return self.y.size

    @property
    def flat(self) -> np.ndarray:
        return np.concatenate([self.x, self.y])

    @classmethod
    def from_flat(cls, z, n: int) -> "PairVector":
        z = np.asarray(z, dtype=float)
        return cls(z[:n], z[n:])

    @classmethod
    def zeros(cls, n: int, m: int) -> "PairVector":
        return cls(np.zeros(n), np.zeros(m))

    def __repr__(self):
        return f"PairVector(x={self.x!r}, y={self.y!r})"


@dataclass(frozen=True)
class ProblemConstants:
    """Smoothness and strong-convexity constants of a separable instance.

    ``L_H`` is always derived as ``max(I_xx, I_yy) + I_xy``; it is never passed in.
    """

    L_f: float
    L_g: float
    mu_f: float
    mu_g: float
    I_xx: float = 0.0
    I_xy: float = 0.0
    I_yy: float = 0.0

    def __post_init__(self):
        for name in ("L_f", "L_g", "mu_f", "mu_g", "I_xx", "I_xy", "I_yy"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0:
                raise ConfigurationError(f"{name} must be finite and nonnegative, got {v}")
            object.__setattr__(self, name, v)
        # relative slack: constants computed from spectra may carry rounding
        if self.mu_f > self.L_f * (1 + 1e-12):
            raise ConfigurationError(f"mu_f={self.mu_f} exceeds L_f={self.L_f}")
        if self.mu_g > self.L_g * (1 + 1e-12):
            raise ConfigurationError(f"mu_g={self.mu_g} exceeds L_g={self.L_g}")

    @property
    def L_H(self) -> float:
        return coupling_smoothness(self)

    @property
    def L(self) -> float:
        return max(self.L_f, self.L_g)

    @property
    def mu(self) -> float:
        return min(self.mu_f, self.mu_g)


def affine_parts(Fxx, Fyy, Hxy, Hyx, qF, qH) -> tuple:
    """Assemble ``(M_H, q_H, M_F, q_F)`` for a bilinearly coupled quadratic.

    ``grad F(z) = blockdiag(Fxx, Fyy) z + qF`` and
    ``H(z) = [[0, Hxy], [Hyx, 0]] z + qH``.
    """
    n, m = Fxx.shape[0], Fyy.shape[0]
    MF = np.zeros((n + m, n + m))
    MF[:n, :n] = Fxx
    MF[n:, n:] = Fyy
    MH = np.zeros((n + m, n + m))
    MH[:n, n:] = Hxy
    MH[n:, :n] = Hyx
    return (MH, np.asarray(qH, dtype=float), MF, np.asarray(qF, dtype=float))


def coupling_smoothness(c: ProblemConstants) -> float:
    """``L_H = (I_xx v I_yy) + I_xy``, the single place this is computed."""
    return max(c.I_xx, c.I_yy) + c.I_xy


@dataclass
class CallCounter:
    """Per-run oracle call tallies."""

    h_calls: int = 0
    f_calls: int = 0

    def copy(self) -> "CallCounter":
        return CallCounter(self.h_calls, self.f_calls)


Grad1 = Callable[[np.ndarray], np.ndarray]
Grad2 = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class OracleBundle:
    """Deterministic first-order oracles of a separable minimax instance.

    Parameters
    ----------
    n, m : int
        Block dimensions of ``x`` and ``y``.
    grad_f, grad_g : callable
        ``x -> grad f(x)`` and ``y -> grad g(y)``.
    grad_I_x, grad_I_y : callable
        ``(x, y) -> grad_x I(x, y)`` and ``(x, y) -> grad_y I(x, y)``.
    constants : ProblemConstants
    optimum : PairVector, optional
        The exact minimax point, when known.
    f, g, I : callable, optional
        Function values; needed only by gap diagnostics.
    linear : (M, q), optional
        Affine representation ``W(z) = M z + q`` for linear-gradient families.
    family : str
        Instance family tag (``"quadratic"``, ``"bilinear"``, ...).
    data : mapping
        Family-specific arrays and spectra (e.g. ``B``, ``lambda_min``).
    affine_split : (M_H, q_H, M_F, q_F), optional
        ``H(z) = M_H z + q_H`` and ``grad F(z) = M_F z + q_F``; when present the
        flat oracles use these single matrix-vector products instead of the
        block callables.
    """

    n: int
    m: int
    grad_f: Grad1
    grad_g: Grad1
    grad_I_x: Grad2
    grad_I_y: Grad2
    constants: ProblemConstants
    optimum: Optional[PairVector] = None
    f: Optional[Callable] = None
    g: Optional[Callable] = None
    I: Optional[Callable] = None
    linear: Optional[tuple] = None
    family: str = "generic"
    data: Mapping = field(default_factory=dict)
    affine_split: Optional[tuple] = None

    @property
    def dim(self) -> int:
        return self.n + self.m

    @property
    def has_values(self) -> bool:
        return self.f is not None and self.g is not None and self.I is not None

    # flat-array oracles used by the solver loops

    def H(self, z: np.ndarray, counter: Optional[CallCounter] = None) -> np.ndarray:
        if counter is not None:
            counter.h_calls += 1
        if self.affine_split is not None:
            return self.affine_split[0] @ z + self.affine_split[1]
        x, y = z[: self.n], z[self.n :]
        return np.concatenate([self.grad_I_x(x, y), -self.grad_I_y(x, y)])

    def gradF(self, z: np.ndarray, counter: Optional[CallCounter] = None) -> np.ndarray:
        if counter is not None:
            counter.f_calls += 1
        if self.affine_split is not None:
            return self.affine_split[2] @ z + self.affine_split[3]
        return np.concatenate([self.grad_f(z[: self.n]), self.grad_g(z[self.n :])])

    def W(self, z: np.ndarray, counter: Optional[CallCounter] = None) -> np.ndarray:
        return self.gradF(z, counter) + self.H(z, counter)

    def F_value(self, z: np.ndarray) -> float:
        return float(self.f(z[: self.n]) + self.g(z[self.n :]))

    def objective(self, x, y) -> float:
        """``f(x) + I(x, y) - g(y)``."""
        if not self.has_values:
            raise UnsupportedDiagnosticError(f"{self.family} instance exposes no function values")
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return float(self.f(x) + self.I(x, y) - self.g(y))

    def replace(self, **changes) -> "OracleBundle":
        import dataclasses

        return dataclasses.replace(self, **changes)


def _check(oracle, z: PairVector):
    if not isinstance(z, PairVector):
        raise ConfigurationError(f"expected a PairVector, got {type(z).__name__}")
    if (z.n, z.m) != (oracle.n, oracle.m):
        raise ConfigurationError(
            f"dimension mismatch: point has blocks ({z.n}, {z.m}), "
            f"oracle expects ({oracle.n}, {oracle.m})"
        )


def field_W(oracle, z: PairVector, counter: Optional[CallCounter] = None) -> PairVector:
    """Full gradient field ``W(z) = [grad f + grad_x I; -grad_y I + grad g]``.

    Calls each of the four sub-oracles once and bumps both counters.
    """
    _check(oracle, z)
    return PairVector.from_flat(oracle.W(z.flat, counter), oracle.n)


def operator_H(oracle, z: PairVector, counter: Optional[CallCounter] = None) -> PairVector:
    """Coupling operator ``H(z) = [grad_x I; -grad_y I]``."""
    _check(oracle, z)
    return PairVector.from_flat(oracle.H(z.flat, counter), oracle.n)


def grad_F(oracle, z: PairVector, counter: Optional[CallCounter] = None) -> PairVector:
    """Individual-component gradient ``[grad f(x); grad g(y)]``."""
    _check(oracle, z)
    return PairVector.from_flat(oracle.gradF(z.flat, counter), oracle.n)


def _sq_norm(v: np.ndarray) -> float:
    if v.size > FSUM_THRESHOLD:
        return math.fsum((v * v).tolist())
    return float(v @ v)


def sq_dist_flat(z: np.ndarray, zstar: np.ndarray) -> float:
    return _sq_norm(z - zstar)


def sq_dist(z: PairVector, zstar: PairVector) -> float:
    """``||x - x*||^2 + ||y - y*||^2``."""
    if (z.n, z.m) != (zstar.n, zstar.m):
        raise ConfigurationError(
            f"dimension mismatch: ({z.n}, {z.m}) vs ({zstar.n}, {zstar.m})"
        )
    return _sq_norm(z.x - zstar.x) + _sq_norm(z.y - zstar.y)


def gap_V(oracle: OracleBundle, z: PairVector, zref: PairVector) -> float:
    """Point-wise primal-dual gap ``F(z) - F(zref) + <H(zref), z - zref>``.

    With ``zref = z*`` and ``F`` being ``mu``-strongly convex this is at least
    ``(mu / 2) ||z - z*||^2``.
    """
    if not getattr(oracle, "has_values", False):
        raise UnsupportedDiagnosticError(
            f"gap_V needs function values; {getattr(oracle, 'family', '?')} instance has none"
        )
    _check(oracle, z)
    _check(oracle, zref)
    return gap_V_flat(oracle, z.flat, zref.flat)


def gap_V_flat(oracle: OracleBundle, z: np.ndarray, zref: np.ndarray) -> float:
    h = oracle.H(zref)
    return oracle.F_value(z) - oracle.F_value(zref) + float(h @ (z - zref))
