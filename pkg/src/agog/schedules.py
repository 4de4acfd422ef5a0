"""
Closed-form parameter schedules: stepsizes, averaging weights, scaling
reduction, restart epoch lengths and counts, and the matching error bounds.

All irrational constants are computed from ``math`` at import time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from .core import ProblemConstants
from .errors import ConfigurationError, DegenerateProblemError

SQRT_3P3 = math.sqrt(3.0 + math.sqrt(3.0))  # sqrt(3 + sqrt 3)
SQRT_2P2 = math.sqrt(2.0 + math.sqrt(2.0))  # sqrt(2 + sqrt 2)
C_DET = 2.0 / (3.0 + math.sqrt(3.0))
C_STOCH = 1.0 / (2.0 + math.sqrt(2.0))
E = math.e


def alpha(k: int) -> float:
    """Averaging weight ``2 / (k + 2)``."""
    return 2.0 / (k + 2)


def eta_agog(k: int, L: float, L_H: float) -> float:
    """Deterministic AG-OG stepsize ``(k+2) / (2L + sqrt(3+sqrt3) L_H (k+2))``."""
    if L < 0 or L_H < 0:
        raise ConfigurationError("L and L_H must be nonnegative")
    if L == 0 and L_H == 0:
        raise DegenerateProblemError("eta_agog undefined for L = L_H = 0")
    # divided through by k + 2 so the computed value is nondecreasing in k
    return 1.0 / (2.0 * L / (k + 2) + SQRT_3P3 * L_H)


def eta_sagog(k: int, L: float, L_H: float, D: float) -> float:
    """Stochastic AG-OG stepsize ``(k+2) / (4L + D + 4 sqrt(2+sqrt2) L_H (k+2))``."""
    if L < 0 or L_H < 0 or D < 0:
        raise ConfigurationError("L, L_H and D must be nonnegative")
    if L == 0 and L_H == 0 and D == 0:
        raise DegenerateProblemError("eta_sagog undefined for L = L_H = D = 0")
    return 1.0 / ((4.0 * L + D) / (k + 2) + 4.0 * SQRT_2P2 * L_H)


def noise_factor_A(K: int) -> float:
    """``A(K) = sqrt((K+1)(K+2)(2K+3) / 6)``."""
    if K < 0:
        raise ConfigurationError("K must be nonnegative")
    K = int(K)
    return math.sqrt((K + 1) * (K + 2) * (2 * K + 3) / 6.0)


def combined_sigma(sigma_H: float, sigma_F: float) -> float:
    """Overall noise level ``sqrt(3 sqrt2 sigma_H^2 + 2 sigma_F^2)``."""
    if sigma_H < 0 or sigma_F < 0:
        raise ConfigurationError("noise levels must be nonnegative")
    return math.sqrt(3.0 * math.sqrt(2.0) * sigma_H**2 + 2.0 * sigma_F**2)


def damping_D(sigma: float, K: int, dist0: Optional[float] = None,
              gamma0: Optional[float] = None, C: float = 1.0) -> float:
    """Stochastic damping term of the S-AG-OG stepsize.

    With the exact initial distance: ``D = (sigma / C) A(K) / dist0``.
    With only an upper bound ``gamma0 >= ||z0 - z*||``: ``D = sigma A(K) / gamma0``.
    ``dist0`` and ``gamma0`` are distances, not squared distances.
    """
    if sigma == 0:
        return 0.0
    if dist0 is not None:
        if dist0 <= 0:
            return 0.0 if sigma == 0 else math.inf
        return sigma * noise_factor_A(K) / (C * dist0)
    if gamma0 is None or gamma0 <= 0:
        raise ConfigurationError("damping_D needs dist0 or a positive gamma0")
    return sigma * noise_factor_A(K) / gamma0


@dataclass(frozen=True)
class ScaledConstants:
    L: float
    mu: float
    L_H: float


def scaling_reduce(c: ProblemConstants):
    """Constants after rescaling ``y_hat = sqrt(mu_g / mu_f) y``.

    Returns
    -------
    (ScaledConstants, y_ratio)
        ``y_ratio = mu_f / mu_g`` multiplies the stepsize on the y-block.
    """
    if c.mu_f <= 0 or c.mu_g <= 0:
        raise ConfigurationError(
            "scaling_reduce needs mu_f > 0 and mu_g > 0; regularize C-SC inputs first"
        )
    r = c.mu_f / c.mu_g
    L = max(c.L_f, r * c.L_g)
    L_H = max(c.I_xx, c.I_xy * math.sqrt(r), c.I_yy * r)
    return ScaledConstants(L=L, mu=c.mu_f, L_H=L_H), r


def epoch_length(L: float, mu: float, L_H: float) -> int:
    """Restart period ``ceil(max(sqrt(8 e L / mu), 4 e sqrt(3+sqrt3) L_H / mu))``."""
    if mu <= 0:
        raise ConfigurationError("epoch_length needs mu > 0")
    v = max(math.sqrt(8.0 * E * L / mu), 4.0 * E * SQRT_3P3 * L_H / mu)
    return max(1, math.ceil(v))


def epoch_count(sq_dist0: float, target_sq: float) -> int:
    """Number of ``1/e``-contracting epochs to go from ``sq_dist0`` to ``target_sq``."""
    if target_sq <= 0:
        raise ConfigurationError("target_sq must be positive")
    if sq_dist0 <= 0:
        return 0
    # slack absorbs rounding in log(e^j) for exact powers of e
    return max(0, math.ceil(math.log(sq_dist0 / target_sq) - 1e-12))


def bilinear_epoch_length(lambda_max: float, lambda_min: float) -> int:
    """Bilinear restart period ``ceil(8 sqrt(e lambda_max / lambda_min))``."""
    if lambda_min <= 0:
        raise ConfigurationError("lambda_min must be positive")
    return math.ceil(8.0 * math.sqrt(E * lambda_max / lambda_min))


def agog_direct_eta(L: float, mu_f: float, L_H: float) -> float:
    """Constant stepsize of the single-loop AG-OG-Direct variant."""
    if mu_f <= 0:
        raise ConfigurationError("AG-OG-Direct needs mu_f > 0")
    return 1.0 / ((1.0 + math.sqrt(L / mu_f + (SQRT_3P3 * L_H) ** 2 / mu_f**2)) * mu_f)


def agog_rate_bound(K: int, L: float, mu: float, L_H: float, sq_dist0: float) -> float:
    """Right-hand side of the deterministic AG-OG rate after ``K`` iterations."""
    return (4.0 * L / (mu * (K + 1) ** 2) + 2.0 * SQRT_3P3 * L_H / (mu * (K + 1))) * sq_dist0


def bilinear_rate_bound(K: int, lambda_max: float, lambda_min: float, sq_dist0: float) -> float:
    """Right-hand side of the bilinear-game rate after ``K`` iterations."""
    return 64.0 * lambda_max / (lambda_min * (K + 1) ** 2) * sq_dist0


@dataclass(frozen=True)
class ScheduleSet:
    """Everything a solver loop needs to know about its parameters.

    ``kind`` selects the stepsize rule: ``"agog"`` (deterministic), ``"sagog"``
    (stochastic, uses ``D``) or ``"constant"`` (``eta_const``).
    """

    L: float
    mu: float
    L_H: float
    y_ratio: float = 1.0
    kind: str = "agog"
    D: float = 0.0
    A_K: Optional[float] = None
    eta_const: Optional[float] = None
    epoch_len: Optional[int] = None
    n_epochs: Optional[int] = None

    def alpha(self, k: int) -> float:
        return alpha(k)

    def eta(self, k: int) -> float:
        if self.kind == "agog":
            return eta_agog(k, self.L, self.L_H)
        if self.kind == "sagog":
            return eta_sagog(k, self.L, self.L_H, self.D)
        if self.kind == "constant":
            return self.eta_const
        raise ConfigurationError(f"unknown schedule kind {self.kind!r}")

    def with_D(self, D: float, K: Optional[int] = None) -> "ScheduleSet":
        return replace(self, kind="sagog", D=D,
                       A_K=noise_factor_A(K) if K is not None else self.A_K)

    def metric(self, sq_x: float, sq_y: float) -> float:
        """Squared distance in the rescaled coordinates the schedule lives in."""
        return sq_x + sq_y / self.y_ratio


def _effective(c: ProblemConstants, scaling: bool):
    if scaling:
        s, r = scaling_reduce(c)
        return s.L, s.mu, s.L_H, r
    return c.L, c.mu, c.L_H, 1.0


def agog_schedule(c: ProblemConstants, scaling: bool = False) -> ScheduleSet:
    """Deterministic AG-OG schedule; ``scaling`` applies the two-stepsize reduction."""
    L, mu, L_H, r = _effective(c, scaling)
    return ScheduleSet(L=L, mu=mu, L_H=L_H, y_ratio=r, kind="agog")


def sagog_schedule(c: ProblemConstants, sigma: float, K: int, dist0: Optional[float] = None,
                   gamma0: Optional[float] = None, scaling: bool = False,
                   C: float = 1.0) -> ScheduleSet:
    """Stochastic AG-OG schedule for a run of horizon ``K``."""
    L, mu, L_H, r = _effective(c, scaling)
    D = damping_D(sigma, K, dist0=dist0, gamma0=gamma0, C=C)
    return ScheduleSet(L=L, mu=mu, L_H=L_H, y_ratio=r, kind="sagog", D=D,
                       A_K=noise_factor_A(K))


def constant_schedule(eta: float, c: Optional[ProblemConstants] = None,
                      y_ratio: float = 1.0) -> ScheduleSet:
    L = c.L if c is not None else 0.0
    mu = c.mu if c is not None else 0.0
    L_H = c.L_H if c is not None else 0.0
    return ScheduleSet(L=L, mu=mu, L_H=L_H, y_ratio=y_ratio, kind="constant", eta_const=eta)
