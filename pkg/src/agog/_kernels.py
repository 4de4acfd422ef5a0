"""Compiled inner loops for long runs on affine fields ``W(z) = M z + q``."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _affine(M, q, z, out):
    d = z.shape[0]
    for i in range(d):
        s = q[i]
        for j in range(d):
            s += M[i, j] * z[j]
        out[i] = s


@njit(cache=True)
def _ogda_hit(M, q, z0, zstar, eta, tol_sq, max_iter):
    d = z0.shape[0]
    z = z0.copy()
    w_prev = np.empty(d)
    w = np.empty(d)
    z_half = np.empty(d)
    _affine(M, q, z, w_prev)
    for k in range(max_iter):
        for i in range(d):
            z_half[i] = z[i] - eta * w_prev[i]
        _affine(M, q, z_half, w)
        s = 0.0
        for i in range(d):
            z[i] -= eta * w[i]
            r = z[i] - zstar[i]
            s += r * r
            w_prev[i] = w[i]
        if not np.isfinite(s):
            return -2
        if s <= tol_sq:
            return k + 1
    return -1


def ogda_iterations_to(M, q, z0, zstar, eta: float, tol_sq: float, max_iter: int) -> int:
    """Iterations until OGDA's last iterate satisfies ``|z_k - z*|^2 <= tol_sq``.

    Same recursion as :func:`agog.algorithms.ogda_run`.  Returns ``-1`` if the
    tolerance is not reached within ``max_iter`` and ``-2`` on overflow.
    """
    M = np.ascontiguousarray(M, dtype=np.float64)
    return int(_ogda_hit(M, np.ascontiguousarray(q, dtype=np.float64),
                         np.ascontiguousarray(z0, dtype=np.float64),
                         np.ascontiguousarray(zstar, dtype=np.float64), float(eta),
                         float(tol_sq), int(max_iter)))
