"""Vectorized float64 evaluators for dense scans.

Quadrature and dyadic-scan workloads evaluate the Brjuno/Wilton series at
10^5..10^6 points; the exact kernels are far too slow for that.  These numpy
paths iterate the alpha-CF map on whole arrays in double precision.  They are
*not* certified: orbit digits drift after ~20 steps, but the series weights
those steps by beta ~ g^n, so pointwise errors stay around 1e-8, which is far
below any quadrature tolerance used here.  Points that collapse onto a
rational (orbit hits zero) just stop contributing; callers avoid sampling
rationals by using irrational node offsets.
"""

from __future__ import annotations

import numpy as np

DEFAULT_GRID_TERMS = 72
DEFAULT_GRID_TOL = 1e-13

_TINY = 1e-300


def _reduce_mod1(xs: np.ndarray, alpha: float) -> np.ndarray:
    t = xs - np.floor(xs)
    refl = t > alpha
    t[refl] = 1.0 - t[refl]
    return t


def series_grid(xs, alpha: float = 1.0, k: int = 1, signed: bool = False,
                terms: int = DEFAULT_GRID_TERMS,
                tol: float = DEFAULT_GRID_TOL) -> np.ndarray:
    """Brjuno (signed=False) or Wilton (signed=True, k=1) values on an array.

    Inputs are reduced by Z-periodicity and the even reflection into
    [0, alpha] first.  Elements whose orbit dies (rational hit) keep their
    partial sum; exact zeros yield +inf like the underlying singularity.
    """
    xs = np.asarray(xs, dtype=np.float64)
    cur = _reduce_mod1(xs.copy(), alpha)
    out = np.zeros_like(cur)
    beta_k = np.ones_like(cur)  # beta_{n-1}^k
    alive = cur > _TINY
    out[~alive] = np.inf
    sign = 1.0
    for _ in range(terms):
        if not alive.any():
            break
        c = cur[alive]
        out[alive] += sign * beta_k[alive] * np.log(1.0 / c)
        if k == 1:
            beta_k[alive] *= c
        else:
            beta_k[alive] *= c ** k
        inv = 1.0 / c
        nxt = np.abs(inv - np.floor(inv - alpha + 1.0))
        cur[alive] = nxt
        still = np.zeros_like(alive)
        still[alive] = (nxt > _TINY) & (beta_k[alive] > tol)
        alive = still
        if signed:
            sign = -sign
    return out


def wilton_grid(xs, alpha: float = 1.0, terms: int = DEFAULT_GRID_TERMS,
                tol: float = DEFAULT_GRID_TOL) -> np.ndarray:
    return series_grid(xs, alpha=alpha, k=1, signed=True, terms=terms, tol=tol)


def brjuno_grid(xs, alpha: float = 1.0, k: int = 1,
                terms: int = DEFAULT_GRID_TERMS,
                tol: float = DEFAULT_GRID_TOL) -> np.ndarray:
    return series_grid(xs, alpha=alpha, k=k, signed=False, terms=terms, tol=tol)
