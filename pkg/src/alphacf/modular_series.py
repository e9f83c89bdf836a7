"""Divisor-power sums and partial sums of the boundary sine series.

The series of interest is F_k(x) = sum_n sigma_{k-1}(n) n^{-(k+1)} sin(2 pi n x)
for even k >= 2; its convergence is governed by the same denominator sums the
CF machinery produces, so the condition diagnostic is re-exported here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .cf_core import Alpha
from .numkit import ExactNumber
from .opsreg import registered_op


@dataclass
class SigmaTable:
    """Sieved table of sigma_e(n) for n = 1..N (exact integers)."""

    N: int
    e: int
    table: list

    @classmethod
    def build(cls, N: int, e: int) -> "SigmaTable":
        """O(N log N) additions: every d contributes d^e to its multiples."""
        table = [0] * (N + 1)
        for d in range(1, N + 1):
            de = d ** e
            for m in range(d, N + 1, d):
                table[m] += de
        return cls(N=N, e=e, table=table)

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.N:
            raise IndexError(f"sigma table covers 1..{self.N}")
        return self.table[n]


def _factorize(n: int):
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        out.append((m, 1))
    return out


@registered_op("modular_series.divisor_sigma")
def divisor_sigma(n: int, e: int = 1) -> int:
    """sigma_e(n) = sum of d^e over divisors d of n, by trial factorization."""
    if n < 1:
        raise ValueError("divisor sums need n >= 1")
    if e < 0:
        raise ValueError("exponent must be >= 0")
    out = 1
    for p, a in _factorize(n):
        if e == 0:
            out *= a + 1
        else:
            pe = p ** e
            out *= (pe ** (a + 1) - 1) // (pe - 1)
    return out


@dataclass
class FkPartial:
    """Partial sum of the sine series with its crude absolute tail bound."""

    value: float
    n_terms: int
    tail_bound: float


def _sin_2pi(t: Fraction) -> float:
    """sin(2 pi t) by exact phase reduction into the first quadrant.

    Lattice phases give exact 0/±1, and mirrored arguments reuse the same
    float evaluation, so sin identities like oddness hold exactly.
    """
    u = t * 2  # half-turns
    u -= 2 * (u.numerator // (2 * u.denominator))  # u in [0, 2)
    sign = 1.0
    if u > 1:
        sign, u = -1.0, 2 - u
    if u == 0:
        return 0.0
    if u == Fraction(1, 2):
        return sign
    if u > Fraction(1, 2):
        u = 1 - u
    return sign * math.sin(math.pi * float(u))


@registered_op("modular_series.fourier_Fk_partial")
def fourier_Fk_partial(x, k: int = 2, N: int = 1000,
                       sigma_table: SigmaTable | None = None) -> FkPartial:
    """Partial sum to n = N of sigma_{k-1}(n) n^{-(k+1)} sin(2 pi n x).

    Rational x goes through exact phase reduction, so the lattice zeros
    (x = 0, 1/2, ...) come out exactly zero.  The reported tail bound is the
    crude sum of sigma_{k-1}(n)/n^{k+1} <= 2 n^{-3/2} past N.
    """
    if k < 2 or k % 2:
        raise ValueError("the sine series is defined for even k >= 2")
    if N < 0:
        raise ValueError("N must be >= 0")
    exact = isinstance(x, (int, Fraction))
    xf = None if exact else float(x)
    total = 0.0
    for n in range(1, N + 1):
        if sigma_table is not None and n <= sigma_table.N:
            sig = sigma_table[n]
        else:
            sig = divisor_sigma(n, k - 1)
        coeff = sig / n ** (k + 1)
        if exact:
            s = _sin_2pi(Fraction(x) * n)
        else:
            s = math.sin(2.0 * math.pi * n * xf)
        total += coeff * s
    tail = 4.0 / math.sqrt(N) if N else float("inf")
    return FkPartial(value=total, n_terms=N, tail_bound=tail)


@registered_op("modular_series.kbrjuno_condition_partial")
def kbrjuno_condition_partial(x: ExactNumber, k: int = 2, N: int = 20) -> float:
    """Partial sum of log(q_{n+1})/q_n^k over the regular-CF denominators.

    The convergence of this sum is the conjectured differentiability
    criterion for the k-th sine series; only the number is reported, never a
    differentiability verdict.
    """
    from .series_eval import proxy_sum

    return proxy_sum(x, Alpha.one(), k=k, N=N, alternating=False)


def f2_differentiability_report(x: ExactNumber, N: int = 40) -> dict:
    """The two quantities behind the k = 2 criterion, reported side by side."""
    from .cf_core import convergents, expand, normalize

    xn, _ = normalize(x, Alpha.one())
    e = expand(xn, Alpha.one(), N + 5)
    depth = N if e.n_digits_available(N) else len(e.digits)
    cond = kbrjuno_condition_partial(x, 2, depth)
    c = convergents(e, min(depth + 4, len(e.digits))
                    if e.period is None else depth + 4)
    ratios = [math.log(c.q_of(n + 4)) / c.q_of(n) ** 2
              for n in range(0, depth)]
    return {
        "condition_partial_sum": cond,
        "depth": depth,
        "last_log_q_ratio": ratios[-1] if ratios else float("nan"),
        "max_log_q_ratio_tail": max(ratios[depth // 2:]) if ratios else float("nan"),
    }
