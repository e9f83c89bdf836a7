"""Alpha-continued-fraction engine.

The map A_alpha(x) = |1/x - floor(1/x - alpha + 1)| on (0, alpha] drives
everything: digit extraction, orbits, signed convergents and beta products.
``alpha = 1`` is the regular (Gauss) continued fraction, ``alpha = 1/2`` the
nearest-integer one.  All state is immutable and arithmetic is exact for
Fraction and Surd inputs; BallFloat inputs carry certified radii and refuse
to guess at branch boundaries.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from mpmath import mp

from .errors import (
    AmbiguousComparison,
    AmbiguousFloor,
    ExpansionTooShort,
    OutOfDomain,
    PrecisionExhausted,
)
from .numkit import (
    EQ,
    GT,
    LT,
    BallFloat,
    ExactNumber,
    Surd,
    compare,
    floor_of,
    format_exact,
    is_zero,
    parse_exact,
    reciprocal,
    sign_of,
    to_mpf,
)
from .opsreg import registered_op

_HALF = Fraction(1, 2)
_ONE = Fraction(1)


@dataclass(frozen=True)
class Alpha:
    """Continued-fraction parameter, an exact value in [1/2, 1]."""

    value: Union[Fraction, Surd]

    def __post_init__(self):
        v = self.value
        if isinstance(v, int):
            object.__setattr__(self, "value", Fraction(v))
            v = self.value
        if not isinstance(v, (Fraction, Surd)):
            raise OutOfDomain("alpha must be an exact rational or surd")
        if compare(v, _HALF) == LT or compare(v, _ONE) == GT:
            raise OutOfDomain(f"alpha = {format_exact(v)} outside [1/2, 1]")

    @classmethod
    def one(cls):
        return cls(_ONE)

    @classmethod
    def half(cls):
        return cls(_HALF)

    @classmethod
    def golden(cls):
        from .numkit import GOLDEN

        return cls(GOLDEN)

    @classmethod
    def parse(cls, text: str):
        v = parse_exact(text)
        if isinstance(v, BallFloat):
            raise OutOfDomain("alpha must be exact; give a rational or surd")
        return cls(v)

    def __float__(self):
        return float(self.value)

    def __str__(self):
        return format_exact(self.value)


@registered_op("cf_core.alpha_step")
def alpha_step(x: ExactNumber, alpha: Alpha):
    """One step of the alpha-CF algorithm on x in (0, alpha].

    Returns (a, eps, x_next) with a = floor(1/x - alpha + 1),
    x_next = |1/x - a| and eps the sign of 1/x - a.  An exact hit 1/x = a
    terminates the expansion; its eps is recorded +1 (no successor digit
    exists to be signed) and x_next is an exact zero.
    """
    if sign_of(x) <= 0 or compare(x, alpha.value) == GT:
        raise OutOfDomain("alpha_step requires 0 < x <= alpha")
    u = reciprocal(x)
    a = floor_of(u - alpha.value + 1)
    w = u - a
    s = sign_of(w)
    if s == 0:
        zero = BallFloat(0, prec=x.prec) if isinstance(x, BallFloat) else Fraction(0)
        return a, 1, zero
    return a, s, abs(w)


@dataclass
class CFExpansion:
    """Digits and orbit of x under A_alpha, with termination/period flags.

    ``digits[i]`` is (a_{i+1}, eps_{i+1}); ``orbit[j]`` is x_j with
    orbit[0] = x. ``period = (preperiod, length)`` is detected only for Surd
    inputs, by exact repetition of canonical orbit states.  For periodic
    expansions digit/orbit access transparently cycles beyond the stored
    prefix.
    """

    x0: ExactNumber
    alpha: Alpha
    digits: list = field(default_factory=list)
    orbit: list = field(default_factory=list)
    terminated: bool = False
    period: Optional[tuple] = None
    # float orbit stopped early at an uncertifiable branch (runtime-only flag,
    # not part of the JSON schema)
    exhausted: bool = False

    def n_digits_available(self, want: int) -> bool:
        return self.period is not None or len(self.digits) >= want

    def digit_at(self, j: int):
        """(a_j, eps_j) for 1-based j, cycling through the period if any."""
        if j < 1:
            raise IndexError("digit indices start at 1")
        if j <= len(self.digits):
            return self.digits[j - 1]
        if self.period is None:
            raise ExpansionTooShort(
                f"digit {j} requested, only {len(self.digits)} available"
            )
        pre, length = self.period
        return self.digits[pre + (j - 1 - pre) % length]

    def orbit_at(self, j: int):
        """Exact orbit point x_j, cycling through the period if any."""
        if j < 0:
            raise IndexError("orbit indices start at 0")
        if j < len(self.orbit):
            return self.orbit[j]
        if self.period is None:
            raise ExpansionTooShort(
                f"orbit point {j} requested, only {len(self.orbit)} stored"
            )
        pre, length = self.period
        return self.orbit[pre + (j - pre) % length]

    def orbit_mpf(self, n: int, prec: int) -> list:
        """Orbit values x_0..x_n as mpf at working precision.

        Exact orbits (Fraction/Surd states) are converted pointwise, cycling
        through the period where one was detected, so values carry no replay
        drift.  Float orbits are replayed by applying the certified digits to
        the start value.
        """
        if not any(isinstance(v, BallFloat) for v in self.orbit[:1]):
            if self.period is not None:
                pre, length = self.period
                distinct = [to_mpf(self.orbit[j], prec)
                            for j in range(min(n, pre + length - 1) + 1)]
                vals = list(distinct)
                while len(vals) <= n:
                    vals.append(distinct[pre + (len(vals) - pre) % length])
                return vals
            return [to_mpf(v, prec)
                    for v in self.orbit[:min(n, len(self.orbit) - 1) + 1]]
        with mp.workprec(prec):
            vals = [to_mpf(self.x0, prec)]
            for j in range(1, n + 1):
                if j >= len(self.orbit):
                    break
                vprev = vals[-1]
                if vprev == 0:
                    break
                a, eps = self.digit_at(j)
                vals.append(eps * (1 / vprev - a))
            return vals

    def to_json(self) -> str:
        return json.dumps(
            {
                "x": format_exact(self.x0),
                "alpha": str(self.alpha),
                "digits": [[a, e] for a, e in self.digits],
                "terminated": self.terminated,
                "period": list(self.period) if self.period else None,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str):
        obj = json.loads(text)
        e = cls(
            x0=parse_exact(obj["x"]),
            alpha=Alpha.parse(obj["alpha"]),
            digits=[(int(a), int(s)) for a, s in obj["digits"]],
            terminated=bool(obj["terminated"]),
            period=tuple(obj["period"]) if obj["period"] else None,
        )
        return e


def _expand_once(x: ExactNumber, alpha: Alpha, max_steps: int) -> CFExpansion:
    e = CFExpansion(x0=x, alpha=alpha, orbit=[x])
    seen = {x.key(): 0} if isinstance(x, Surd) else None
    cur = x
    while len(e.digits) < max_steps:
        if is_zero(cur):
            e.terminated = True
            break
        try:
            a, eps, nxt = alpha_step(cur, alpha)
        except (AmbiguousFloor, AmbiguousComparison):
            e.exhausted = True
            break
        e.digits.append((a, eps))
        e.orbit.append(nxt)
        cur = nxt
        if seen is not None and isinstance(cur, Surd):
            idx = seen.get(cur.key())
            if idx is not None:
                e.period = (idx, len(e.orbit) - 1 - idx)
                break
            seen[cur.key()] = len(e.orbit) - 1
    else:
        if is_zero(cur):
            e.terminated = True
    return e


@registered_op("cf_core.expand")
def expand(x: ExactNumber, alpha: Alpha, max_steps: int,
           best_effort: bool = False) -> CFExpansion:
    """Expand x in [0, alpha] to at most max_steps digits.

    Rational inputs terminate at an exact zero; Surd inputs stop early when
    an orbit state repeats (period detected).  BallFloat orbits that hit an
    undecidable branch boundary are retried at escalated working precision
    (the interval endpoints are exact, so this is lossless).  If ambiguity
    survives the escalation, the certified prefix is returned with the
    ``exhausted`` flag when best_effort is set, else PrecisionExhausted is
    raised.
    """
    if max_steps < 0:
        raise OutOfDomain("max_steps must be >= 0")
    if sign_of(x) < 0 or compare(x, alpha.value) == GT:
        raise OutOfDomain("expand requires 0 <= x <= alpha; apply normalize first")
    attempt = x
    while True:
        e = _expand_once(attempt, alpha, max_steps)
        if not e.exhausted:
            return e
        if isinstance(attempt, BallFloat) and attempt.prec * 2 <= x.prec * 8 + 512:
            attempt = attempt.with_prec(attempt.prec * 2)
            continue
        if best_effort:
            return e
        raise PrecisionExhausted(
            f"float orbit undecidable at step {len(e.digits) + 1} "
            f"(working precision {getattr(attempt, 'prec', 'exact')})"
        )


@dataclass
class ConvergentSeq:
    """Signed-recurrence convergents p_j/q_j for j = -1..n, with exact betas.

    Seeds (p_-1, q_-1) = (1, 0), (p_0, q_0) = (0, 1) and eps_0 := +1, so a
    terminated expansion reproduces its rational exactly at the last index.
    """

    expansion: CFExpansion
    n: int
    p: list = field(default_factory=list)
    q: list = field(default_factory=list)

    def p_of(self, j: int) -> int:
        return self.p[j + 1]

    def q_of(self, j: int) -> int:
        return self.q[j + 1]

    def beta_of(self, j: int):
        """beta_j = |q_j x - p_j| in exact arithmetic (1 at j = -1)."""
        return abs(self.q_of(j) * self.expansion.x0 - self.p_of(j))


@registered_op("cf_core.convergents")
def convergents(e: CFExpansion, n: Optional[int] = None) -> ConvergentSeq:
    """Convergents up to index n (default: every stored digit)."""
    if n is None:
        n = len(e.digits)
    if not e.n_digits_available(n):
        raise ExpansionTooShort(f"{n} digits requested, {len(e.digits)} available")
    p = [1, 0]
    q = [0, 1]
    eps_prev = 1  # eps_0 := +1
    for j in range(1, n + 1):
        a, eps = e.digit_at(j)
        p.append(a * p[-1] + eps_prev * p[-2])
        q.append(a * q[-1] + eps_prev * q[-2])
        eps_prev = eps
    return ConvergentSeq(expansion=e, n=n, p=p, q=q)


@registered_op("cf_core.beta_products")
def beta_products(e: CFExpansion, n: int) -> list:
    """[beta_-1, ..., beta_n] with beta_-1 = 1 and beta_j = beta_{j-1} x_j."""
    if n >= 0 and not (e.period is not None or n < len(e.orbit)):
        raise ExpansionTooShort(f"orbit of length {n + 1} not available")
    betas = [Fraction(1)]
    for j in range(n + 1):
        betas.append(betas[-1] * e.orbit_at(j))
    return betas


@registered_op("cf_core.normalize")
def normalize(y: ExactNumber, alpha: Alpha):
    """Reduce y into [0, alpha] using Z-periodicity and evenness.

    Returns (x, reflected): x = y mod 1 when that lands in [0, alpha],
    otherwise 1 - (y mod 1) with the reflection flagged.
    """
    t = y - floor_of(y)
    if compare(t, alpha.value) != GT:
        return t, False
    return 1 - t, True
