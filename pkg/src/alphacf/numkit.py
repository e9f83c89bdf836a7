"""Exact and precision-tracked number kernels.

Three interchangeable value families are the input currency of the whole
package:

* ``fractions.Fraction`` -- exact rationals,
* ``Surd``               -- quadratic irrationals (a + b*sqrt(d))/c,
* ``BallFloat``          -- arbitrary-precision floats carrying a certified
                            error radius (outward-rounded intervals inside).

Every value is immutable and every operation is pure, so values can be
shared freely between concurrent workers.  Mixed arithmetic between the
families works through the usual operator protocol; surds with different
radicands are rejected rather than approximated.
"""

from __future__ import annotations

import re
from contextlib import contextmanager
from fractions import Fraction
from math import gcd, isqrt
from typing import Union

from mpmath import iv, mp

from .errors import (
    AmbiguousComparison,
    AmbiguousFloor,
    DivisionByZero,
    MixedRadicalError,
)
from .opsreg import registered_op

DEFAULT_PRECISION = 256

# Verdicts for compare().
LT, EQ, GT = -1, 0, 1

Rational = Fraction


@contextmanager
def _iv_prec(prec):
    """Temporarily set the interval context precision (iv has no workprec)."""
    old = iv.prec
    iv.prec = prec
    try:
        yield
    finally:
        iv.prec = old


def _squarefree_split(n: int) -> tuple[int, int]:
    """Write n = s**2 * f with f squarefree; return (s, f)."""
    if n <= 0:
        raise ValueError("radicand must be positive")
    s, f = 1, 1
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                f *= p
        p += 1 if p == 2 else 2
    return s, f * m


def _sign_lin(A: int, B: int, d: int) -> int:
    """Exact sign of A + B*sqrt(d) for integers A, B and squarefree d > 1."""
    if B == 0:
        return (A > 0) - (A < 0)
    if A == 0:
        return 1 if B > 0 else -1
    if A > 0 and B > 0:
        return 1
    if A < 0 and B < 0:
        return -1
    t = A * A - B * B * d
    if A > 0:  # B < 0: positive iff A^2 > B^2 d
        return (t > 0) - (t < 0)
    # A < 0, B > 0: positive iff B^2 d > A^2
    return (t < 0) - (t > 0)


def make_surd(a: int, b: int, c: int, d: int):
    """Canonical (a + b*sqrt(d))/c, degrading to Fraction when it is rational.

    The square part of d is folded into b; c is made positive and the gcd of
    (a, b, c) removed, so equality of surds is structural.
    """
    if c == 0:
        raise DivisionByZero("surd denominator c = 0")
    if d < 0:
        raise ValueError("negative radicand not supported")
    s, f = _squarefree_split(d) if d > 0 else (0, 0)
    b, d = b * s, f
    if b == 0 or d <= 1:
        return Fraction(a + b * (1 if d == 1 else 0), c)
    if c < 0:
        a, b, c = -a, -b, -c
    g = gcd(gcd(abs(a), abs(b)), c)
    if g > 1:
        a, b, c = a // g, b // g, c // g
    return Surd._raw(a, b, c, d)


class Surd:
    """Quadratic irrational (a + b*sqrt(d))/c in canonical form.

    Canonical means: d > 1 squarefree, b != 0, c > 0, gcd(a, b, c) = 1.
    Use :func:`make_surd` to construct; arithmetic keeps values canonical and
    returns a plain Fraction whenever the irrational part cancels.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: int, b: int, c: int, d: int):
        v = make_surd(a, b, c, d)
        if not isinstance(v, Surd):
            raise ValueError("value is rational; use make_surd or Fraction")
        object.__setattr__(self, "a", v.a)
        object.__setattr__(self, "b", v.b)
        object.__setattr__(self, "c", v.c)
        object.__setattr__(self, "d", v.d)

    @classmethod
    def _raw(cls, a, b, c, d):
        self = object.__new__(cls)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        return self

    def __setattr__(self, *_):
        raise AttributeError("Surd is immutable")

    def key(self):
        return (self.a, self.b, self.c, self.d)

    # -- helpers ----------------------------------------------------------

    def _coerce(self, other):
        """Return (p, q, r) with other = (p + q*sqrt(d))/r, or None."""
        if isinstance(other, Surd):
            if other.d != self.d:
                raise MixedRadicalError(
                    f"sqrt({self.d}) and sqrt({other.d}) do not mix"
                )
            return other.a, other.b, other.c
        if isinstance(other, int):
            return other, 0, 1
        if isinstance(other, Fraction):
            return other.numerator, 0, other.denominator
        return None

    def sign(self) -> int:
        return _sign_lin(self.a, self.b, self.d)

    def conjugate(self):
        return make_surd(self.a, -self.b, self.c, self.d)

    def floor(self) -> int:
        """Exact floor, via integer square-root bounds on b*sqrt(d)."""
        t = self.b * self.b * self.d
        s = isqrt(t)
        sf = s if self.b > 0 else -s - 1  # floor(b*sqrt(d)); irrational
        n = (self.a + sf) // self.c
        # n is within one of the true floor; fix up with exact comparisons.
        while _sign_lin(self.a - (n + 1) * self.c, self.b, self.d) >= 0:
            n += 1
        while _sign_lin(self.a - n * self.c, self.b, self.d) < 0:
            n -= 1
        return n

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        po = self._coerce(other)
        if po is None:
            return NotImplemented
        p, q, r = po
        return make_surd(self.a * r + p * self.c, self.b * r + q * self.c,
                         self.c * r, self.d)

    __radd__ = __add__

    def __neg__(self):
        return Surd._raw(-self.a, -self.b, self.c, self.d)

    def __sub__(self, other):
        po = self._coerce(other)
        if po is None:
            return NotImplemented
        p, q, r = po
        return make_surd(self.a * r - p * self.c, self.b * r - q * self.c,
                         self.c * r, self.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        po = self._coerce(other)
        if po is None:
            return NotImplemented
        p, q, r = po
        return make_surd(self.a * p + self.b * q * self.d,
                         self.a * q + self.b * p, self.c * r, self.d)

    __rmul__ = __mul__

    def _inverse(self):
        # c/(a + b*sqrt(d)) rationalized by the conjugate.
        den = self.a * self.a - self.b * self.b * self.d
        if den == 0:
            raise DivisionByZero("surd reciprocal")  # impossible canonically
        return make_surd(self.c * self.a, -self.c * self.b, den, self.d)

    def __truediv__(self, other):
        po = self._coerce(other)
        if po is None:
            return NotImplemented
        p, q, r = po
        if q == 0:
            if p == 0:
                raise DivisionByZero("division by zero")
            return make_surd(self.a * r, self.b * r, self.c * p, self.d)
        inv = make_surd(r * p, -r * q, p * p - q * q * self.d, self.d)
        return self * inv

    def __rtruediv__(self, other):
        return self._inverse() * other

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = Fraction(1)
        base = self
        while n:
            if n & 1:
                out = base * out
            base = base * base
            n >>= 1
        return out

    def __abs__(self):
        return self if self.sign() >= 0 else -self

    # -- comparisons -------------------------------------------------------

    def _cmp(self, other) -> int:
        po = self._coerce(other)
        if po is None:
            raise TypeError(f"cannot compare Surd with {type(other).__name__}")
        p, q, r = po
        # sign of self - other; both denominators positive after canon.
        rr = abs(r)
        pp, qq = (p, q) if r > 0 else (-p, -q)
        return _sign_lin(self.a * rr - pp * self.c,
                         self.b * rr - qq * self.c, self.d)

    def __eq__(self, other):
        if isinstance(other, Surd):
            return self.key() == other.key()
        if isinstance(other, (int, Fraction)):
            return False  # a canonical surd is irrational
        return NotImplemented

    def __hash__(self):
        return hash(("Surd",) + self.key())

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __float__(self):
        return float(self.mpf(96))

    def mpf(self, prec: int = DEFAULT_PRECISION):
        """Value as an mpf; guard digits cover coefficient size and cancellation."""
        guard = max(self.a.bit_length(), self.b.bit_length(),
                    self.c.bit_length(), 16) + 32
        with mp.workprec(prec + guard):
            r = (self.a + self.b * mp.sqrt(self.d)) / self.c
        with mp.workprec(prec):
            return +r

    def __repr__(self):
        return f"Surd({self.a}, {self.b}, {self.c}, {self.d})"

    def __str__(self):
        return format_exact(self)


GOLDEN = Surd(-1, 1, 2, 5)  # (sqrt(5) - 1)/2


class BallFloat:
    """Arbitrary-precision float with a certified, outward-rounded error radius.

    Backed by an mpmath interval; ``value`` is the midpoint and ``radius``
    half the width.  All arithmetic rounds outward, so a zero-width result
    is exact and interval tests (floor, comparison, sign) are sound.
    """

    __slots__ = ("_x", "prec")

    def __init__(self, value=0, radius=0, prec: int = DEFAULT_PRECISION,
                 _interval=None):
        object.__setattr__(self, "prec", prec)
        if _interval is not None:
            object.__setattr__(self, "_x", _interval)
            return
        if isinstance(value, str):
            # decimal text is parsed AT the requested precision: the value is
            # the nearest representable float, radius 0; radii then track
            # arithmetic error only (exact inputs go through Fraction/Surd).
            with mp.workprec(prec):
                value = mp.mpf(value)
        with _iv_prec(prec):
            x = _to_interval(value)
            if radius:
                x = x + iv.mpf([-1, 1]) * abs(_to_interval(radius))
        object.__setattr__(self, "_x", x)

    def __setattr__(self, *_):
        raise AttributeError("BallFloat is immutable")

    # -- interval views ----------------------------------------------------
    # iv endpoint access yields zero-width intervals; convert to plain mpf
    # at own precision (exact: same mantissa size).

    @property
    def lower(self):
        with mp.workprec(self.prec + 4):
            return mp.mpf(self._x.a)

    @property
    def upper(self):
        with mp.workprec(self.prec + 4):
            return mp.mpf(self._x.b)

    @property
    def value(self):
        with mp.workprec(self.prec):
            return (self.lower + self.upper) / 2

    @property
    def radius(self):
        with mp.workprec(self.prec):
            lo, hi = self.lower, self.upper
            r = (hi - lo) / 2
            # one ulp of slack: the midpoint itself was rounded
            return r + mp.ldexp(1, -self.prec) * max(abs(lo), mp.mpf(1))

    def is_exact_zero(self) -> bool:
        return self.lower == 0 and self.upper == 0

    def with_prec(self, prec: int) -> "BallFloat":
        """Same interval, different working precision (endpoints are exact)."""
        return BallFloat(prec=prec, _interval=self._x)

    def mpf(self, prec=None):
        with mp.workprec(prec or self.prec):
            return (self.lower + self.upper) / 2

    def __float__(self):
        return float(self.value)

    # -- arithmetic --------------------------------------------------------

    def _wrap(self, interval):
        return BallFloat(prec=self.prec, _interval=interval)

    def _binop(self, other, op):
        with _iv_prec(self.prec):
            y = _to_interval(other)
            if y is NotImplemented:
                return NotImplemented
            return self._wrap(op(self._x, y))

    def __add__(self, other):
        return self._binop(other, lambda x, y: x + y)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda x, y: x - y)

    def __rsub__(self, other):
        return self._binop(other, lambda x, y: y - x)

    def __mul__(self, other):
        return self._binop(other, lambda x, y: x * y)

    __rmul__ = __mul__

    def __truediv__(self, other):
        ball = other if isinstance(other, BallFloat) else BallFloat(other, prec=self.prec)
        return self * ball._reciprocal()

    def __rtruediv__(self, other):
        return self._reciprocal() * other

    def __neg__(self):
        return self._wrap(-self._x)

    def __abs__(self):
        with _iv_prec(self.prec):
            return self._wrap(abs(self._x))

    def _reciprocal(self):
        if self.lower <= 0 <= self.upper:
            raise DivisionByZero("reciprocal of an interval containing zero")
        with _iv_prec(self.prec):
            return self._wrap(1 / self._x)

    # -- decisions ---------------------------------------------------------

    def floor(self) -> int:
        lo = _mpf_floor_exact(self.lower)
        hi = _mpf_floor_exact(self.upper)
        if lo != hi:
            raise AmbiguousFloor(
                f"interval [{self.lower}, {self.upper}] straddles an integer"
            )
        return lo

    def sign(self) -> int:
        if self.lower > 0:
            return 1
        if self.upper < 0:
            return -1
        if self.is_exact_zero():
            return 0
        raise AmbiguousComparison("interval contains zero with nonzero radius")

    def __repr__(self):
        with mp.workprec(self.prec):
            return (f"BallFloat({mp.nstr(self.value, 20)}, "
                    f"radius={mp.nstr(self.radius, 3)}, prec={self.prec})")


def _mpf_floor_exact(x) -> int:
    """Exact floor of an mpf, independent of the ambient working precision."""
    sign, man, exp, _ = x._mpf_
    man = int(man)  # gmpy2 backend hands out mpz
    exp = int(exp)
    if man == 0:
        if x == 0:
            return 0
        raise ValueError(f"floor of non-finite value {x}")
    if exp >= 0:
        v = man << exp
        return -v if sign else v
    if sign == 0:
        return man >> -exp
    q, r = divmod(man, 1 << -exp)
    return -q - (1 if r else 0)


def _to_interval(v):
    """Coerce v into an mpi at the current iv precision."""
    if isinstance(v, BallFloat):
        return v._x
    if isinstance(v, int):
        return iv.mpf(v)
    if isinstance(v, Fraction):
        return iv.mpf(v.numerator) / iv.mpf(v.denominator)
    if isinstance(v, Surd):
        return (iv.mpf(v.a) + iv.mpf(v.b) * iv.sqrt(iv.mpf(v.d))) / iv.mpf(v.c)
    if isinstance(v, str):
        return iv.mpf(v)
    try:
        return iv.mpf(v)
    except Exception:
        return NotImplemented


ExactNumber = Union[Fraction, Surd, BallFloat]


# ---------------------------------------------------------------------------
# Module-level operations dispatching on the value family.
# ---------------------------------------------------------------------------

def sign_of(v: ExactNumber) -> int:
    if isinstance(v, Fraction):
        n = v.numerator
        return (n > 0) - (n < 0)
    if isinstance(v, int):
        return (v > 0) - (v < 0)
    if isinstance(v, (Surd, BallFloat)):
        return v.sign()
    raise TypeError(f"not an ExactNumber: {type(v).__name__}")


def is_zero(v: ExactNumber) -> bool:
    if isinstance(v, Fraction):
        return v == 0
    if isinstance(v, int):
        return v == 0
    if isinstance(v, Surd):
        return False
    if isinstance(v, BallFloat):
        return v.is_exact_zero()
    raise TypeError(f"not an ExactNumber: {type(v).__name__}")


@registered_op("numkit.floor_of")
def floor_of(v: ExactNumber) -> int:
    """Exact floor; for BallFloat the interval must not straddle an integer."""
    if isinstance(v, Fraction):
        return v.numerator // v.denominator
    if isinstance(v, int):
        return v
    if isinstance(v, (Surd, BallFloat)):
        return v.floor()
    raise TypeError(f"not an ExactNumber: {type(v).__name__}")


@registered_op("numkit.reciprocal")
def reciprocal(v: ExactNumber) -> ExactNumber:
    """Exact reciprocal within the same value family."""
    if isinstance(v, Fraction):
        if v == 0:
            raise DivisionByZero("reciprocal of zero")
        return 1 / v
    if isinstance(v, int):
        if v == 0:
            raise DivisionByZero("reciprocal of zero")
        return Fraction(1, v)
    if isinstance(v, Surd):
        return v._inverse()
    if isinstance(v, BallFloat):
        return v._reciprocal()
    raise TypeError(f"not an ExactNumber: {type(v).__name__}")


@registered_op("numkit.compare")
def compare(v: ExactNumber, w: ExactNumber) -> int:
    """Total-order verdict LT/EQ/GT (-1/0/+1); exact whenever both sides are.

    Ball comparisons need disjoint intervals or exact coincidence, otherwise
    AmbiguousComparison is raised.
    """
    if isinstance(v, BallFloat) or isinstance(w, BallFloat):
        prec = max(getattr(v, "prec", 0), getattr(w, "prec", 0)) or DEFAULT_PRECISION
        bv = v if isinstance(v, BallFloat) else BallFloat(v, prec=prec)
        bw = w if isinstance(w, BallFloat) else BallFloat(w, prec=prec)
        if bv.upper < bw.lower:
            return LT
        if bv.lower > bw.upper:
            return GT
        if (bv.lower == bv.upper == bw.lower == bw.upper):
            return EQ
        raise AmbiguousComparison("overlapping intervals")
    if isinstance(v, Surd):
        return v._cmp(w)
    if isinstance(w, Surd):
        return -w._cmp(v)
    diff = v - w
    return (diff > 0) - (diff < 0)


def to_mpf(v: ExactNumber, prec: int = DEFAULT_PRECISION):
    """Numeric value of v as an mpf rounded at prec."""
    if isinstance(v, Fraction):
        with mp.workprec(prec + 8):
            r = mp.mpf(v.numerator) / mp.mpf(v.denominator)
        with mp.workprec(prec):
            return +r
    if isinstance(v, int):
        with mp.workprec(prec):
            return mp.mpf(v)
    if isinstance(v, Surd):
        return v.mpf(prec)
    if isinstance(v, BallFloat):
        return v.mpf(prec)
    raise TypeError(f"not an ExactNumber: {type(v).__name__}")


# ---------------------------------------------------------------------------
# Text round-trip
# ---------------------------------------------------------------------------

_SURD_RE = re.compile(
    r"^\(\s*(?P<a>[+-]?\d+)\s*(?P<sgn>[+-])\s*(?P<b>\d+)\s*\*\s*"
    r"sqrt\(\s*(?P<d>\d+)\s*\)\s*\)\s*/\s*(?P<c>[+-]?\d+)$"
)
_RAT_RE = re.compile(r"^[+-]?\d+(/\d+)?$")
_FLOAT_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def parse_exact(text: str, prec: int = DEFAULT_PRECISION) -> ExactNumber:
    """Parse "p/q", "(a+b*sqrt(d))/c", or a decimal string.

    Decimal strings become BallFloat values at the requested precision;
    rationals and surds parse exactly and round-trip through format_exact.
    """
    s = text.strip().replace("−", "-")  # unicode minus
    m = _SURD_RE.match(s)
    if m:
        b = int(m.group("b"))
        if m.group("sgn") == "-":
            b = -b
        return make_surd(int(m.group("a")), b, int(m.group("c")),
                         int(m.group("d")))
    if _RAT_RE.match(s):
        return Fraction(s)
    if _FLOAT_RE.match(s):
        return BallFloat(s, prec=prec)
    raise ValueError(f"unparseable number: {text!r}")


def format_exact(v: ExactNumber) -> str:
    """Exact round-trip text for Fraction/Surd; decimal rendering for balls."""
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, int):
        return f"{v}/1"
    if isinstance(v, Surd):
        sgn = "+" if v.b >= 0 else "-"
        return f"({v.a}{sgn}{abs(v.b)}*sqrt({v.d}))/{v.c}"
    if isinstance(v, BallFloat):
        with mp.workprec(v.prec):
            return mp.nstr(v.value, int(v.prec / 3.32) + 2)
    raise TypeError(f"not an ExactNumber: {type(v).__name__}")
