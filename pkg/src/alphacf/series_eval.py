"""Evaluators for the k-Brjuno and Wilton series and their audits.

The k-Brjuno series sums beta_{n-1}^k * log(1/x_n) over the alpha-CF orbit
of x; the Wilton series is its alternating-sign variant.  Both satisfy a
one-step functional equation (S(x) = -log x +/- x^k S(A_alpha x)) that the
residual operation measures, and both admit exact closed-form tails on
eventually periodic (quadratic surd) orbits.  Rational points diverge; the
sanctioned rational-input API is the pair of finite truncations defined over
the regular (alpha = 1) continued fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from mpmath import mp

from .cf_core import Alpha, CFExpansion, convergents, expand, normalize
from .errors import (
    DivergesAtRational,
    ExpansionTooShort,
    OutOfDomain,
    PrecisionExhausted,
    SingularPoint,
)
from .numkit import (
    DEFAULT_PRECISION,
    BallFloat,
    ExactNumber,
    Surd,
    format_exact,
    is_zero,
    reciprocal,
    sign_of,
    to_mpf,
)
from .opsreg import registered_op

DEFAULT_TERMS = 256
DEFAULT_TOL = 1e-40

_GOLDEN_F = (5 ** 0.5 - 1) / 2


def c_prime(prec: int = DEFAULT_PRECISION):
    """C' = sum of g^j = 1/(1 - g) = (3 + sqrt(5))/2, the contraction constant."""
    with mp.workprec(prec):
        return (3 + mp.sqrt(5)) / 2


@dataclass
class SeriesValue:
    """A truncated series evaluation with its tail bookkeeping."""

    value: object  # mpf
    n_terms: int
    tail_estimate: float
    rigorous_tail: bool
    mode: str

    def __float__(self):
        return float(self.value)


@dataclass
class TruncationReport:
    """One check of the finite-vs-partial truncation bound at a convergent."""

    x: str
    r: int
    k: int
    mode: str
    lhs: float
    bound: float
    passed: bool


def _prepare(x: ExactNumber, alpha: Alpha, terms: int):
    xn, _ = normalize(x, alpha)
    if isinstance(xn, Fraction):
        if xn == 0:
            raise SingularPoint("series evaluator at an integer point")
        raise DivergesAtRational(
            "series diverges at rationals; use the -finite variants"
        )
    if is_zero(xn):
        raise SingularPoint("series evaluator at an exact zero")
    e = expand(xn, alpha, terms, best_effort=True)
    if e.terminated:
        raise DivergesAtRational("orbit hit zero exactly; the point is rational")
    return e


def _series_value(e: CFExpansion, k: int, signed: bool, terms: int, tol: float,
                  prec: int, closed_form: bool, mode: str) -> SeriesValue:
    """Left-to-right partial sum, with an exact geometric tail on periodic orbits."""
    with mp.workprec(prec + 32):
        if closed_form and e.period is not None:
            pre, length = e.period
            n_explicit = pre + length
            vals = e.orbit_mpf(n_explicit - 1, prec + 32)
            total = mp.mpf(0)
            block = mp.mpf(0)
            beta = mp.mpf(1)
            for n in range(n_explicit):
                term = (beta ** k) * mp.log(1 / vals[n])
                if signed and n % 2:
                    term = -term
                total += term
                if n >= pre:
                    block += term
                beta *= vals[n]
            rho = mp.mpf(1)
            for n in range(pre, n_explicit):
                rho *= vals[n]
            ratio = rho ** k
            if signed and length % 2:
                ratio = -ratio
            total += block * ratio / (1 - ratio)
            with mp.workprec(prec):
                return SeriesValue(value=+total, n_terms=n_explicit,
                                   tail_estimate=0.0, rigorous_tail=True,
                                   mode=mode)

        if e.period is not None:
            n_avail = terms
        elif e.terminated:
            n_avail = len(e.orbit) - 1
        else:
            n_avail = len(e.orbit)
        n_max = min(terms, n_avail)
        vals = e.orbit_mpf(n_max - 1, prec + 32) if n_max else []
        total = mp.mpf(0)
        beta = mp.mpf(1)
        used = 0
        last = mp.mpf(0)
        prev_abs = mp.inf
        monotone = True
        for n in range(min(n_max, len(vals))):
            if vals[n] <= 0:
                break
            term = (beta ** k) * mp.log(1 / vals[n])
            if signed and n % 2:
                term = -term
            total += term
            used = n + 1
            last = term
            if abs(term) > prev_abs:
                monotone = False
            prev_abs = abs(term)
            if abs(term) < tol:
                break
            beta *= vals[n]
        gk = _GOLDEN_F ** k
        if signed and monotone:
            tail = float(abs(last))  # alternating series with shrinking terms
        else:
            tail = float(abs(last)) * gk / (1 - gk)
        with mp.workprec(prec):
            return SeriesValue(value=+total, n_terms=used, tail_estimate=tail,
                               rigorous_tail=False, mode=mode)


@registered_op("series_eval.brjuno_k")
def brjuno_k(x: ExactNumber, alpha: Alpha, k: int = 1, terms: int = DEFAULT_TERMS,
             tol: float = DEFAULT_TOL, prec: int = DEFAULT_PRECISION,
             closed_form: bool = True) -> SeriesValue:
    """k-Brjuno value at x over the alpha-CF orbit.

    Periodic (surd) inputs get their tail summed in closed form and come back
    flagged rigorous; float inputs carry a heuristic tail estimate.  Rational
    inputs raise DivergesAtRational.
    """
    if k < 1:
        raise OutOfDomain("k must be >= 1")
    e = _prepare(x, alpha, terms)
    return _series_value(e, k, signed=False, terms=terms, tol=tol, prec=prec,
                         closed_form=closed_form, mode=f"brjuno({k})")


@registered_op("series_eval.wilton")
def wilton(x: ExactNumber, alpha: Alpha, terms: int = DEFAULT_TERMS,
           tol: float = DEFAULT_TOL, prec: int = DEFAULT_PRECISION,
           closed_form: bool = True) -> SeriesValue:
    """Wilton value at x: the alternating-sign partner of the Brjuno series."""
    e = _prepare(x, alpha, terms)
    return _series_value(e, 1, signed=True, terms=terms, tol=tol, prec=prec,
                         closed_form=closed_form, mode="wilton")


def _finite_rational(fr: Fraction, k: int, signed: bool, prec: int):
    """sum over the terminating Gauss orbit of fr - floor(fr)."""
    m0 = fr.numerator // fr.denominator
    y = fr - m0
    with mp.workprec(prec + 16):
        total = mp.mpf(0)
        beta = mp.mpf(1)
        n = 0
        while y != 0:
            yf = mp.mpf(y.numerator) / mp.mpf(y.denominator)
            term = (beta ** k) * mp.log(1 / yf)
            if signed and n % 2:
                term = -term
            total += term
            beta *= yf
            y = reciprocal(y)
            y -= y.numerator // y.denominator
            n += 1
        with mp.workprec(prec):
            return +total


@registered_op("series_eval.brjuno_finite_rational")
def brjuno_finite_rational(p_over_q: Fraction, k: int = 1,
                           prec: int = DEFAULT_PRECISION):
    """Finite k-Brjuno value of a rational over its terminating Gauss orbit.

    Integers give the empty sum 0.  The underlying expansion always uses the
    regular (alpha = 1) continued fraction with final digit >= 2, which the
    Gauss orbit of a reduced rational produces on its own.
    """
    if k < 1:
        raise OutOfDomain("k must be >= 1")
    return _finite_rational(Fraction(p_over_q), k, signed=False, prec=prec)


@registered_op("series_eval.wilton_finite_rational")
def wilton_finite_rational(p_over_q: Fraction, prec: int = DEFAULT_PRECISION):
    """Finite Wilton value of a rational (alternating-sign finite sum)."""
    return _finite_rational(Fraction(p_over_q), 1, signed=True, prec=prec)


@registered_op("series_eval.proxy_sum")
def proxy_sum(x: ExactNumber, alpha: Alpha, k: int = 1, N: int = 20,
              alternating: bool = False) -> float:
    """sum_{j<N} (+/-1)^j log(q_{j+1}) / q_j^k over the alpha-CF denominators."""
    if N == 0:
        return 0.0
    xn, _ = normalize(x, alpha)
    if is_zero(xn):
        raise SingularPoint("proxy sum of an integer point")
    e = expand(xn, alpha, N)
    if not e.n_digits_available(N):
        raise ExpansionTooShort(
            f"{N} digits needed, expansion terminated after {len(e.digits)}"
        )
    c = convergents(e, N)
    total = 0.0
    for j in range(N):
        term = math.log(c.q_of(j + 1)) / c.q_of(j) ** k
        total += -term if (alternating and j % 2) else term
    return total


@registered_op("series_eval.apply_transfer")
def apply_transfer(f: Callable[[ExactNumber], object], k: int, alpha: Alpha,
                   x: ExactNumber, sign: int = 1,
                   prec: int = DEFAULT_PRECISION):
    """(+/-) x^k f(1/x), with 1/x reduced by Z-periodicity and evenness.

    f is any evaluator defined on (0, alpha]; the periodic/even completion is
    applied here, so f never sees a point outside its domain.
    """
    from .numkit import LT, compare

    if sign not in (1, -1):
        raise OutOfDomain("sign must be +1 or -1")
    if sign_of(x) <= 0 or compare(x, alpha.value) != LT:
        raise OutOfDomain("apply_transfer requires 0 < x < alpha")
    y = reciprocal(x)
    t, _ = normalize(y, alpha)
    # t may be an exact zero; evaluators that cannot take it raise SingularPoint
    with mp.workprec(prec):
        return sign * to_mpf(x, prec) ** k * f(t)


@registered_op("series_eval.functional_eq_residual")
def functional_eq_residual(x: ExactNumber, alpha: Alpha, mode: str = "brjuno",
                           N: int = 50, k: int = 1,
                           prec: int = DEFAULT_PRECISION):
    """Residual of the one-step functional equation on N-term partial sums.

    residual = S_N(x) + log x -/+ x^k S_{N-1}(A_alpha x); algebraically zero,
    so the returned value measures only arithmetic rounding.  Both partial
    sums are evaluated over one shared orbit.
    """
    if N < 1:
        raise OutOfDomain("N must be >= 1")
    if mode not in ("brjuno", "wilton"):
        raise OutOfDomain(f"unknown mode {mode!r}")
    if mode == "wilton":
        k = 1
    e = _prepare(x, alpha, N + 1)
    if not e.n_digits_available(N):
        if e.exhausted:
            raise PrecisionExhausted(
                f"only {len(e.digits)} digits certifiable, N = {N} requested"
            )
        raise DivergesAtRational("orbit too short for the requested N")
    with mp.workprec(prec + 16):
        vals = e.orbit_mpf(N - 1, prec + 16)
        signed = mode == "wilton"
        s_n = mp.mpf(0)
        beta = mp.mpf(1)
        for n in range(N):
            term = (beta ** k) * mp.log(1 / vals[n])
            s_n += -term if (signed and n % 2) else term
            beta *= vals[n]
        s_shift = mp.mpf(0)
        beta = mp.mpf(1)
        for m in range(N - 1):
            term = (beta ** k) * mp.log(1 / vals[m + 1])
            s_shift += -term if (signed and m % 2) else term
            beta *= vals[m + 1]
        x0 = vals[0]
        if mode == "brjuno":
            res = s_n + mp.log(x0) - (x0 ** k) * s_shift
        else:
            res = s_n + mp.log(x0) + x0 * s_shift
        with mp.workprec(prec):
            return +res


@registered_op("series_eval.truncation_bound_check")
def truncation_bound_check(x: ExactNumber, r: int, k: int = 1,
                           mode: str = "brjuno",
                           prec: int = 192) -> TruncationReport:
    """Check |finite value at p_r/q_r - r-term orbit sum| <= 2kC' x_r / q_r.

    Stated for the regular continued fraction (alpha = 1); the Wilton variant
    uses the k = 1 constant.
    """
    if mode not in ("brjuno", "wilton"):
        raise OutOfDomain(f"unknown mode {mode!r}")
    if mode == "wilton":
        k = 1
    alpha = Alpha.one()
    xn, _ = normalize(x, alpha)
    e = expand(xn, alpha, r + 1)
    if not e.n_digits_available(r):
        raise ExpansionTooShort(
            f"r = {r} needs {r} digits, expansion has {len(e.digits)}"
        )
    c = convergents(e, r)
    fr = Fraction(c.p_of(r), c.q_of(r))
    signed = mode == "wilton"
    with mp.workprec(prec + 16):
        finite = _finite_rational(fr, k, signed=signed, prec=prec)
        vals = e.orbit_mpf(r, prec + 16)
        partial = mp.mpf(0)
        beta = mp.mpf(1)
        for j in range(r):
            term = (beta ** k) * mp.log(1 / vals[j])
            partial += -term if (signed and j % 2) else term
            beta *= vals[j]
        lhs = abs(finite - partial)
        x_r = vals[r] if len(vals) > r else mp.mpf(0)
        bound = 2 * k * c_prime(prec) * x_r / c.q_of(r)
    return TruncationReport(x=format_exact(x), r=r, k=k, mode=mode,
                            lhs=float(lhs), bound=float(bound),
                            passed=bool(lhs <= bound))


def truncation_audit(x: ExactNumber, r_max: int, ks: Sequence[int] = (1, 2, 3),
                     include_wilton: bool = True,
                     prec: int = 160) -> list[TruncationReport]:
    """All truncation checks for r = 1..r_max and every requested mode at once.

    Shares the expansion, the convergents, and the per-r finite Gauss orbit
    across modes, which keeps large audits inside their time budget.
    """
    alpha = Alpha.one()
    xn, _ = normalize(x, alpha)
    e = expand(xn, alpha, r_max + 1)
    depth = r_max if e.n_digits_available(r_max) else len(e.digits)
    if depth < 1:
        raise ExpansionTooShort("no expansion steps available")
    c = convergents(e, depth)
    modes = [("brjuno", k) for k in ks] + ([("wilton", 1)] if include_wilton else [])
    reports = []
    with mp.workprec(prec + 16):
        vals = e.orbit_mpf(depth, prec + 16)
        cp = c_prime(prec)
        # running partial sums of the orbit series, one per mode
        partial = {m: mp.mpf(0) for m in modes}
        beta = mp.mpf(1)
        for r in range(1, depth + 1):
            j = r - 1
            logterm = mp.log(1 / vals[j])
            for mode, k in modes:
                term = (beta ** k) * logterm
                if mode == "wilton" and j % 2:
                    term = -term
                partial[(mode, k)] += term
            beta *= vals[j]
            # finite values at p_r/q_r over one shared Gauss orbit
            q_r = c.q_of(r)
            y = Fraction(c.p_of(r), q_r)
            y -= y.numerator // y.denominator
            fin = {m: mp.mpf(0) for m in modes}
            beta_f = mp.mpf(1)
            n = 0
            while y != 0:
                yf = mp.mpf(y.numerator) / mp.mpf(y.denominator)
                flog = mp.log(1 / yf)
                for mode, k in modes:
                    term = (beta_f ** k) * flog
                    if mode == "wilton" and n % 2:
                        term = -term
                    fin[(mode, k)] += term
                beta_f *= yf
                y = reciprocal(y)
                y -= y.numerator // y.denominator
                n += 1
            x_r = vals[r] if len(vals) > r else mp.mpf(0)
            for mode, k in modes:
                lhs = abs(fin[(mode, k)] - partial[(mode, k)])
                bound = 2 * k * cp * x_r / q_r
                reports.append(TruncationReport(
                    x=format_exact(x), r=r, k=k, mode=mode,
                    lhs=float(lhs), bound=float(bound),
                    passed=bool(lhs <= bound)))
    return reports


@dataclass
class GapRow:
    """Per-sample summary of a series-vs-proxy gap audit."""

    x: str
    depth: int
    gap_same_alpha: float
    gap_cross_alpha: float
    remark_logq_sum: float
    remark_inv_sum: float


@dataclass
class GapAuditResult:
    sup_gap: float
    sup_gap_cross: float
    rows: list
    alpha: str
    k: int
    N: int
    mode: str


@registered_op("series_eval.gap_audit")
def gap_audit(samples: Sequence[ExactNumber], alpha: Alpha, k: int = 1,
              N: int = 60, mode: str = "brjuno") -> GapAuditResult:
    """Sup over samples and depths <= N of |partial series - proxy sum|.

    Reports both the same-alpha gap and the cross-alpha variant against the
    regular-CF proxy, plus the observational sums behind the reported
    constants c1, c2 (never asserted, only recorded).
    """
    signed = mode == "wilton"
    rows = []
    sup_gap = 0.0
    sup_cross = 0.0
    one = Alpha.one()
    for x in samples:
        xa, _ = normalize(x, alpha)
        e = expand(xa, alpha, N + 1)
        depth = N if e.n_digits_available(N) else len(e.digits)
        if depth < 1:
            continue
        c = convergents(e, depth)
        vals = [float(v) for v in e.orbit_mpf(depth - 1, 96)]
        # partial series and proxy, cumulatively
        beta = 1.0
        series = 0.0
        proxy = 0.0
        gap = 0.0
        series_partials = []
        for j in range(depth):
            sterm = (beta ** k) * math.log(1 / vals[j])
            pterm = math.log(c.q_of(j + 1)) / c.q_of(j) ** k
            if signed and j % 2:
                sterm, pterm = -sterm, -pterm
            series += sterm
            proxy += pterm
            beta *= vals[j]
            series_partials.append(series)
            gap = max(gap, abs(series - proxy))
        # cross-alpha: same partial series vs regular-CF proxy of the same x
        x1, _ = normalize(x, one)
        e1 = expand(x1, one, N + 1)
        depth1 = min(depth, N if e1.n_digits_available(N) else len(e1.digits))
        c1 = convergents(e1, depth1)
        proxy1 = 0.0
        gap_cross = 0.0
        logq_sum = 0.0
        inv_sum = 0.0
        for j in range(depth1):
            pterm = math.log(c1.q_of(j + 1)) / c1.q_of(j) ** k
            if signed and j % 2:
                pterm = -pterm
            proxy1 += pterm
            gap_cross = max(gap_cross, abs(series_partials[j] - proxy1))
            qj = c1.q_of(j)
            logq_sum += math.log(qj) / qj
            inv_sum += math.log(2) / qj
        rows.append(GapRow(x=format_exact(x), depth=depth, gap_same_alpha=gap,
                           gap_cross_alpha=gap_cross, remark_logq_sum=logq_sum,
                           remark_inv_sum=inv_sum))
        sup_gap = max(sup_gap, gap)
        sup_cross = max(sup_cross, gap_cross)
    return GapAuditResult(sup_gap=sup_gap, sup_gap_cross=sup_cross, rows=rows,
                          alpha=str(alpha), k=k, N=N, mode=mode)


def proof_constant_gate(k: int) -> float:
    """2c2 + 2(c1 + c2) + 2^{k+1} c1 with c1 = 2/e, c2 = 5 log 2 (~18.28 at k=1)."""
    c1 = 2 / math.e
    c2 = 5 * math.log(2)
    return 2 * c2 + 2 * (c1 + c2) + 2 ** (k + 1) * c1
