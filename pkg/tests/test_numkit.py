import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp

from alphacf import numkit as nk
from alphacf.errors import (
    AmbiguousComparison,
    AmbiguousFloor,
    DivisionByZero,
    MixedRadicalError,
)

G = nk.GOLDEN

rationals = st.fractions(
    min_value=Fraction(-50), max_value=Fraction(50), max_denominator=10**6
)
surd_parts = st.tuples(
    st.integers(-60, 60),
    st.integers(-20, 20).filter(lambda b: b != 0),
    st.integers(1, 40),
    st.sampled_from([2, 3, 5, 6, 7, 10, 11, 13]),
)


def test_floor_examples():
    assert nk.floor_of(Fraction(7, 2)) == 3
    assert nk.floor_of(G) == 0
    phi = nk.make_surd(1, 1, 2, 5)
    assert nk.floor_of(phi) == 1


def test_reciprocal_examples():
    assert nk.reciprocal(Fraction(2, 5)) == Fraction(5, 2)
    assert nk.reciprocal(G) == nk.make_surd(1, 1, 2, 5)
    with pytest.raises(DivisionByZero):
        nk.reciprocal(nk.BallFloat(0, radius="1e-40"))
    with pytest.raises(DivisionByZero):
        nk.reciprocal(Fraction(0))


def test_compare_examples():
    assert nk.compare(Fraction(2, 5), Fraction(1, 2)) == nk.LT
    assert nk.compare(G, Fraction(3, 5)) == nk.GT
    assert nk.compare(Fraction(1, 3), Fraction(1, 3)) == nk.EQ


@settings(max_examples=200, deadline=None)
@given(rationals)
def test_reciprocal_involution_rational(q):
    if q != 0:
        assert nk.reciprocal(nk.reciprocal(q)) == q


@settings(max_examples=200, deadline=None)
@given(surd_parts)
def test_surd_reciprocal_involution(parts):
    a, b, c, d = parts
    v = nk.make_surd(a, b, c, d)
    if isinstance(v, nk.Surd):
        assert nk.reciprocal(nk.reciprocal(v)) == v


@settings(max_examples=200, deadline=None)
@given(surd_parts)
def test_canonicalization_idempotent(parts):
    a, b, c, d = parts
    v = nk.make_surd(a, b, c, d)
    if isinstance(v, nk.Surd):
        again = nk.make_surd(v.a, v.b, v.c, v.d)
        assert again == v
        assert v.c > 0 and v.d > 1 and v.b != 0


@settings(max_examples=100, deadline=None)
@given(surd_parts, surd_parts)
def test_surd_arithmetic_closed_same_d(p1, p2):
    a1, b1, c1, _ = p1
    a2, b2, c2, d = p2
    u = nk.make_surd(a1, b1, c1, d)
    v = nk.make_surd(a2, b2, c2, d)
    for w in (u + v, u * v):
        if isinstance(w, nk.Surd):
            assert w.d == d if isinstance(u, nk.Surd) or isinstance(v, nk.Surd) else True
            assert nk.make_surd(w.a, w.b, w.c, w.d) == w
    if isinstance(u, nk.Surd):
        assert isinstance(nk.reciprocal(u), (nk.Surd, Fraction))


def test_floor_matches_integer_division_bulk():
    rng = random.Random(20260810)
    for _ in range(10_000):
        q = rng.randrange(1, 10**6)
        p = rng.randrange(-10**7, 10**7)
        assert nk.floor_of(Fraction(p, q)) == p // q


@settings(max_examples=150, deadline=None)
@given(surd_parts)
def test_surd_floor_against_highprec_float(parts):
    a, b, c, d = parts
    v = nk.make_surd(a, b, c, d)
    if isinstance(v, nk.Surd):
        with mp.workprec(120):
            approx = mp.floor(v.mpf(100))
        assert nk.floor_of(v) == int(approx)


@settings(max_examples=150, deadline=None)
@given(surd_parts, rationals)
def test_surd_rational_order_consistent(parts, q):
    a, b, c, d = parts
    v = nk.make_surd(a, b, c, d)
    verdict = nk.compare(v, q)
    gap = float(v) - float(q)
    if abs(gap) > 1e-9:
        assert verdict == (nk.GT if gap > 0 else nk.LT)


def test_mixed_radicals_rejected():
    u = nk.make_surd(0, 1, 1, 2)
    v = nk.make_surd(0, 1, 1, 3)
    with pytest.raises(MixedRadicalError):
        _ = u + v
    with pytest.raises(MixedRadicalError):
        nk.compare(u, v)
    assert (u == v) is False


def test_surd_degrades_to_fraction():
    assert nk.make_surd(3, 0, 2, 5) == Fraction(3, 2)
    assert nk.make_surd(1, 2, 3, 4) == Fraction(5, 3)  # sqrt(4) folds in
    assert G * G + G == 1  # g^2 + g = 1 exactly


def test_ball_floor_and_ambiguity():
    assert nk.floor_of(nk.BallFloat("1.39")) == 1
    near3 = nk.BallFloat(3, radius="1e-30")
    with pytest.raises(AmbiguousFloor):
        nk.floor_of(near3)
    assert nk.floor_of(nk.BallFloat(3)) == 3  # exact integer, zero radius


def test_ball_comparison_soundness():
    a = nk.BallFloat("0.5")
    assert nk.compare(a, nk.BallFloat("0.5")) == nk.EQ
    with pytest.raises(AmbiguousComparison):
        nk.compare(nk.BallFloat("0.5", radius="1e-60"), a)
    assert nk.compare(nk.BallFloat("0.25"), a) == nk.LT


def test_ball_radius_grows_outward():
    x = nk.BallFloat(1) / 3
    assert x.radius > 0
    y = x * 3
    # enclosure of 1 after outward rounding
    assert y.lower <= 1 <= y.upper


def test_parse_format_roundtrip():
    for text in ["2/5", "-7/3", "(-1+1*sqrt(5))/2", "(3-2*sqrt(7))/5"]:
        v = nk.parse_exact(text)
        assert nk.parse_exact(nk.format_exact(v)) == v
    b = nk.parse_exact("1.39")
    assert isinstance(b, nk.BallFloat)
    v = nk.parse_exact("−7/3")  # unicode minus
    assert v == Fraction(-7, 3)
    with pytest.raises(ValueError):
        nk.parse_exact("(0+1*sqrt(5))/2-oops")


def test_golden_identities():
    assert nk.reciprocal(G) == 1 + G
    assert 1 - G == G * G
    assert nk.compare(G, Fraction(1, 2)) == nk.GT
    assert nk.compare(G, Fraction(2, 3)) == nk.LT


def test_compare_surd_against_ball():
    ball = nk.BallFloat("0.618", prec=192)
    assert nk.compare(G, ball) == nk.GT
    assert nk.compare(ball, G) == nk.LT
    near = nk.BallFloat(G, prec=192)  # enclosure of g itself
    with pytest.raises(AmbiguousComparison):
        nk.compare(near, G)


def test_ball_precision_escalation_roundtrip():
    x = nk.BallFloat("0.125", prec=128)
    wide = x.with_prec(512)
    assert wide.prec == 512
    assert wide.lower == x.lower and wide.upper == x.upper
