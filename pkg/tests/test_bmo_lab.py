import math
import random
from fractions import Fraction

import numpy as np
import pytest

from alphacf import bmo_lab
from alphacf.bmo_lab import (
    bmo_seminorm_scan,
    concat_lower_bound,
    concat_mean,
    concat_oscillation,
    interval_mean,
    mean_oscillation,
    wilton_blowup_experiment,
)
from alphacf.errors import DegenerateInterval, QuadratureFailure
from alphacf.fastgrid import wilton_grid
from alphacf.sampling import random_piecewise_linear

UNIT = (Fraction(0), Fraction(1))


def test_interval_mean_constant_and_linear():
    c7 = lambda xs: np.full_like(np.asarray(xs, dtype=float), 7.0)
    st = interval_mean(c7, UNIT, 2048)
    assert st.mean == pytest.approx(7.0, abs=1e-12)
    ident = lambda xs: np.asarray(xs, dtype=float)
    st = interval_mean(ident, UNIT, 2048)
    assert st.mean == pytest.approx(0.5, abs=1e-9)
    assert st.quad_error < 1e-6


def test_interval_mean_wilton_blowup_point():
    f = lambda xs: wilton_grid(xs)
    st = interval_mean(f, (Fraction(0), Fraction(1, 16)), 50_000)
    assert st.mean == pytest.approx(math.log(16) + 1, abs=0.2)


def test_mean_oscillation_examples():
    c = lambda xs: np.full_like(np.asarray(xs, dtype=float), 3.25)
    st = mean_oscillation(c, UNIT, 2048)
    assert st.oscillation == pytest.approx(0.0, abs=1e-10)
    ident = lambda xs: np.asarray(xs, dtype=float)
    st = mean_oscillation(ident, UNIT, 4096)
    assert st.oscillation == pytest.approx(0.25, abs=1e-6)
    step = lambda xs: (np.asarray(xs, dtype=float) >= 0.5).astype(float)
    st = mean_oscillation(step, UNIT, 4096)
    assert st.oscillation == pytest.approx(0.5, abs=1e-3)


def test_quadrature_failure_on_nonfinite():
    bad = lambda xs: np.full_like(np.asarray(xs, dtype=float), np.nan)
    with pytest.raises(QuadratureFailure):
        interval_mean(bad, UNIT, 512)


def test_degenerate_interval():
    ident = lambda xs: np.asarray(xs, dtype=float)
    with pytest.raises(DegenerateInterval):
        interval_mean(ident, (Fraction(1), Fraction(1)), 128)
    with pytest.raises(DegenerateInterval):
        concat_oscillation(0.0, 0.0, 0.0, 1.0, 0.0, 1.0)


def test_concat_oscillation_step_case():
    # O1 = O2 = 0, means 0 and 1, equal halves: formula gives 1/2, and the
    # direct union oscillation of the step function agrees exactly.
    got = concat_oscillation(0.0, 0.0, 0.0, 1.0, 0.5, 0.5)
    assert got == pytest.approx(0.5, abs=1e-15)
    step = lambda xs: (np.asarray(xs, dtype=float) >= 0.5).astype(float)
    direct = mean_oscillation(step, UNIT, 8192).oscillation
    assert direct == pytest.approx(got, abs=1e-3)


def test_concat_oscillation_equal_means():
    got = concat_oscillation(0.3, 0.7, 2.0, 2.0, 1.0, 3.0)
    assert got == pytest.approx((0.3 + 3 * 0.7) / 4, abs=1e-15)


def test_concat_lower_bound_equal_lengths():
    rng = random.Random(3)
    for _ in range(50):
        o1, o2 = rng.uniform(0, 2), rng.uniform(0, 2)
        m1, m2 = rng.uniform(-3, 3), rng.uniform(-3, 3)
        val = concat_oscillation(o1, o2, m1, m2, 2.5, 2.5)
        assert val >= abs(m1 - m2) / 2 - 1e-12
        assert concat_lower_bound(m1, m2, 2.5, 2.5) == pytest.approx(
            abs(m1 - m2) / 2, abs=1e-12)


def test_concat_formula_brackets_direct_union_oscillation():
    # For generic integrands the merge formula is an upper bound and the
    # mean-gap term a lower bound; both must bracket the direct quadrature.
    rng = random.Random(11)
    for _ in range(25):
        f = random_piecewise_linear(rng, 0.0, 1.0)
        split = rng.uniform(0.25, 0.75)
        i1 = (Fraction(0), Fraction(split).limit_denominator(10 ** 6))
        i2 = (i1[1], Fraction(1))
        s1 = mean_oscillation(f, i1, 3000)
        s2 = mean_oscillation(f, i2, 3000)
        direct = mean_oscillation(f, UNIT, 6000)
        l1, l2 = float(i1[1] - i1[0]), float(i2[1] - i2[0])
        upper = concat_oscillation(s1.oscillation, s2.oscillation,
                                   s1.mean, s2.mean, l1, l2)
        lower = concat_lower_bound(s1.mean, s2.mean, l1, l2)
        slack = 2 * (s1.quad_error + s2.quad_error + direct.quad_error) + 1e-6
        assert direct.oscillation <= upper + slack
        assert direct.oscillation >= lower - slack
        merged_mean = concat_mean(s1.mean, s2.mean, l1, l2)
        assert merged_mean == pytest.approx(direct.mean, abs=slack)


def test_linear_rescaling_preserves_oscillation():
    rng = random.Random(23)
    f = random_piecewise_linear(rng, 0.0, 1.0)
    base = mean_oscillation(f, (Fraction(1, 5), Fraction(7, 10)), 4000)
    a = 3.0
    g = lambda t: f(np.asarray(t, dtype=float) / a)
    scaled = mean_oscillation(g, (Fraction(3, 5), Fraction(21, 10)), 4000)
    assert scaled.oscillation == pytest.approx(
        base.oscillation, abs=4 * (base.quad_error + scaled.quad_error) + 1e-9)


def test_scan_constant_and_linear():
    c = lambda xs: np.full_like(np.asarray(xs, dtype=float), 2.0)
    res = bmo_seminorm_scan(c, UNIT, 6, 8)
    assert res.sup_estimate == pytest.approx(0.0, abs=1e-12)
    ident = lambda xs: np.asarray(xs, dtype=float)
    res = bmo_seminorm_scan(ident, UNIT, 8, 8)
    assert res.sup_estimate == pytest.approx(0.25, abs=1e-4)
    assert res.argmax_interval == (Fraction(0), Fraction(1))


def test_scan_wilton_alpha_one_exceeds_log8():
    f = lambda xs: wilton_grid(xs, alpha=1.0)
    res = bmo_seminorm_scan(f, (Fraction(-1, 8), Fraction(1, 8)), 10, 32)
    assert res.sup_estimate >= math.log(8)


def test_blowup_rows_match_asymptotics():
    rows = wilton_blowup_experiment([16, 64, 256], points=20_000)
    for row in rows:
        ideal = math.log(row.n) + 1
        assert row.mean_plus == pytest.approx(ideal, abs=0.2)
        assert row.mean_minus == pytest.approx(-ideal, abs=0.3)
        assert row.oscillation >= math.log(row.n)
        assert row.terms > 0 and row.tol > 0


def test_blowup_difference_is_log2():
    # the O(1/n) corrections at n = 2, 4 contribute ~0.13 on top of -log 2
    rows = wilton_blowup_experiment([2, 4], points=20_000)
    diff = rows[0].mean_plus - rows[1].mean_plus
    assert diff == pytest.approx(-math.log(2), abs=0.2)


def test_blowup_oscillation_growth_per_level():
    # the alpha = 1 scan grows by about log 2 per halving of the interval
    rows = wilton_blowup_experiment([2 ** d for d in (8, 9, 10, 11)],
                                    points=20_000)
    for first, second in zip(rows, rows[1:]):
        assert second.oscillation - first.oscillation == pytest.approx(
            math.log(2), abs=0.02)


def test_blowup_oscillation_lower_bound_from_means():
    rows = wilton_blowup_experiment([32, 128], points=20_000)
    for row in rows:
        assert row.oscillation >= abs(row.mean_plus - row.mean_minus) / 2 - 1e-9
