"""Interval endpoints are exact rationals; every operation must round
outward. The transcendental enclosures are cross-checked against mpmath
at higher working precision than the enclosure width."""

import mpmath
import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from nilalg import Iv, decimal_str, e_iv, exp_iv, nth_root, pow_int, round_iv
from nilalg.intervals import exp_point, iv_max, root_of_pow, sqrt_iv


def mp_of(q: mpq) -> mpmath.mpf:
    return mpmath.mpf(int(q.numerator)) / mpmath.mpf(int(q.denominator))


def test_point_and_interval_basics():
    x = Iv(mpq(1, 3))
    assert x.is_point()
    assert x.lo == x.hi == mpq(1, 3)
    y = Iv(mpq(1, 4), mpq(1, 2))
    assert y.mid == mpq(3, 8)
    assert y.rad == mpq(1, 8)
    assert y.contains(mpq(1, 3))
    assert not y.contains(mpq(2, 3))


def test_zero_straddling_division_is_refused():
    with pytest.raises(ZeroDivisionError):
        Iv(mpq(1)) / Iv(mpq(-1), mpq(1))


def test_pow_int_equals_repeated_product():
    x = Iv(mpq(-2, 3), mpq(1, 2))
    acc = Iv(mpq(1))
    for n in range(7):
        assert pow_int(x, n) == acc
        acc = acc * x


def test_round_iv_is_outward_and_contains():
    x = Iv(mpq(10**40 + 1, 3 * 10**40))
    r = round_iv(x, 64)
    assert r.lo <= x.lo and x.hi <= r.hi
    assert r.width <= mpq(2, 2**64)


def test_iv_max_takes_upper_envelope():
    a = Iv(mpq(0), mpq(2))
    b = Iv(mpq(1), mpq(3, 2))
    m = iv_max(a, b)
    assert m.lo == mpq(1) and m.hi == mpq(2)


def test_nth_root_detects_exact_powers():
    r = nth_root(mpq(8), 3, 128)
    assert r.is_point() and r.lo == 2
    r = nth_root(mpq(1, 1024), 10, 128)
    assert r.is_point() and r.lo == mpq(1, 2)


def test_nth_root_encloses_true_root():
    for q, n in [(mpq(2), 2), (mpq(5, 7), 3), (mpq(10) ** 12, 7)]:
        r = nth_root(q, n, 160)
        assert r.lo**n <= q <= r.hi**n
        assert r.width < mpq(1, 2**150)


def test_sqrt_and_root_of_pow_agree():
    q = mpq(7, 3)
    a = sqrt_iv(q, 128)
    b = root_of_pow(q, 1, 2, 128)
    assert a.lo <= b.hi and b.lo <= a.hi
    c = root_of_pow(q, 3, 2, 128)
    cube = pow_int(a, 3)
    assert c.lo <= cube.hi and cube.lo <= c.hi


def test_e_enclosure_matches_mpmath():
    with mpmath.workdps(80):
        e_ref = mpmath.e
        enc = e_iv(192)
        assert mp_of(enc.lo) <= e_ref <= mp_of(enc.hi)
        assert enc.width < mpq(1, 2**180)


@pytest.mark.parametrize("q", [mpq(0), mpq(1), mpq(-2), mpq(7, 3), mpq(-13, 5)])
def test_exp_point_matches_mpmath(q):
    enc = exp_point(q, 160)
    with mpmath.workdps(70):
        ref = mpmath.exp(mp_of(q))
        assert mp_of(enc.lo) <= ref <= mp_of(enc.hi)
    assert enc.width / enc.lo < mpq(1, 2**150)


def test_exp_iv_is_monotone_hull():
    x = Iv(mpq(-1), mpq(2))
    enc = exp_iv(x, 128)
    lo = exp_point(mpq(-1), 128)
    hi = exp_point(mpq(2), 128)
    assert enc.lo <= lo.lo and hi.hi <= enc.hi


def test_decimal_str_deterministic_and_zero():
    assert decimal_str(mpq(0)) == "0"
    assert decimal_str(mpq(1, 4)) == decimal_str(mpq(1, 4))
    assert decimal_str(mpq(1, 3), digits=5).startswith("0.33333")
    assert decimal_str(Iv(mpq(1, 4))) == decimal_str(mpq(1, 4))


small_q = st.fractions(
    min_value=-8, max_value=8, max_denominator=32
).map(lambda f: mpq(f.numerator, f.denominator))


@st.composite
def intervals_with_member(draw):
    a = draw(small_q)
    b = draw(small_q)
    lo, hi = min(a, b), max(a, b)
    t = draw(st.fractions(min_value=0, max_value=1, max_denominator=16))
    member = lo + (hi - lo) * mpq(t.numerator, t.denominator)
    return Iv(lo, hi), member


@given(intervals_with_member(), intervals_with_member())
def test_arithmetic_preserves_membership(xm, ym):
    x, a = xm
    y, b = ym
    assert (x + y).contains(a + b)
    assert (x - y).contains(a - b)
    assert (x * y).contains(a * b)
    if y.lo > 0 or y.hi < 0:
        assert (x / y).contains(a / b)


@given(intervals_with_member(), st.integers(min_value=0, max_value=6))
def test_pow_int_preserves_membership(xm, n):
    x, a = xm
    assert pow_int(x, n).contains(a**n)


@given(small_q)
def test_abs_bounds_every_member(q):
    x = Iv(q - mpq(1, 7), q + mpq(1, 11))
    m = abs(x)
    assert m.lo <= abs(q) <= m.hi
    assert m.lo >= 0
