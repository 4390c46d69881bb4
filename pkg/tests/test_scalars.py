from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

from nilalg import Scalar, parse_scalar, rat, rat_str, scalar_str
from nilalg.errors import StructuralError


def test_rat_accepts_common_shapes():
    assert rat(3) == mpq(3)
    assert rat("3/4") == mpq(3, 4)
    assert rat("-0.125") == mpq(-1, 8)
    assert rat(Fraction(7, 2)) == mpq(7, 2)
    assert rat(mpq(5, 6)) == mpq(5, 6)


def test_rat_scientific_notation_is_exact():
    assert rat("1e-30") == mpq(1, 10**30)
    assert rat("2.5e3") == mpq(2500)
    assert rat("-4e-2") == mpq(-1, 25)


def test_rat_rejects_floats():
    # binary floats carry rounding noise, so they must be spelled as strings
    with pytest.raises(StructuralError):
        rat(0.1)


def test_rat_str_round_trip():
    for s in ["0", "1", "-3/7", "22/7"]:
        assert rat(rat_str(rat(s))) == rat(s)


def test_parse_scalar_real_and_complex():
    assert parse_scalar("3/4") == Scalar(mpq(3, 4))
    assert parse_scalar("-2") == Scalar(mpq(-2))
    z = parse_scalar("1+2i")
    assert z.re == mpq(1) and z.im == mpq(2)
    z = parse_scalar("-1/2-3i")
    assert z.re == mpq(-1, 2) and z.im == mpq(-3)
    assert parse_scalar("0.25").re == mpq(1, 4)


def test_scalar_str_round_trip():
    samples = [Scalar(mpq(0)), Scalar(mpq(-5, 3)), Scalar(mpq(1), mpq(-2)),
               Scalar(mpq(0), mpq(7, 2))]
    for z in samples:
        assert parse_scalar(scalar_str(z)) == z


def test_scalar_field_axioms_spot():
    a = Scalar(mpq(1, 2), mpq(3))
    b = Scalar(mpq(-2), mpq(1, 5))
    assert a * b == b * a
    assert (a + b) - b == a
    assert a * (1 / a) == Scalar(mpq(1))
    assert a.conj() * a == Scalar(a.abs_sq())


def test_scalar_pow_matches_repeated_product():
    z = Scalar(mpq(2, 3), mpq(-1))
    acc = Scalar(mpq(1))
    for n in range(6):
        assert z**n == acc
        acc = acc * z


rationals = st.fractions(
    min_value=-4, max_value=4, max_denominator=64
).map(lambda f: mpq(f.numerator, f.denominator))


@given(rationals, rationals, rationals, rationals)
def test_complex_product_components(ar, ai, br, bi):
    # (ar+ai i)(br+bi i) expanded by hand against the Scalar product
    p = Scalar(ar, ai) * Scalar(br, bi)
    assert p.re == ar * br - ai * bi
    assert p.im == ar * bi + ai * br


@given(rationals, rationals)
def test_division_inverts_product(ar, ai):
    z = Scalar(ar, ai)
    if not z:
        return
    w = Scalar(mpq(3), mpq(-1, 2))
    assert (w * z) / z == w


@given(rationals, rationals)
def test_abs_sq_is_multiplicative(ar, ai):
    z = Scalar(ar, ai)
    w = Scalar(mpq(-1, 3), mpq(2))
    assert (z * w).abs_sq() == z.abs_sq() * w.abs_sq()
