from decimal import Decimal, getcontext
from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from kingap.scalar import (
    DivisionByZero,
    MixedRadicands,
    NegativeRadicand,
    Surd,
    arith,
    format_scalar,
    is_rational,
    parse_scalar,
    quad,
    radicand,
    rational_part,
    sign,
    sqrt,
    surd_coefficient,
    to_scalar,
)

rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=50).map(to_scalar)
nonneg = rationals.map(abs)
radicands = st.sampled_from([2, 3, 5, 6, 7])


@st.composite
def scalars(draw, r=None):
    a = draw(rationals)
    if draw(st.booleans()):
        return a
    return quad(a, draw(rationals), r if r is not None else draw(radicands))


def test_rational_sum():
    assert arith("add", Fraction(1, 2), Fraction(1, 3)) == mpq(5, 6)


def test_conjugate_product_is_rational():
    x = arith("mul", quad(1, 1, 2), quad(1, -1, 2))
    assert x == -1
    assert is_rational(x)


def test_inverse_of_zero():
    with pytest.raises(DivisionByZero):
        arith("inv", 0)
    with pytest.raises(ZeroDivisionError):
        arith("div", quad(1, 1, 2), 0)


def test_perfect_square_root():
    assert sqrt(mpq(9, 4)) == mpq(3, 2)


def test_square_factor_extraction():
    x = sqrt(8)
    assert (rational_part(x), surd_coefficient(x), radicand(x)) == (0, 2, 2)


def test_root_of_fraction_moves_denominator_out():
    x = sqrt(mpq(1, 2))
    assert (surd_coefficient(x), radicand(x)) == (mpq(1, 2), 2)


def test_negative_root():
    with pytest.raises(NegativeRadicand):
        sqrt(-1)


def test_sign_examples():
    assert sign(to_scalar(0)) == 0
    assert sign(mpq(3, 2)) == 1
    assert sign(quad(1, -1, 2)) == -1


def test_sign_against_high_precision():
    getcontext().prec = 60
    for a, b, r in [(1, -1, 2), (-7, 5, 2), (99, -70, 2), (-99, 70, 2), (5, -2, 6)]:
        ref = Decimal(a) + Decimal(b) * Decimal(r).sqrt()
        assert sign(quad(a, b, r)) == (ref > 0) - (ref < 0)


def test_mixed_radicands_rejected():
    with pytest.raises(MixedRadicands):
        quad(0, 1, 2) + quad(0, 1, 3)


def test_floats_rejected():
    with pytest.raises(TypeError):
        to_scalar(0.5)


def test_format_and_parse():
    assert format_scalar(mpq(-3, 4)) == "-3/4"
    assert format_scalar(quad(1, 2, 8)) == "1+4*sqrt(2)"
    assert parse_scalar("1/2+-3*sqrt(5)") == quad(mpq(1, 2), -3, 5)
    with pytest.raises(ValueError):
        parse_scalar("1.5")


def test_surd_collapses_when_coefficient_vanishes():
    x = quad(1, 1, 2) - quad(0, 1, 2)
    assert x == 1 and is_rational(x)


@given(rationals, rationals, rationals)
def test_rational_field_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    if x:
        assert x * arith("inv", x) == 1


@settings(max_examples=200)
@given(st.data(), radicands)
def test_surd_field_axioms(data, r):
    x, y, z = (data.draw(scalars(r)) for _ in range(3))
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert (x + y) - y == x
    if x:
        assert x * (1 / x) == 1


@given(nonneg)
def test_sqrt_squares_back(x):
    s = sqrt(x)
    assert s * s == x


@settings(max_examples=200)
@given(st.data(), radicands)
def test_sign_is_multiplicative_on_positives(data, r):
    x, y = data.draw(scalars(r)), data.draw(scalars(r))
    if sign(x) > 0 and sign(y) > 0:
        assert sign(x * y) > 0
    assert sign(-x) == -sign(x)


@given(scalars())
def test_canonical_text_round_trip(x):
    text = format_scalar(x)
    assert format_scalar(parse_scalar(text)) == text
    assert parse_scalar(text) == x


@given(scalars())
def test_equal_values_hash_equal(x):
    y = parse_scalar(format_scalar(x))
    assert hash(x) == hash(y)
    if isinstance(x, Surd):
        assert not is_rational(x)
