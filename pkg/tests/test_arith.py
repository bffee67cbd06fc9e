from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibsum.arith import (
    exact_pow,
    format_rat,
    parse_int,
    parse_rat,
    rat,
    rat_add,
    rat_cmp,
    rat_div,
    rat_mul,
    rat_pow,
    to_int,
)
from fibsum.errors import ZeroToNegativePower

rats = st.fractions(max_denominator=10**6).filter(lambda f: abs(f.numerator) < 10**30)
bigints = st.integers(min_value=-(10**40), max_value=10**40)


def test_add_examples():
    assert rat_add(Fraction(1, 2), Fraction(1, 3)) == Fraction(5, 6)
    assert rat_add(Fraction(7, 9), 0) == Fraction(7, 9)
    z = rat_add(Fraction(1, 3), Fraction(-1, 3))
    assert (z.numerator, z.denominator) == (0, 1)


def test_mul_examples():
    assert rat_mul(Fraction(2, 3), Fraction(3, 4)) == Fraction(1, 2)
    assert rat_mul(Fraction(5, 7), 1) == Fraction(5, 7)
    assert rat_mul(Fraction(5, 7), 0) == 0


def test_pow_examples():
    assert rat_pow(Fraction(1, 2), 3) == Fraction(1, 8)
    assert rat_pow(Fraction(5, 7), 0) == 1
    assert rat_pow(Fraction(2, 3), -2) == Fraction(9, 4)
    with pytest.raises(ZeroToNegativePower):
        rat_pow(0, -1)
    with pytest.raises(ZeroDivisionError):
        exact_pow(0, -3)


def test_cmp_examples():
    assert rat_cmp(Fraction(1, 3), Fraction(1, 2)) == -1
    assert rat_cmp(Fraction(4, 6), Fraction(2, 3)) == 0
    assert rat_cmp(Fraction(-1, 2), Fraction(-1, 3)) == -1


def test_exact_pow_stays_integral():
    assert type(exact_pow(-1, -3)) is int and exact_pow(-1, -3) == -1
    assert type(exact_pow(3, 4)) is int
    assert exact_pow(2, -2) == Fraction(1, 4)


def test_string_forms():
    assert parse_rat("-6/4") == Fraction(-3, 2)
    assert parse_rat(" 7 ") == 7
    assert format_rat(Fraction(6, 3)) == "2"
    assert format_rat(Fraction(-3, 6)) == "-1/2"
    assert rat("3/9") == Fraction(1, 3)
    for bad in ("1/-2", "a/b", "", "1.5"):
        with pytest.raises(ValueError):
            parse_rat(bad)
    with pytest.raises(ZeroDivisionError):
        parse_rat("1/0")


def test_division_by_zero_is_an_error():
    with pytest.raises(ZeroDivisionError):
        rat_div(1, 0)


def test_to_int():
    assert to_int(Fraction(10, 5)) == 2
    with pytest.raises(ValueError):
        to_int(Fraction(1, 2))


@given(bigints)
def test_bigint_decimal_round_trip(n):
    assert parse_int(str(n)) == n


@given(st.integers(min_value=-(2**62), max_value=2**62), st.integers(min_value=-(2**62), max_value=2**62))
def test_matches_word_arithmetic(a, b):
    mask = 2**64
    assert ((a + b) - (a + b) % mask) % mask == 0
    assert rat_add(a, b) == a + b
    assert rat_mul(a, b) == a * b


@settings(max_examples=500)
@given(rats, rats, rats)
def test_field_laws(a, b, c):
    assert rat_add(rat_add(a, b), c) == rat_add(a, rat_add(b, c))
    assert rat_mul(a, rat_add(b, c)) == rat_add(rat_mul(a, b), rat_mul(a, c))


@given(rats)
def test_normalized(a):
    from math import gcd

    assert a.denominator > 0
    assert gcd(abs(a.numerator), a.denominator) == 1
    again = Fraction(a.numerator, a.denominator)
    assert (again.numerator, again.denominator) == (a.numerator, a.denominator)
    assert parse_rat(format_rat(a)) == a


@given(rats, rats)
def test_cmp_total_order(a, b):
    assert rat_cmp(a, b) == -rat_cmp(b, a)
    assert (rat_cmp(a, b) < 0) == (a < b)
