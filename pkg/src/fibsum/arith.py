"""Exact integers and normalized rationals.

Python's ``int`` is the big integer and ``fractions.Fraction`` is the
rational: it is normalized on construction (positive denominator, reduced
by the gcd), so equality of values is equality of canonical forms.  The
helpers below pin the contracts the rest of the package relies on.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

from .errors import ZeroToNegativePower

Rat = Fraction
RatLike = Union[int, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)

_RAT_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def rat(value: RatLike | str, den: int = 1) -> Fraction:
    if isinstance(value, str):
        return parse_rat(value)
    return Fraction(value, den)


def rat_add(a: RatLike, b: RatLike) -> Fraction:
    return Fraction(a) + Fraction(b)


def rat_sub(a: RatLike, b: RatLike) -> Fraction:
    return Fraction(a) - Fraction(b)


def rat_mul(a: RatLike, b: RatLike) -> Fraction:
    return Fraction(a) * Fraction(b)


def rat_div(a: RatLike, b: RatLike) -> Fraction:
    if b == 0:
        raise ZeroDivisionError("rational division by zero")
    return Fraction(a) / Fraction(b)


def rat_pow(a: RatLike, e: int) -> Fraction:
    if e < 0 and a == 0:
        raise ZeroToNegativePower(f"0 raised to {e}")
    return Fraction(a) ** e


def rat_cmp(a: RatLike, b: RatLike) -> int:
    """-1, 0 or 1 as a is less than, equal to or greater than b."""
    d = Fraction(a) - Fraction(b)
    return (d > 0) - (d < 0)


def exact_pow(base: RatLike, e: int) -> RatLike:
    """Power that stays an ``int`` whenever the result is integral."""
    if e >= 0:
        return base**e
    if base == 0:
        raise ZeroToNegativePower(f"0 raised to {e}")
    if base in (1, -1):
        return base ** (-e)
    return Fraction(1) / Fraction(base) ** (-e)


def to_int(value: RatLike) -> int:
    """Lossless conversion of an integral rational; raises ValueError otherwise."""
    if isinstance(value, int):
        return value
    if value.denominator != 1:
        raise ValueError(f"{value} is not an integer")
    return value.numerator


def parse_int(text: str) -> int:
    return int(text.strip())


def parse_rat(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``; the denominator must be positive."""
    m = _RAT_RE.match(text)
    if not m:
        raise ValueError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ZeroDivisionError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rat(value: RatLike) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
