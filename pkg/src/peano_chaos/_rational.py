"""Exact rational helpers shared by every module."""

from fractions import Fraction

from gmpy2 import mpq

ZERO = mpq(0)
ONE = mpq(1)


def Q(value) -> mpq:
    """Coerce ints, strings ("3/4", "0.25"), Fractions and mpq to mpq.

    Floats are rejected: every quantity in the package is exact.
    """
    if isinstance(value, type(ZERO)):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        fr = Fraction(value.strip())
        return mpq(fr.numerator, fr.denominator)
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass a string such as '1/3'")
    raise TypeError(f"cannot interpret {value!r} as a rational")


def fmt(q) -> str:
    q = Q(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def floor_div(a, b) -> int:
    """floor(a / b) for positive rationals."""
    x = Q(a) / Q(b)
    return int(x.numerator // x.denominator)
