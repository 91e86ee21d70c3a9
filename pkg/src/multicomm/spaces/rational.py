"""Rational parsing and formatting helpers.

Public values are :class:`fractions.Fraction`; the LP and elimination kernels
convert to ``gmpy2.mpq`` internally because it is an order of magnitude faster.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq

__all__ = ["Fraction", "Q", "fmt", "fmt_vec", "parse_vec", "to_mpq", "from_mpq"]


def Q(x) -> Fraction:
    """Coerce ``x`` (int, Fraction, mpq or ``"p/q"`` string) to a Fraction.

    Floats are rejected; every number entering the core must be exact.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, Rational) or type(x).__name__ == "mpq":
        return Fraction(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def fmt(x) -> str:
    q = Q(x)
    return f"{q.numerator}/{q.denominator}"


def fmt_vec(v) -> list[str]:
    return [fmt(x) for x in v]


def parse_vec(v) -> tuple[Fraction, ...]:
    return tuple(Q(x) for x in v)


def to_mpq(x):
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def from_mpq(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))
