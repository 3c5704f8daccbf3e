"""Arithmetic modes and number formatting.

Two kinds of scalars flow through the package:

* exact rationals (``fractions.Fraction``) whenever the inputs are rational,
  in which case every indicator is an exact rational number;
* extended-precision reals (``mpmath.mpf``, 80 bits of precision by default)
  for irrational inputs such as trigonometric moduli.

All algorithms are written against plain Python arithmetic so both kinds
(and ordinary floats) pass through the same code paths.  numpy appears only
in the Monte-Carlo sampler.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import mpmath

#: Working precision for the extended mode (fractional bits).
EXTENDED_PRECISION = 80

mpmath.mp.prec = EXTENDED_PRECISION

#: Default seed for every stochastic routine in the package.
DEFAULT_SEED = 0x5EED

Scalar = object  # Fraction | mpmath.mpf | float; duck-typed throughout.


def is_exact(value) -> bool:
    return isinstance(value, Rational)


def all_exact(values: Iterable) -> bool:
    return all(is_exact(v) for v in values)


def to_mpf(value) -> mpmath.mpf:
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)


def to_float(value) -> float:
    return float(value)


def parse_number(text: str):
    """Parse ``"p/q"`` into a Fraction, anything else into a float.

    Plain integers and decimal strings are returned as Fractions when they
    are exact in decimal (``Fraction(text)`` accepts both), keeping rational
    inputs on the exact path.
    """
    text = text.strip()
    try:
        return Fraction(text)
    except ValueError:
        return float(text)


def format_decimal(value) -> str:
    """17-significant-digit decimal rendering, identical across runs."""
    if isinstance(value, Fraction):
        return mpmath.nstr(to_mpf(value), 17)
    if isinstance(value, mpmath.mpf):
        return mpmath.nstr(value, 17)
    return f"{float(value):.17g}"


def format_rational(value) -> str | None:
    """``"p/q"`` when the value is exact, else None."""
    if isinstance(value, Rational):
        return f"{value.numerator}/{value.denominator}"
    return None


def convert_like(value, template):
    """Coerce ``value`` into the arithmetic mode of ``template``."""
    if isinstance(template, Rational):
        if isinstance(value, Rational):
            return Fraction(value)
        raise TypeError(f"cannot represent {value!r} exactly")
    if isinstance(template, mpmath.mpf):
        return to_mpf(value)
    return float(value)


def sqrt(value):
    """Square root in the matching arithmetic mode (never exact)."""
    if isinstance(value, mpmath.mpf):
        return mpmath.sqrt(value)
    return float(value) ** 0.5


def rel_close(a, b, tol) -> bool:
    scale = max(1, abs(a), abs(b))
    return abs(a - b) <= tol * scale


def values_close(a: Sequence, b: Sequence, tol) -> bool:
    return len(a) == len(b) and all(rel_close(x, y, tol) for x, y in zip(a, b))
