"""Exact rational values for probabilities and weights.

Values are plain :class:`fractions.Fraction` objects, which are always kept
in lowest terms with a positive denominator.  This module adds the strict
``p/q`` text syntax used in scenario files and a few helpers that keep
floats out of the decision path.
"""

from __future__ import annotations

import re
from fractions import Fraction

Rational = Fraction

_RATIONAL_RE = re.compile(r"(-?\d+)(?:/(\d+))?")


class RationalParseError(ValueError):
    """Text that is not of the form ``p`` or ``p/q``."""

    def __init__(self, token: str):
        super().__init__(f"malformed rational {token!r} (expected 'p' or 'p/q')")
        self.token = token


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` into an exact, reduced :class:`Fraction`.

    Only integers with an optional leading minus are accepted; decimal
    points, exponents and surrounding whitespace are rejected.

    >>> parse_rational("3/6")
    Fraction(1, 2)
    """
    if not isinstance(text, str):
        raise RationalParseError(repr(text))
    m = _RATIONAL_RE.fullmatch(text)
    if m is None:
        raise RationalParseError(text)
    num, den = m.group(1), m.group(2)
    if den is None:
        return Fraction(int(num))
    if int(den) == 0:
        raise ZeroDivisionError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den))


def render(value: Fraction) -> str:
    """Lowest-terms text form; integers render without a denominator."""
    return str(Fraction(value))


def as_rational(value: Fraction | int | str) -> Fraction:
    """Coerce an int, Fraction or ``p/q`` string.  Floats are refused."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot use {type(value).__name__} {value!r} as an exact rational")


def cmp(a: Fraction, b: Fraction) -> int:
    """Three-way comparison: -1, 0 or 1."""
    return (a > b) - (a < b)


def approx(value: Fraction, digits: int = 6) -> str:
    """Decimal rendering for display columns only."""
    return f"{float(value):.{digits}f}"
