"""Exact rational arithmetic used everywhere in this package.

gmpy2.mpq is much faster than fractions.Fraction on the LP-heavy code
paths, so it is preferred when importable. Both types expose the same
arithmetic and comparison surface, str() renders both in lowest terms
as "p" or "p/q", and equal values hash equally, so no other module
needs to know which backend is active.
"""

from __future__ import annotations

import re
from typing import Union

try:
    from gmpy2 import mpq as _rational
except ImportError:  # pragma: no cover - exercised only without gmpy2
    from fractions import Fraction as _rational

# Annotation alias; concrete type depends on the active backend.
Rat = Union[int, object]

_LITERAL = re.compile(r"-?[0-9]+(/[0-9]+)?\Z")


class RationalSyntaxError(ValueError):
    """A string did not match the rational literal grammar."""


def rat(num, den=None):
    """Build an exact rational from ints, literal strings, or rationals."""
    if den is not None:
        return _rational(num, den)
    if isinstance(num, str):
        return parse_rational(num)
    return _rational(num)


def parse_rational(text: str):
    """Parse "p", "-p" or "p/q" with integer p, q. Anything else is an error.

    Decimal points, exponents, whitespace and a zero denominator are all
    rejected; this is the literal format used by model and strategy files.
    """
    if not isinstance(text, str) or not _LITERAL.match(text):
        raise RationalSyntaxError(f"not a rational literal: {text!r}")
    if "/" in text:
        p, q = text.split("/")
        if int(q) == 0:
            raise RationalSyntaxError(f"zero denominator: {text!r}")
        return _rational(int(p), int(q))
    return _rational(int(text))


def format_rational(q) -> str:
    """Render in lowest terms, matching the parse_rational grammar."""
    return str(_rational(q))


def rat_ceil(q) -> int:
    """Smallest integer >= q."""
    q = _rational(q)
    num, den = q.numerator, q.denominator
    return -((-num) // den)


ZERO = rat(0)
ONE = rat(1)
