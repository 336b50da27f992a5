"""Exact rational scalars and vectors.

All coordinates, volumes and measure bounds are ``Q`` values (GMP rationals,
always in lowest terms with a positive denominator). Points are plain tuples
of them.
"""
from __future__ import annotations

import math
import numbers
import re
from typing import Iterable, Sequence

from gmpy2 import mpq as Q

Point = tuple  # tuple[Q, ...]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


class RationalParseError(ValueError):
    pass


def parse_rational(text) -> Q:
    """Parse ``"p/q"`` or ``"p"``; integers are accepted as is.

    Decimal literals (``"0.5"``, ``1e-3``, JSON floats) are rejected so that no
    value is silently rounded.
    """
    if isinstance(text, bool):
        raise RationalParseError(f"not a rational literal: {text!r}")
    if isinstance(text, numbers.Rational):
        return Q(text)
    if not isinstance(text, str):
        raise RationalParseError(
            f"rational literals must be strings 'p/q' or 'p', got {text!r}")
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise RationalParseError(
            f"not a rational literal (use 'p/q' or 'p', decimals are rejected): {text!r}")
    num, den = m.group(1), m.group(2)
    if den is not None and int(den) == 0:
        raise RationalParseError(f"zero denominator: {text!r}")
    return Q(int(num), int(den) if den is not None else 1)


def fmt(x: Q) -> str:
    x = Q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def point(*coords) -> Point:
    if len(coords) == 1 and not isinstance(coords[0], (str, numbers.Rational)):
        coords = tuple(coords[0])
    return tuple(parse_rational(c) if isinstance(c, str) else Q(c) for c in coords)


def vadd(a: Point, b: Point) -> Point:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Point, b: Point) -> Point:
    return tuple(x - y for x, y in zip(a, b))


def vscale(t, a: Point) -> Point:
    return tuple(t * x for x in a)


def dot(a: Sequence, b: Sequence) -> Q:
    return sum((x * y for x, y in zip(a, b)), Q(0))


def dist2(a: Point, b: Point) -> Q:
    return sum(((x - y) ** 2 for x, y in zip(a, b)), Q(0))


def centroid(pts: Iterable[Point]) -> Point:
    pts = list(pts)
    n = len(pts[0])
    return tuple(sum((p[i] for p in pts), Q(0)) / len(pts) for i in range(n))


def _isqrt_exact(n: int):
    r = math.isqrt(n)
    return r if r * r == n else None


def exact_sqrt(q: Q):
    """Return sqrt(q) if it is rational, else None."""
    q = Q(q)
    if q < 0:
        raise ValueError("negative square")
    a = _isqrt_exact(q.numerator)
    b = _isqrt_exact(q.denominator)
    if a is None or b is None:
        return None
    return Q(a, b)


def sqrt_enclosure(q: Q, bits: int = 20) -> tuple[Q, Q]:
    """Rational ``lo <= sqrt(q) <= hi`` with ``hi - lo <= 2**-bits``.

    Perfect rational squares come back as a degenerate interval.
    """
    q = Q(q)
    root = exact_sqrt(q)
    if root is not None:
        return root, root
    scale = 1 << bits
    # floor(sqrt(q) * 2**bits) = isqrt(floor(q * 4**bits))
    lo_int = math.isqrt((q.numerator * scale * scale) // q.denominator)
    return Q(lo_int, scale), Q(lo_int + 1, scale)


def round_to_grid(x: float, denom: int = 1 << 16) -> Q:
    return Q(round(x * denom), denom)
