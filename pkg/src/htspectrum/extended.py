"""Extended rationals: exact ``Fraction`` values plus signed infinities.

Likelihood ratios and quantiles take the values ``+inf`` and ``-inf``.
They are represented by the two members of :class:`Infinite`, never by
float sentinels, so that comparisons against ``Fraction`` stay exact.
"""
from __future__ import annotations

import enum
from fractions import Fraction
from numbers import Real
from typing import Union

__all__ = [
    "Infinite",
    "INF",
    "NEG_INF",
    "ExtRational",
    "is_finite",
    "reciprocal",
    "neg_reciprocal",
    "ext_max",
    "format_ext",
    "parse_ext",
    "to_float",
]


class Infinite(enum.Enum):
    NEG = -1
    POS = 1

    def _cmp(self, other) -> int:
        if isinstance(other, Infinite):
            return (self.value > other.value) - (self.value < other.value)
        if isinstance(other, Real):
            if other != other:  # NaN
                raise TypeError("cannot order against NaN")
            if other == float("inf"):
                return 0 if self is Infinite.POS else -1
            if other == float("-inf"):
                return 0 if self is Infinite.NEG else 1
            return self.value
        return NotImplemented

    def __lt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c >= 0

    def __neg__(self) -> "Infinite":
        return Infinite.NEG if self is Infinite.POS else Infinite.POS

    def __float__(self) -> float:
        return float("inf") if self is Infinite.POS else float("-inf")

    def __str__(self) -> str:
        return "inf" if self is Infinite.POS else "-inf"

    __repr__ = __str__


INF = Infinite.POS
NEG_INF = Infinite.NEG

ExtRational = Union[Fraction, Infinite]


def is_finite(x: ExtRational) -> bool:
    return not isinstance(x, Infinite)


def reciprocal(x: ExtRational) -> ExtRational:
    """``1/x`` with ``1/0 = inf`` and ``1/(+-inf) = 0``."""
    if isinstance(x, Infinite):
        return Fraction(0)
    if x == 0:
        return INF
    return 1 / Fraction(x)


def neg_reciprocal(x: ExtRational) -> ExtRational:
    """``-1/x`` under the same conventions; used for one-sided slopes."""
    return -reciprocal(x)


def ext_max(a: ExtRational, b: ExtRational) -> ExtRational:
    return a if a >= b else b


def format_ext(x: ExtRational) -> str:
    """Render as ``p/q`` (or an integer), ``inf`` or ``-inf``."""
    if isinstance(x, Infinite):
        return str(x)
    return str(Fraction(x))


def parse_ext(text: str) -> ExtRational:
    t = text.strip()
    if t in ("inf", "+inf"):
        return INF
    if t == "-inf":
        return NEG_INF
    return Fraction(t)


def to_float(x: ExtRational) -> float:
    return float(x)
