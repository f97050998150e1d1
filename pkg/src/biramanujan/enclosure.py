"""Rational interval enclosures for irrational bound values.

Values such as ``sqrt(2) + sqrt(5)`` are carried as closed intervals with
rational endpoints so comparisons against exact root brackets are decidable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

DEFAULT_BITS = 128


def _frac(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("floats are not accepted in exact enclosures")
    return x if isinstance(x, Fraction) else Fraction(x)


def _exact_sqrt(x: Fraction) -> Fraction | None:
    a, b = x.numerator, x.denominator
    ra, rb = isqrt(a), isqrt(b)
    if ra * ra == a and rb * rb == b:
        return Fraction(ra, rb)
    return None


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` with rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x) -> "Interval":
        x = _frac(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def __float__(self) -> float:
        return float(self.mid)

    def __contains__(self, x) -> bool:
        return self.lo <= _frac(x) <= self.hi

    def __add__(self, other) -> "Interval":
        o = _iv(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other) -> "Interval":
        return self + (-_iv(other))

    def __rsub__(self, other) -> "Interval":
        return _iv(other) - self

    def __mul__(self, other) -> "Interval":
        o = _iv(other)
        prods = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(prods), max(prods))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        o = _iv(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("divisor interval contains zero")
        return self * Interval(1 / o.hi, 1 / o.lo)

    def __rtruediv__(self, other) -> "Interval":
        return _iv(other) / self

    def square(self) -> "Interval":
        if self.lo >= 0:
            return Interval(self.lo**2, self.hi**2)
        if self.hi <= 0:
            return Interval(self.hi**2, self.lo**2)
        return Interval(Fraction(0), max(self.lo**2, self.hi**2))

    def sqrt(self, bits: int = DEFAULT_BITS) -> "Interval":
        if self.lo < 0:
            raise ValueError("sqrt of an interval reaching below zero")
        return Interval(sqrt_lower(self.lo, bits), sqrt_upper(self.hi, bits))

    def certainly_lt(self, other) -> bool:
        return self.hi < _iv(other).lo

    def certainly_le(self, other) -> bool:
        return self.hi <= _iv(other).lo

    def format(self, digits: int = 12) -> str:
        """Decimal midpoint with the half-width as an explicit ``±`` term."""
        half = self.width / 2
        return f"{_decimal(self.mid, digits)} ± {float(half):.3e}"


def _iv(x) -> Interval:
    return x if isinstance(x, Interval) else Interval.point(x)


def sqrt_lower(x, bits: int = DEFAULT_BITS) -> Fraction:
    """Largest dyadic ``k / 2**bits`` not exceeding ``sqrt(x)`` (exact if rational)."""
    x = _frac(x)
    ex = _exact_sqrt(x)
    if ex is not None:
        return ex
    scale = 1 << bits
    # floor(sqrt(x) * 2**bits) = isqrt(floor(x * 4**bits))
    return Fraction(isqrt((x.numerator * scale * scale) // x.denominator), scale)


def sqrt_upper(x, bits: int = DEFAULT_BITS) -> Fraction:
    x = _frac(x)
    ex = _exact_sqrt(x)
    if ex is not None:
        return ex
    return sqrt_lower(x, bits) + Fraction(1, 1 << bits)


def sqrt_interval(x, bits: int = DEFAULT_BITS) -> Interval:
    return _iv(x).sqrt(bits)


def _decimal(x: Fraction, digits: int) -> str:
    sign = "-" if x < 0 else ""
    x = abs(x)
    scaled = round(x * 10**digits)
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"
