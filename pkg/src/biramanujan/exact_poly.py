"""Dense univariate polynomials over the rationals.

Coefficients are :class:`fractions.Fraction` stored lowest degree first.
Root queries (Sturm counts, largest-root brackets) are exact and return
rational data; :meth:`RatPoly.roots_float` exists for display only.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = Fraction(1, 2**64)


class PolyError(ValueError):
    """Raised on invalid polynomial operations (zero polynomial, non-root...)."""


def _to_frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, float):
        raise TypeError("floats are not accepted as exact coefficients")
    return Fraction(c)


def _trim(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    end = len(coeffs)
    while end > 0 and coeffs[end - 1] == 0:
        end -= 1
    return tuple(coeffs[:end])


@dataclass(frozen=True, eq=True)
class RatPoly:
    """Immutable polynomial with exact rational coefficients (low degree first).

    The zero polynomial has ``coeffs == ()`` and degree ``-1``.
    """

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable = ()):
        object.__setattr__(self, "coeffs", _trim([_to_frac(c) for c in coeffs]))

    # -- constructors ------------------------------------------------------
    @classmethod
    def constant(cls, c) -> "RatPoly":
        return cls([c])

    @classmethod
    def x(cls) -> "RatPoly":
        return cls([0, 1])

    @classmethod
    def monomial(cls, deg: int, c=1) -> "RatPoly":
        return cls([0] * deg + [c])

    @classmethod
    def from_roots(cls, roots: Iterable) -> "RatPoly":
        p = cls([1])
        for r in roots:
            p = p * cls([-_to_frac(r), 1])
        return p

    @classmethod
    def linear_power(cls, root, power: int) -> "RatPoly":
        """``(x - root)**power``."""
        return cls([-_to_frac(root), 1]) ** power

    # -- basic properties --------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        if not self.coeffs:
            return Fraction(0)
        return self.coeffs[-1]

    def coeff(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def monic(self) -> "RatPoly":
        if self.is_zero:
            raise PolyError("zero polynomial has no monic form")
        lc = self.lead
        return RatPoly([c / lc for c in self.coeffs])

    def __call__(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self) -> str:
        if self.is_zero:
            return "RatPoly(0)"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and c == 1:
                terms.append(f"+{mono}")
            elif mono and c == -1:
                terms.append(f"-{mono}")
            else:
                sign = "-" if c < 0 else "+"
                cs = str(abs(c))
                terms.append(f"{sign}{cs}{'*' + mono if mono else ''}")
        s = "".join(terms)
        return f"RatPoly({s[1:] if s.startswith('+') else s})"

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other) -> "RatPoly":
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return RatPoly([self.coeff(i) + other.coeff(i) for i in range(n)])

    __radd__ = __add__

    def __neg__(self) -> "RatPoly":
        return RatPoly([-c for c in self.coeffs])

    def __sub__(self, other) -> "RatPoly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "RatPoly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "RatPoly":
        if not isinstance(other, RatPoly):
            c = _to_frac(other)
            return RatPoly([a * c for a in self.coeffs])
        if self.is_zero or other.is_zero:
            return RatPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RatPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "RatPoly":
        c = _to_frac(c)
        return RatPoly([a / c for a in self.coeffs])

    def __pow__(self, e: int) -> "RatPoly":
        if e < 0:
            raise PolyError("negative power")
        result = RatPoly([1])
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divmod(self, other: "RatPoly") -> tuple["RatPoly", "RatPoly"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        if self.degree < dq:
            return RatPoly(), self
        quot = [Fraction(0)] * (self.degree - dq + 1)
        lc = other.lead
        for i in range(self.degree - dq, -1, -1):
            c = rem[i + dq] / lc
            quot[i] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[i + j] -= c * b
        return RatPoly(quot), RatPoly(rem[:dq])

    def __floordiv__(self, other: "RatPoly") -> "RatPoly":
        return self.divmod(other)[0]

    def __mod__(self, other: "RatPoly") -> "RatPoly":
        return self.divmod(other)[1]

    def derivative(self) -> "RatPoly":
        return RatPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def compose_square(self) -> "RatPoly":
        """``p(x**2)``."""
        out: list[Fraction] = []
        for c in self.coeffs:
            out.extend((c, Fraction(0)))
        return RatPoly(out)

    def shift_degree(self, k: int) -> "RatPoly":
        """``x**k * p(x)``."""
        if self.is_zero:
            return self
        return RatPoly([Fraction(0)] * k + list(self.coeffs))

    def reflect(self) -> "RatPoly":
        """``p(-x)``."""
        return RatPoly([c if i % 2 == 0 else -c for i, c in enumerate(self.coeffs)])

    # -- display / serialization ------------------------------------------
    def to_floats(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    def roots_float(self) -> np.ndarray:
        """Numeric roots, sorted descending by real part. Display only."""
        if self.degree < 1:
            return np.array([])
        r = np.roots(self.to_floats()[::-1])
        return r[np.argsort(-r.real)]

    def to_text(self) -> str:
        lines = [str(self.degree)]
        lines += [f"{c.numerator}/{c.denominator}" for c in self.coeffs]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RatPoly":
        tokens = text.split()
        if not tokens:
            raise PolyError("empty polynomial record")
        deg = int(tokens[0])
        coeffs = [Fraction(t) for t in tokens[1:]]
        if len(coeffs) != max(deg + 1, 0):
            raise PolyError(f"degree {deg} needs {deg + 1} coefficients, got {len(coeffs)}")
        p = cls(coeffs)
        if p.degree != deg:
            raise PolyError("leading coefficient is zero")
        return p


def _as_poly(p) -> RatPoly:
    return p if isinstance(p, RatPoly) else RatPoly([p])


def poly_gcd(a: RatPoly, b: RatPoly) -> RatPoly:
    """Monic gcd (the zero polynomial if both inputs are zero)."""
    while not b.is_zero:
        a, b = b, a % b
    return a.monic() if not a.is_zero else a


# -- the two spectral transforms ------------------------------------------

def s_transform(p: RatPoly) -> RatPoly:
    """Substitute ``x -> x**2``: squared singular values to a bipartite spectrum."""
    return p.compose_square()


def v_transform(p: RatPoly, m: int, n: int) -> RatPoly:
    """Pad with the ``m - n`` zero singular values: ``x**(m-n) * p``."""
    if m < n:
        raise PolyError(f"invalid dimensions m={m} < n={n}")
    return p.shift_degree(m - n)


def divide_out_root(p: RatPoly, rho) -> RatPoly:
    """Exact synthetic division by ``(x - rho)``; ``rho`` must be a root."""
    rho = _to_frac(rho)
    if p.is_zero:
        raise PolyError("cannot divide the zero polynomial")
    if p(rho) != 0:
        raise PolyError(f"{rho} is not a root (p(rho) = {p(rho)})")
    out = [Fraction(0)] * p.degree
    carry = Fraction(0)
    for i in range(p.degree, 0, -1):
        carry = p.coeffs[i] + carry * rho
        out[i - 1] = carry
    return RatPoly(out)


# -- real roots -------------------------------------------------------------

def squarefree_part(p: RatPoly) -> RatPoly:
    if p.is_zero:
        raise PolyError("zero polynomial")
    if p.degree < 1:
        return p.monic()
    g = poly_gcd(p, p.derivative())
    return (p // g).monic()


def squarefree_decomposition(p: RatPoly) -> list[tuple[RatPoly, int]]:
    """Yun's algorithm: ``p = lc * prod f_i**i`` with each ``f_i`` square-free."""
    if p.is_zero:
        raise PolyError("zero polynomial")
    out: list[tuple[RatPoly, int]] = []
    if p.degree < 1:
        return out
    f = p.monic()
    df = f.derivative()
    a = poly_gcd(f, df)
    b = f // a
    c = df // a
    d = c - b.derivative()
    i = 1
    while b.degree >= 1:
        a = poly_gcd(b, d)
        if a.degree >= 1:
            out.append((a, i))
        b = b // a
        c = d // a
        d = c - b.derivative()
        i += 1
    return out


def sturm_sequence(p: RatPoly) -> list[RatPoly]:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero:
        r = seq[-2] % seq[-1]
        seq.append(-r)
    seq.pop()
    return seq


def _variations(seq: Sequence[RatPoly], x: Fraction) -> int:
    count = 0
    last = 0
    for q in seq:
        v = q(x)
        if v == 0:
            continue
        s = 1 if v > 0 else -1
        if last and s != last:
            count += 1
        last = s
    return count


def sturm_count(p: RatPoly, lo, hi, _seq: list[RatPoly] | None = None) -> int:
    """Number of distinct real roots of ``p`` in the half-open interval ``(lo, hi]``."""
    if p.is_zero:
        raise PolyError("Sturm count of the zero polynomial")
    lo, hi = _to_frac(lo), _to_frac(hi)
    if not lo < hi:
        raise PolyError(f"empty interval ({lo}, {hi}]")
    seq = _seq if _seq is not None else sturm_sequence(squarefree_part(p))
    return _variations(seq, lo) - _variations(seq, hi)


def cauchy_bound(p: RatPoly) -> Fraction:
    """A power of two strictly above every |root| of ``p``."""
    if p.is_zero:
        raise PolyError("zero polynomial")
    lc = abs(p.lead)
    bound = 1 + max((abs(c) / lc for c in p.coeffs[:-1]), default=Fraction(0))
    b = Fraction(1)
    while b <= bound:
        b *= 2
    return b


@dataclass(frozen=True)
class RootBracket:
    """Rational interval ``(lo, hi]`` holding ``count`` distinct roots."""

    lo: Fraction
    hi: Fraction
    count: int

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __float__(self) -> float:
        return float(self.mid)

    def overlaps(self, other: "RootBracket") -> bool:
        return self.lo < other.hi and other.lo < self.hi


class RootFinder:
    """Sturm-sequence bisection for the largest real root of a fixed polynomial.

    Keeps the Sturm chain so repeated refinement (candidate comparison,
    certification) does not rebuild it.
    """

    def __init__(self, p: RatPoly):
        if p.is_zero:
            raise PolyError("zero polynomial")
        self.poly = p
        self.sqf = squarefree_part(p)
        self.seq = sturm_sequence(self.sqf)
        self.bound = cauchy_bound(p)
        self._bracket: RootBracket | None = None

    def count(self, lo, hi) -> int:
        return sturm_count(self.sqf, lo, hi, _seq=self.seq)

    def max_root(self, tol=DEFAULT_TOL) -> RootBracket:
        tol = _to_frac(tol)
        if tol <= 0:
            raise PolyError("tolerance must be positive")
        br = self._bracket
        if br is None:
            lo, hi = -self.bound, self.bound
            if self.sqf.degree < 1 or self.count(lo, hi) == 0:
                raise PolyError("polynomial has no real root")
            # an exact rational largest root shows up as a linear factor
            lin = [f for f, _ in squarefree_decomposition(self.poly) if f.degree == 1]
            exact = [-f.coeffs[0] for f in lin]
            if exact:
                r = max(exact)
                if self.count(r, hi) == 0:
                    lo, hi = r - tol, r
                    # keep width <= tol while ensuring no other root in (lo, hi]
                    while self.count(lo, hi) > 1:
                        lo = (lo + hi) / 2
            br = RootBracket(lo, hi, self.count(lo, hi))
        lo, hi = br.lo, br.hi
        cnt = br.count
        while hi - lo > tol or cnt > 1:
            mid = (lo + hi) / 2
            c = self.count(mid, hi)
            if c >= 1:
                lo, cnt = mid, c
            else:
                hi = mid
                cnt = self.count(lo, hi)
        self._bracket = RootBracket(lo, hi, cnt)
        return self._bracket


def max_root(p: RatPoly, tol=DEFAULT_TOL) -> RootBracket:
    """Bracket of width ``<= tol`` isolating the largest real root of ``p``."""
    return RootFinder(p).max_root(tol)


def is_real_rooted(p: RatPoly) -> bool:
    """True iff every root of ``p`` (with multiplicity) is real."""
    if p.is_zero:
        raise PolyError("zero polynomial")
    if p.degree < 1:
        return True
    real = 0
    for f, mult in squarefree_decomposition(p):
        b = cauchy_bound(f)
        real += mult * sturm_count(f, -b, b)
    return real == p.degree


def min_root_nonnegative(p: RatPoly) -> bool:
    """True iff ``p`` has no real root strictly below zero."""
    if p.degree < 1:
        return True
    b = cauchy_bound(p)
    sqf = squarefree_part(p)
    # roots in (-b, 0) = roots in (-b, 0] minus a possible root at 0
    neg = sturm_count(sqf, -b, 0) - (1 if sqf(0) == 0 else 0)
    return neg == 0


def has_nonnegative_roots(p: RatPoly) -> bool:
    return is_real_rooted(p) and min_root_nonnegative(p)
