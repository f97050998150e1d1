"""Rectangular additive convolution and the largest-root bounds built on it."""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import factorial, isqrt
from typing import Sequence

from .enclosure import DEFAULT_BITS, Interval, sqrt_interval
from .exact_poly import (
    DEFAULT_TOL,
    PolyError,
    RatPoly,
    RootBracket,
    has_nonnegative_roots,
    max_root,
    s_transform,
    v_transform,
)

# Nonnegative-root precondition checks are expensive; on when the env flag is set
CHECK_INPUTS = os.environ.get("BIRAMANUJAN_CHECK_INPUTS", "") not in ("", "0")


class DomainError(ValueError):
    """Parameters outside the range where a formula is stated."""


@dataclass(frozen=True)
class ConvDims:
    """Matrix shape ``m x n`` behind ``⊞_{m,n}`` (``m`` is the long side)."""

    m: int
    n: int

    def __post_init__(self):
        # n = 0 occurs for the reduced polynomials of one-claw graphs
        if not (self.m >= self.n >= 0):
            raise DomainError(f"need m >= n >= 0, got m={self.m}, n={self.n}")

    def reduced(self) -> "ConvDims":
        """Dimensions after projecting out the all-ones singular pair."""
        return ConvDims(self.m - 1, self.n - 1)


@dataclass(frozen=True)
class BoundParams:
    theta: Fraction
    d: int
    dims: ConvDims
    u: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "theta", Fraction(self.theta))
        object.__setattr__(self, "u", Fraction(self.u))
        if self.theta < 0 or self.u < 0:
            raise DomainError("theta and u must be nonnegative")
        if self.d < 1:
            raise DomainError("d must be at least 1")


@lru_cache(maxsize=256)
def _weights(m: int, n: int) -> tuple[tuple[Fraction, ...], ...]:
    """``w[i][j]`` for ``i + j <= n``."""
    w = []
    for i in range(n + 1):
        row = []
        for j in range(n + 1 - i):
            l = i + j
            row.append(
                Fraction(factorial(n - i) * factorial(n - j), factorial(n) * factorial(n - l))
                * Fraction(factorial(m - i) * factorial(m - j), factorial(m) * factorial(m - l))
            )
        w.append(tuple(row))
    return tuple(w)


def _signed_coeffs(p: RatPoly, n: int) -> list[Fraction]:
    """``a_i`` in ``p = sum_i x^(n-i) (-1)^i a_i``."""
    return [(-1) ** i * p.coeff(n - i) for i in range(n + 1)]


def rect_conv(p: RatPoly, q: RatPoly, dims: ConvDims, check: bool | None = None) -> RatPoly:
    """``p ⊞_{m,n} q`` by the explicit coefficient double sum."""
    m, n = dims.m, dims.n
    if p.degree != n or q.degree != n:
        raise PolyError(f"rect_conv needs degree {n} inputs, got {p.degree} and {q.degree}")
    if check if check is not None else CHECK_INPUTS:
        for f in (p, q):
            if not has_nonnegative_roots(f):
                raise PolyError(f"{f} does not have all nonnegative real roots")
    a = _signed_coeffs(p, n)
    b = _signed_coeffs(q, n)
    w = _weights(m, n)
    out = [Fraction(0)] * (n + 1)
    for i in range(n + 1):
        if a[i] == 0:
            continue
        wi = w[i]
        for j in range(n + 1 - i):
            if b[j]:
                out[i + j] += wi[j] * a[i] * b[j]
    # coefficient of x^e is (-1)^(n-e) * out[n-e]
    return RatPoly([(-1) ** (n - e) * out[n - e] for e in range(n + 1)])


def rect_conv_iter(p: RatPoly, d: int, dims: ConvDims) -> RatPoly:
    """``p ⊞ p ⊞ ... ⊞ p`` with ``d`` copies."""
    if d < 1:
        raise DomainError("d must be at least 1")
    return reduce(lambda acc, _: rect_conv(acc, p, dims, check=False), range(d - 1), p)


def rect_conv_many(polys: Sequence[RatPoly], dims: ConvDims) -> RatPoly:
    if not polys:
        raise DomainError("need at least one polynomial")
    return reduce(lambda acc, q: rect_conv(acc, q, dims, check=False), polys[1:], polys[0])


def sum_sqrt_squared(radicands: Sequence) -> Fraction:
    """``(sum_i sqrt(r_i))**2`` exactly; every ``r_i * r_j`` must be a rational square."""
    rs = [Fraction(r) for r in radicands]
    if any(r < 0 for r in rs):
        raise DomainError("negative radicand")
    total = sum(rs, Fraction(0))
    for i in range(len(rs)):
        for j in range(i + 1, len(rs)):
            prod = rs[i] * rs[j]
            num, den = isqrt(prod.numerator), isqrt(prod.denominator)
            if num * num != prod.numerator or den * den != prod.denominator:
                raise DomainError(f"sqrt({rs[i]}) + sqrt({rs[j]}) has an irrational square")
            total += 2 * Fraction(num, den)
    return total


def expected_union_gram(
    p_list: Sequence[RatPoly], radicands: Sequence, dims: ConvDims
) -> tuple[RatPoly, Fraction]:
    """Reduced Gram polynomial of a union of independently permuted biregular blocks.

    ``p_list[i]`` is the Gram polynomial of block ``i`` with its trivial root
    removed (degree ``n - 1``); block ``i`` has trivial singular value
    ``sqrt(radicands[i])``. Returns ``(p_1 ⊞ ... ⊞ p_k, (sum a_i)**2)`` with
    ``⊞ = ⊞_{m-1,n-1}``; the bipartite expectation is
    ``x**(m-n) * (x**2 - trivial) * S(result)``.
    """
    if len(p_list) != len(radicands):
        raise DomainError("one radicand per polynomial")
    red = dims.reduced()
    for p in p_list:
        if p.degree != red.n:
            raise PolyError(f"expected degree {red.n}, got {p.degree}")
    return rect_conv_many(list(p_list), red), sum_sqrt_squared(radicands)


def bipartite_from_reduced(reduced: RatPoly, trivial_sq: Fraction, dims: ConvDims) -> RatPoly:
    """``x**(m-n) * (x**2 - trivial_sq) * S(reduced)``."""
    return v_transform(RatPoly([-trivial_sq, 0, 1]) * s_transform(reduced), dims.m, dims.n)


def q_transform_poly(p: RatPoly, dims: ConvDims, u) -> RatPoly:
    u = Fraction(u)
    sp = s_transform(p)
    svp = s_transform(v_transform(p, dims.m, dims.n))
    return sp * svp - (sp.derivative() * svp.derivative()) * u


def q_transform(p: RatPoly, dims: ConvDims, u, tol=DEFAULT_TOL) -> RootBracket:
    """Bracket on ``maxroot((Sp)(SVp) - u (Sp)'(SVp)')``."""
    if Fraction(u) < 0:
        raise DomainError("u must be nonnegative")
    return max_root(q_transform_poly(p, dims, u), tol)


def qd_poly(theta, m: int, n: int, d: int) -> RatPoly:
    """``S((x - theta)^n ⊞_{m,n} ... ⊞_{m,n} (x - theta)^n)`` with ``d`` copies."""
    base = RatPoly.linear_power(Fraction(theta), n)
    return s_transform(rect_conv_iter(base, d, ConvDims(m, n)))


# -- closed-form bounds -----------------------------------------------------

def r_bound(bp: BoundParams, bits: int = DEFAULT_BITS) -> Interval:
    """``(d sqrt(theta + m²u²) - d m u + (m+n) u)² - (m-n)² u²``.

    Upper-bounds the largest root of the ``d``-fold convolution of
    ``(x - theta)^n`` for every ``u >= 0``.
    """
    m, n, d, u, th = bp.dims.m, bp.dims.n, bp.d, bp.u, bp.theta
    root = sqrt_interval(th + m * m * u * u, bits)
    base = d * root + (-d * m * u + (m + n) * u)
    return base.square() - (m - n) ** 2 * u * u


def _v_value(m: int, n: int, d: int, bits: int) -> Interval:
    return sqrt_interval(Fraction(d - 1) * (Fraction(d * m, n) - 1), bits)


def u_star(theta, m: int, n: int, d: int, bits: int = DEFAULT_BITS) -> Interval:
    """Minimizer ``sqrt(theta) (v - 1) / (2 m sqrt(v))`` of :func:`r_bound` over ``u``."""
    theta = Fraction(theta)
    if theta < 2:
        raise DomainError("u_star is stated for theta >= 2")
    if d < 2 or not m >= n >= 1:
        raise DomainError("u_star needs d >= 2 and m >= n >= 1")
    v = _v_value(m, n, d, bits + 8)
    if v.is_exact and v.lo == 1:
        return Interval.point(0)
    return sqrt_interval(theta, bits + 8) * (v - 1) / (2 * m * v.sqrt(bits + 8))


def cor_ok_bound(theta, m: int, n: int, d: int, bits: int = DEFAULT_BITS) -> Interval:
    """``sqrt(theta n / m) (sqrt(d-1) + sqrt(d m / n - 1))``: bound on ``λ1(q_d)``."""
    theta = Fraction(theta)
    if theta < 2:
        raise DomainError("the bound is stated for theta >= 2")
    if d < 1 or not m >= n >= 1:
        raise DomainError("need d >= 1 and m >= n >= 1")
    pref = sqrt_interval(theta * n / m, bits)
    return pref * (sqrt_interval(d - 1, bits) + sqrt_interval(Fraction(d * m, n) - 1, bits))


def ramanujan_bound(k: int, d: int, bits: int = DEFAULT_BITS) -> Interval:
    """``sqrt(d - 1) + sqrt(k d - 1)``."""
    if k < 1 or d < 1:
        raise DomainError("k, d must be positive")
    return sqrt_interval(d - 1, bits) + sqrt_interval(k * d - 1, bits)


def ramanujan_bound_squared(k: int, d: int, bits: int = DEFAULT_BITS) -> Interval:
    """``(d - 1) + (k d - 1) + 2 sqrt((d - 1)(k d - 1))``, tighter than squaring the sum."""
    if k < 1 or d < 1:
        raise DomainError("k, d must be positive")
    return (d - 1) + (k * d - 1) + 2 * sqrt_interval((d - 1) * (k * d - 1), bits)


def shifted_bound(k: int, d: int, n: int, bits: int = DEFAULT_BITS) -> Interval:
    """Bound for the reduced ``(m-1, n-1)`` problem with ``m = k n`` (needs ``n >= 2``)."""
    m = k * n
    if n < 2:
        raise DomainError("shifted bound needs n >= 2")
    pref = sqrt_interval(Fraction(k * (n - 1), m - 1), bits)
    return pref * (sqrt_interval(d - 1, bits) + sqrt_interval(Fraction((m - 1) * d, n - 1) - 1, bits))


def shifted_bound_alt(k: int, d: int, n: int, bits: int = DEFAULT_BITS) -> Interval:
    """Same value as :func:`shifted_bound`, written with ``x = (m-n) / (n (m-1))``."""
    m = k * n
    if n < 2:
        raise DomainError("shifted bound needs n >= 2")
    x = Fraction(m - n, n * (m - 1))
    return sqrt_interval(d - 1, bits) * sqrt_interval(1 - x, bits) + sqrt_interval(d * k - 1 + x, bits)


def better_than_ramanujan_check(k: int, d: int, n: int, bits: int = DEFAULT_BITS) -> bool:
    """Whether the shifted bound is at most ``sqrt(d - 1) + sqrt(d k - 1)``."""
    if d < 2 or n < 1 or k < 1:
        raise DomainError("need d >= 2, n >= 1, k >= 1")
    if n == 1:
        # no nontrivial singular values remain
        return True
    if k == 1:
        # m = n: the two sides are the same expression
        return True
    b = bits
    while b <= 4096:
        lhs = shifted_bound(k, d, n, b)
        rhs = ramanujan_bound(k, d, b)
        if lhs.hi <= rhs.lo:
            return True
        if lhs.lo > rhs.hi:
            return False
        b *= 2
    raise ArithmeticError("comparison undecided at 4096 bits")
