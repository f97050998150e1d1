"""Trivariate generating polynomial and the expected frame-completion polynomial.

``theta_A(x, y, z) = det(xI + Ã(y,z)ᵀ Ã(y,z))`` with ``Ã = (yI_s ⊕ I) A (zI_r ⊕ I)``
expands as ``sum_{j,p,q} x^(n-j) y^(2p) z^(2q) A^j_{p,q}`` where ``A^j_{p,q}`` sums
the squared ``j x j`` minors using ``p`` of the first ``s`` rows and ``q`` of the
first ``r`` columns. Only ``y²`` and ``z²`` occur, so everything below works in
``Y = y²`` and ``Z = z²`` and stays rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .exact_linalg import RatMatrix, det_x_plus, interpolate
from .exact_poly import RatPoly


class TableError(ValueError):
    pass


@dataclass(frozen=True)
class FrameDims:
    m: int
    n: int
    s: int
    r: int

    def __post_init__(self):
        if not (self.m >= self.s >= self.r >= 0 and self.n >= self.r and self.m >= self.n):
            raise TableError(f"invalid frame dims {self}")


@dataclass(frozen=True)
class ThetaTable:
    """Coefficients ``coeffs[j][p][q]`` of ``x^(n-j) Y^p Z^q`` in ``theta``."""

    n: int
    s: int
    r: int
    coeffs: tuple[tuple[tuple[Fraction, ...], ...], ...]

    def __getitem__(self, jpq: tuple[int, int, int]) -> Fraction:
        j, p, q = jpq
        if 0 <= j <= self.n and 0 <= p <= self.s and 0 <= q <= self.r:
            return self.coeffs[j][p][q]
        return Fraction(0)

    def nonzero(self):
        for j, plane in enumerate(self.coeffs):
            for p, row in enumerate(plane):
                for q, v in enumerate(row):
                    if v:
                        yield j, p, q, v

    def evaluate(self, Y, Z) -> RatPoly:
        """The slice ``det(xI + ...)`` at ``y² = Y``, ``z² = Z`` as a polynomial in ``x``."""
        Y, Z = Fraction(Y), Fraction(Z)
        c = [Fraction(0)] * (self.n + 1)
        for j, p, q, v in self.nonzero():
            c[self.n - j] += v * Y**p * Z**q
        return RatPoly(c)

    def to_text(self) -> str:
        lines = [f"{self.n} {self.s} {self.r}"]
        lines += [f"{j} {p} {q} {v.numerator}/{v.denominator}" for j, p, q, v in self.nonzero()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ThetaTable":
        rows = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        n, s, r = (int(v) for v in rows[0])
        grid = [[[Fraction(0)] * (r + 1) for _ in range(s + 1)] for _ in range(n + 1)]
        for j, p, q, v in rows[1:]:
            grid[int(j)][int(p)][int(q)] = Fraction(v)
        return cls.from_grid(n, s, r, grid)

    @classmethod
    def from_grid(cls, n: int, s: int, r: int, grid) -> "ThetaTable":
        return cls(n, s, r, tuple(tuple(tuple(row) for row in plane) for plane in grid))


def _interpolate_table(n: int, s: int, r: int, slice_at) -> ThetaTable:
    """Recover ``coeffs[j][p][q]`` from slices ``slice_at(Y, Z) -> det(xI + ...)``.

    The degree in ``Y`` is at most ``min(s, n)`` and in ``Z`` at most ``r``, so
    ``Y ∈ {1..min(s,n)+1}``, ``Z ∈ {1..r+1}`` determine the table.
    """
    ys = list(range(1, min(s, n) + 2))
    zs = list(range(1, r + 2))
    vals = {(Y, Z): slice_at(Fraction(Y), Fraction(Z)) for Y in ys for Z in zs}
    grid = [[[Fraction(0)] * (r + 1) for _ in range(s + 1)] for _ in range(n + 1)]
    for j in range(n + 1):
        # nested univariate interpolation: first in Z for each Y, then in Y per Z-power
        inner = [interpolate(zs, [vals[Y, Z].coeff(n - j) for Z in zs]) for Y in ys]
        for q in range(r + 1):
            outer = interpolate(ys, [pz.coeff(q) for pz in inner])
            if outer.degree > min(s, n):
                raise TableError("interpolation degree exceeded")
            for p in range(min(s, n) + 1):
                grid[j][p][q] = outer.coeff(p)
    return ThetaTable.from_grid(n, s, r, grid)


def theta(A: RatMatrix, s: int, r: int) -> ThetaTable:
    """Coefficient table of ``theta_A`` with ``y`` on the first ``s`` rows and ``z`` on the
    first ``r`` columns of ``A``."""
    m, n = A.shape
    if not (0 <= s <= m and 0 <= r <= n):
        raise TableError(f"s={s}, r={r} out of range for a {m}x{n} matrix")
    # det(xI + D_z AᵀD_y² A D_z) = det(xI + Aᵀ D_Y A D_Z)
    top, bottom = A.submatrix(range(s), range(n)), A.submatrix(range(s, m), range(n))
    G_top = top.T @ top
    G_bot = bottom.T @ bottom

    def slice_at(Y, Z):
        G = G_top * Y + G_bot
        scaled = RatMatrix(n, n, tuple(G[i, j] * (Z if j < r else 1) for i in range(n) for j in range(n)))
        return det_x_plus(scaled)

    return _interpolate_table(n, s, r, slice_at)


def theta_hat(A_plus: RatMatrix, k: int, l: int, t: int) -> ThetaTable:
    """Table of ``theta`` for the rotated matrix ``Â = (U ⊕ I) A⁺ (V ⊕ I)ᵀ``, computed
    without the (irrational) orthogonal ``U``, ``V``.

    ``U``/``V`` send the normalized all-ones vector of the free ``kℓ``-row and
    ``ℓ``-column blocks to the last coordinate of the block, so ``y``/``z`` act on
    the complements of those vectors. Conjugating inside the determinant gives
    ``theta_Â = det(xI + A⁺ᵀ W_Y A⁺ W_Z)`` with the rational weights
    ``W_Y = (Y I + (1-Y)/(kℓ) J) ⊕ I`` and ``W_Z = (Z I + (1-Z)/ℓ J) ⊕ I``.
    """
    n = l + t
    if A_plus.shape != (k * n, n):
        raise TableError(f"A_plus must be {k * n}x{n}, got {A_plus.shape}")
    if l < 1:
        raise TableError("theta_hat needs at least one free claw")
    kl = k * l
    s, r = kl - 1, l - 1
    top = A_plus.submatrix(range(kl), range(n))
    G0 = A_plus.T @ A_plus
    G1 = top.T @ top
    g = [sum(top[i, j] for i in range(kl)) for j in range(n)]
    ggT = RatMatrix(n, n, tuple(g[i] * g[j] for i in range(n) for j in range(n)))

    def slice_at(Y, Z):
        # A⁺ᵀ W_Y A⁺ = G0 + (Y-1) G1 + (1-Y)/(kℓ) g gᵀ
        K = G0 + G1 * (Y - 1) + ggT * ((1 - Y) / kl)
        # right-multiply by W_Z: column j < ℓ becomes Z K[:,j] + (1-Z)/ℓ sum_{j'<ℓ} K[:,j']
        rows = []
        for i in range(n):
            row = [K[i, j] for j in range(n)]
            block_sum = sum(row[:l], Fraction(0)) * (1 - Z) / l
            rows.append([row[j] * Z + block_sum if j < l else row[j] for j in range(n)])
        return det_x_plus(RatMatrix.from_rows(rows))

    return _interpolate_table(n, s, r, slice_at)


@lru_cache(maxsize=4096)
def _weight(s: int, r: int, p: int, q: int, e: int) -> Fraction:
    """``C(s-p, e) C(r-q, e) / C(s, e)``."""
    if e > s:
        return Fraction(0)
    return Fraction(comb(s - p, e) * comb(r - q, e), comb(s, e))


def expected_completion(tab: ThetaTable, dims: FrameDims, k) -> RatPoly:
    """``E_Q det(xI + (A + sqrt(k)(Q ⊕ 0))ᵀ(A + sqrt(k)(Q ⊕ 0)))`` over uniform
    ``Q ∈ V_r(R^s)``, from the theta table of ``A``.

    Coefficient of ``x^(n-i)`` is
    ``sum_{j,p,q} C(s-p, i-j) C(r-q, i-j) / C(s, i-j) * k^(i-j) * A^j_{p,q}``.
    """
    if (tab.n, tab.s, tab.r) != (dims.n, dims.s, dims.r):
        raise TableError(f"table ({tab.n}, {tab.s}, {tab.r}) does not match {dims}")
    k = Fraction(k)
    n = dims.n
    c = [Fraction(0)] * (n + 1)
    for j, p, q, v in tab.nonzero():
        for i in range(j, n + 1):
            w = _weight(dims.s, dims.r, p, q, i - j)
            if w:
                c[i] += w * k ** (i - j) * v
    return RatPoly([c[n - e] for e in range(n + 1)])


def gram_poly_from_completion(p_plus: RatPoly) -> RatPoly:
    """``det(xI + G)`` to ``det(xI - G)``: ``(-1)^n p(-x)``."""
    n = p_plus.degree
    return p_plus.reflect() * (-1) ** n if n >= 0 else p_plus
