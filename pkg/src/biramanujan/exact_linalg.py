"""Exact rational matrices: determinants, minors, characteristic polynomials.

Index sets for minors are 1-based tuples (``(1, 3)`` selects the first and
third row), everything else is 0-based like normal Python.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from .exact_poly import RatPoly

# subset-enumerating identities are test oracles only
MINOR_SUM_MAX_DIM = 8

IndexSet = tuple[int, ...]


class MatrixError(ValueError):
    """Shape mismatches and out-of-range index sets."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact entries")
    return Fraction(x)


@dataclass(frozen=True)
class RatMatrix:
    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise MatrixError(f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries")

    # -- constructors ------------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RatMatrix":
        rows = [list(r) for r in rows]
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        if any(len(r) != nc for r in rows):
            raise MatrixError("ragged rows")
        return cls(nr, nc, tuple(_frac(x) for r in rows for x in r))

    @classmethod
    def from_numpy(cls, arr) -> "RatMatrix":
        arr = np.asarray(arr)
        if arr.dtype.kind not in "iub":
            raise TypeError("only integer arrays convert exactly")
        return cls.from_rows(arr.astype(object).tolist())

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(n, n, tuple(Fraction(int(i == j)) for i in range(n) for j in range(n)))

    @classmethod
    def ones(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(rows, cols, (Fraction(1),) * (rows * cols))

    # -- access ------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.to_rows()], dtype=float).reshape(
            self.rows, self.cols
        )

    def to_int_array(self) -> np.ndarray:
        if any(x.denominator != 1 for x in self.entries):
            raise MatrixError("matrix has non-integer entries")
        return np.array([int(x) for x in self.entries], dtype=np.int64).reshape(self.rows, self.cols)

    # -- algebra -----------------------------------------------------------
    @property
    def T(self) -> "RatMatrix":
        return RatMatrix(
            self.cols, self.rows,
            tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)),
        )

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise MatrixError(f"shape mismatch {self.shape} vs {other.shape}")
        return RatMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return self + (-other)

    def __mul__(self, c) -> "RatMatrix":
        c = _frac(c)
        return RatMatrix(self.rows, self.cols, tuple(a * c for a in self.entries))

    __rmul__ = __mul__

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise MatrixError(f"cannot multiply {self.shape} by {other.shape}")
        oc = other.cols
        ocols = [other.entries[j::oc] for j in range(oc)]
        out = []
        for i in range(self.rows):
            r = self.row(i)
            nz = [(k, a) for k, a in enumerate(r) if a]
            for j in range(oc):
                col = ocols[j]
                out.append(sum((a * col[k] for k, a in nz), Fraction(0)))
        return RatMatrix(self.rows, oc, tuple(out))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RatMatrix":
        """0-based row/column selection."""
        return RatMatrix(len(rows), len(cols), tuple(self[i, j] for i in rows for j in cols))

    def permuted(self, row_order: Sequence[int], col_order: Sequence[int]) -> "RatMatrix":
        """New matrix whose row ``i`` is old row ``row_order[i]`` (same for columns)."""
        return self.submatrix(row_order, col_order)

    def direct_sum(self, other: "RatMatrix") -> "RatMatrix":
        rows = [list(r) + [Fraction(0)] * other.cols for r in self.to_rows()]
        rows += [[Fraction(0)] * self.cols + list(r) for r in other.to_rows()]
        return RatMatrix.from_rows(rows) if rows else RatMatrix(0, self.cols + other.cols, ())

    def place(self, block: "RatMatrix", top: int = 0, left: int = 0) -> "RatMatrix":
        """Copy with ``block`` added onto the sub-block starting at (top, left)."""
        ent = list(self.entries)
        for i in range(block.rows):
            for j in range(block.cols):
                ent[(top + i) * self.cols + left + j] += block[i, j]
        return RatMatrix(self.rows, self.cols, tuple(ent))

    # -- serialization -----------------------------------------------------
    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols}"]
        for i in range(self.rows):
            lines.append(" ".join(f"{x.numerator}/{x.denominator}" for x in self.row(i)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RatMatrix":
        tokens = text.split()
        if len(tokens) < 2:
            raise MatrixError("missing dims header")
        r, c = int(tokens[0]), int(tokens[1])
        vals = tokens[2:]
        if len(vals) != r * c:
            raise MatrixError(f"expected {r * c} entries, got {len(vals)}")
        return cls(r, c, tuple(Fraction(v) for v in vals))


# -- determinants -----------------------------------------------------------

def _bareiss_int(m: list[list[int]]) -> int:
    n = len(m)
    if n == 0:
        return 1
    m = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        rowk = m[k]
        for i in range(k + 1, n):
            rowi = m[i]
            mik = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (rowi[j] * pivot - mik * rowk[j]) // prev
        prev = pivot
    return sign * m[n - 1][n - 1]


def determinant_rows(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant of a square list-of-rows of rationals."""
    n = len(rows)
    scale = 1
    int_rows = []
    for r in rows:
        if len(r) != n:
            raise MatrixError("determinant of a non-square matrix")
        den = lcm(*(x.denominator for x in r)) if r else 1
        scale *= den
        int_rows.append([int(x * den) for x in r])
    return Fraction(_bareiss_int(int_rows), scale)


def determinant(M: RatMatrix) -> Fraction:
    """Fraction-free (Bareiss) elimination on the row-scaled integer matrix."""
    if not M.is_square:
        raise MatrixError(f"determinant of a non-square {M.shape} matrix")
    return determinant_rows(M.to_rows())


def interpolate(xs: Sequence, ys: Sequence) -> RatPoly:
    """Newton interpolation through the points ``(xs[i], ys[i])``."""
    xs = [Fraction(x) for x in xs]
    coef = [Fraction(y) for y in ys]
    n = len(xs)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    p = RatPoly([coef[-1]]) if n else RatPoly()
    for i in range(n - 2, -1, -1):
        p = p * RatPoly([-xs[i], 1]) + coef[i]
    return p


def charpoly(M: RatMatrix) -> RatPoly:
    """``det(xI - M)`` by evaluation at ``x = 0..n`` and interpolation."""
    if not M.is_square:
        raise MatrixError("characteristic polynomial of a non-square matrix")
    n = M.rows
    base = M.to_rows()
    vals = []
    for x in range(n + 1):
        rows = [[(x if i == j else 0) - base[i][j] for j in range(n)] for i in range(n)]
        vals.append(determinant_rows(rows))
    return interpolate(range(n + 1), vals)


def det_x_plus(M: RatMatrix) -> RatPoly:
    """``det(xI + M)``."""
    return charpoly(-M)


def gram_charpoly(A: RatMatrix) -> RatPoly:
    """``det(xI - AᵀA)``: roots are the squared singular values of ``A``."""
    return charpoly(A.T @ A)


def bipartite_embed(A: RatMatrix) -> RatMatrix:
    """Symmetric ``[[0, A], [Aᵀ, 0]]``."""
    m, n = A.shape
    return RatMatrix.zeros(m, m).direct_sum(RatMatrix.zeros(n, n)).place(A, 0, m).place(A.T, m, 0)


def claw_matrix(n: int, k: int) -> RatMatrix:
    """``k`` stacked copies of ``I_n`` (a ``kn x n`` canonical claw matching)."""
    if n < 0 or k < 1:
        raise MatrixError("need n >= 0, k >= 1")
    return RatMatrix.from_rows([[int(i % n == j) for j in range(n)] for i in range(k * n)]) if n else \
        RatMatrix(0, 0, ())


def claw_block(l: int, t: int, k: int) -> RatMatrix:
    """``kn x n`` matrix with ``claw_matrix(l, k)`` in the top-left and zeros elsewhere."""
    n = l + t
    out = RatMatrix.zeros(k * n, n)
    return out.place(claw_matrix(l, k), 0, 0) if l else out


# -- minors and the appendix identities -------------------------------------

def check_index_set(S: Iterable[int], dim: int) -> IndexSet:
    S = tuple(S)
    if any(b <= a for a, b in zip(S, S[1:])):
        raise MatrixError(f"index set {S} is not strictly increasing")
    if S and (S[0] < 1 or S[-1] > dim):
        raise MatrixError(f"index set {S} out of range 1..{dim}")
    return S


def minor(M: RatMatrix, S: Iterable[int], T: Iterable[int]) -> Fraction:
    """Determinant of the rows ``S`` and columns ``T`` (1-based); empty minor is 1."""
    S = check_index_set(S, M.rows)
    T = check_index_set(T, M.cols)
    if len(S) != len(T):
        raise MatrixError("minor needs |S| = |T|")
    return determinant_rows([[M[i - 1, j - 1] for j in T] for i in S])


def _complement(S: IndexSet, n: int) -> IndexSet:
    s = set(S)
    return tuple(i for i in range(1, n + 1) if i not in s)


def _subsets(n: int, size: int) -> Iterable[IndexSet]:
    return combinations(range(1, n + 1), size)


def det_sum_expansion(A: RatMatrix, B: RatMatrix) -> Fraction:
    """``det(A + B)`` as the signed sum of products of complementary minors."""
    if A.shape != B.shape or not A.is_square:
        raise MatrixError("det_sum_expansion needs two square matrices of one shape")
    n = A.rows
    if n > MINOR_SUM_MAX_DIM:
        raise MatrixError(f"subset expansion capped at dimension {MINOR_SUM_MAX_DIM}")
    total = Fraction(0)
    for size in range(n + 1):
        for S in _subsets(n, size):
            Sc = _complement(S, n)
            for T in _subsets(n, size):
                a = minor(A, S, T)
                if a == 0:
                    continue
                b = minor(B, Sc, _complement(T, n))
                # ||S xor T||_1 has the parity of sum(S) + sum(T)
                sign = -1 if (sum(S) + sum(T)) % 2 else 1
                total += sign * a * b
    return total


def cauchy_binet(A: RatMatrix, B: RatMatrix, S: Iterable[int], T: Iterable[int]) -> Fraction:
    """``[AB]_{S,T}`` as ``sum_U [A]_{S,U} [B]_{U,T}``."""
    if A.cols != B.rows:
        raise MatrixError(f"cannot multiply {A.shape} by {B.shape}")
    S = check_index_set(S, A.rows)
    T = check_index_set(T, B.cols)
    if len(S) != len(T):
        raise MatrixError("cauchy_binet needs |S| = |T|")
    return sum((minor(A, S, U) * minor(B, U, T) for U in _subsets(A.cols, len(S))), Fraction(0))


def charpoly_via_principal_minors(M: RatMatrix) -> RatPoly:
    """``det(xI + M) = sum_k x^(n-k) sum_{|S|=k} [M]_{S,S}``."""
    if not M.is_square:
        raise MatrixError("principal minors need a square matrix")
    n = M.rows
    if n > MINOR_SUM_MAX_DIM:
        raise MatrixError(f"subset expansion capped at dimension {MINOR_SUM_MAX_DIM}")
    coeffs = [Fraction(0)] * (n + 1)
    for size in range(n + 1):
        coeffs[n - size] = sum((minor(M, S, S) for S in _subsets(n, size)), Fraction(0))
    return RatPoly(coeffs)
