"""Independent certification of constructed graphs.

The floating-point eigensolver is only advisory. The authority is
:func:`certify_ramanujan`, which works with the exact Gram polynomial of the
integer biadjacency and a rational enclosure of the squared bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .enclosure import DEFAULT_BITS, Interval
from .exact_linalg import RatMatrix, gram_charpoly
from .exact_poly import PolyError, RatPoly, RootFinder, cauchy_bound, divide_out_root
from .rect_conv import ramanujan_bound, ramanujan_bound_squared

MAX_BITS = 1 << 16


class GraphFormatError(ValueError):
    pass


class StructureError(ValueError):
    """The graph does not have the degrees it claims."""


def check_biregular(G, n: int, k: int, d: int) -> bool:
    """Row sums ``d`` and column sums ``k d`` on a ``kn x n`` multiplicity matrix."""
    A = np.asarray(G)
    if A.shape != (k * n, n) or (A.size and A.min() < 0):
        return False
    return bool(np.all(A.sum(axis=1) == d) and np.all(A.sum(axis=0) == k * d))


def bipartite_matrix(G) -> np.ndarray:
    A = np.asarray(G, dtype=float)
    m, n = A.shape
    out = np.zeros((m + n, m + n))
    out[:m, m:] = A
    out[m:, :m] = A.T
    return out


def lambda2_numeric(G) -> float:
    """Second-largest eigenvalue (with multiplicity) of the bipartite embedding."""
    A = np.asarray(G)
    if A.size == 0:
        raise ValueError("empty graph")
    ev = np.linalg.eigvalsh(bipartite_matrix(A))
    return float(ev[-2]) if len(ev) > 1 else float("-inf")


@dataclass(frozen=True)
class SpectralCertificate:
    n: int
    k: int
    d: int
    bound_enclosure: Interval
    gram_poly: RatPoly
    roots_above_bound: int
    precision_bits: int
    lambda2: float

    @property
    def valid(self) -> bool:
        return self.roots_above_bound == 0

    def to_text(self) -> str:
        b = self.bound_enclosure
        coeffs = " ".join(f"{c.numerator}/{c.denominator}" for c in self.gram_poly.coeffs)
        lines = [
            "# spectral certificate",
            f"n {self.n}",
            f"k {self.k}",
            f"d {self.d}",
            f"valid {int(self.valid)}",
            f"bound_squared_lo {b.lo.numerator}/{b.lo.denominator}",
            f"bound_squared_hi {b.hi.numerator}/{b.hi.denominator}",
            f"bound_squared {b.format(20)}",
            f"gram_poly_degree {self.gram_poly.degree}",
            f"gram_poly {coeffs}",
            f"roots_above_bound {self.roots_above_bound}",
            f"precision_bits {self.precision_bits}",
            f"lambda2_numeric {self.lambda2!r}",
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SpectralCertificate":
        f = {}
        for ln in text.splitlines():
            if ln.strip() and not ln.startswith("#"):
                key, _, val = ln.partition(" ")
                f[key] = val.strip()
        coeffs = [Fraction(c) for c in f["gram_poly"].split()]
        return cls(
            int(f["n"]), int(f["k"]), int(f["d"]),
            Interval(Fraction(f["bound_squared_lo"]), Fraction(f["bound_squared_hi"])),
            RatPoly(coeffs), int(f["roots_above_bound"]), int(f["precision_bits"]),
            float(f["lambda2_numeric"]),
        )

    def to_dict(self) -> dict:
        b = self.bound_enclosure
        return {
            "n": self.n, "k": self.k, "d": self.d, "valid": self.valid,
            "bound_squared": [str(b.lo), str(b.hi)],
            "bound": float(ramanujan_bound(self.k, self.d, 64)),
            "gram_poly": [str(c) for c in self.gram_poly.coeffs],
            "roots_above_bound": self.roots_above_bound,
            "precision_bits": self.precision_bits,
            "lambda2_numeric": self.lambda2,
        }


def reduced_gram_poly(G, n: int, k: int, d: int) -> RatPoly:
    """Exact Gram polynomial of the biadjacency with one trivial root ``d²k`` removed."""
    g = gram_charpoly(RatMatrix.from_numpy(np.asarray(G, dtype=np.int64)))
    try:
        return divide_out_root(g, d * d * k)
    except PolyError as exc:
        raise StructureError(f"{d * d * k} is not a root of the Gram polynomial") from exc


def certify_ramanujan(G, n: int, k: int, d: int, bits: int = DEFAULT_BITS) -> SpectralCertificate:
    """Exact check that every nontrivial squared singular value is at most
    ``(sqrt(d-1) + sqrt(kd-1))²``.

    Roots are counted strictly above the upper end of the enclosure. If a root
    falls inside the enclosure the comparison is undecided and the precision is
    doubled.
    """
    if not check_biregular(G, n, k, d):
        raise StructureError(f"graph is not ({n}, {k}, {d})-biregular")
    red = reduced_gram_poly(G, n, k, d)
    lam2 = lambda2_numeric(G)
    top = cauchy_bound(red) if red.degree >= 1 else Fraction(0)
    while True:
        enc = ramanujan_bound_squared(k, d, bits)
        if red.degree < 1:
            return SpectralCertificate(n, k, d, enc, red, 0, bits, lam2)
        rf = RootFinder(red)
        above = rf.count(enc.hi, top) if top > enc.hi else 0
        inside = 0 if enc.is_exact else rf.count(enc.lo, enc.hi)
        if inside == 0 or above > 0:
            return SpectralCertificate(n, k, d, enc, red, above, bits, lam2)
        if bits >= MAX_BITS:
            raise ArithmeticError("bound comparison undecided")
        bits *= 2


# -- graph file format ------------------------------------------------------

def graph_to_text(G, n: int, k: int, d: int) -> str:
    """Header ``n k d`` then ``left right multiplicity`` per edge, 1-based, sorted."""
    A = np.asarray(G)
    lines = [f"{n} {k} {d}"]
    for i, j in zip(*np.nonzero(A)):
        lines.append(f"{i + 1} {j + 1} {int(A[i, j])}")
    return "\n".join(lines) + "\n"


def graph_from_text(text: str, k: int | None = None, d: int | None = None) -> tuple[np.ndarray, int, int, int]:
    """Parse a graph file; ``n`` is re-derived from the edges when the header disagrees."""
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 3:
        raise GraphFormatError("missing 'n k d' header")
    try:
        hn, hk, hd = (int(v) for v in rows[0])
        edges = [tuple(int(v) for v in r) for r in rows[1:]]
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc
    k = hk if k is None else k
    d = hd if d is None else d
    if any(len(e) != 3 or min(e) < 1 for e in edges):
        raise GraphFormatError("edge lines must be 'left right multiplicity' with positive ints")
    if k < 1 or d < 1:
        raise GraphFormatError("k and d must be positive")
    n = max([e[1] for e in edges] + [hn, -(-max([e[0] for e in edges] + [0]) // k)])
    if n < 1:
        raise GraphFormatError("graph has no vertices")
    A = np.zeros((k * n, n), dtype=np.int64)
    for i, j, mult in edges:
        if i > k * n:
            raise GraphFormatError(f"left vertex {i} out of range")
        A[i - 1, j - 1] += mult
    return A, n, k, d
