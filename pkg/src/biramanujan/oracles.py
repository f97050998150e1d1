"""Brute-force and Monte-Carlo reference computations.

Every expectation identity used by the construction has an enumeration
oracle here. Enumerations are exact (integer kernels, rational averages) and
refuse to run past a configurable term cap instead of truncating.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from math import comb, factorial, lcm
from statistics import NormalDist

import numpy as np

from ._kernels import batch_minors, charpoly_int_batch, int_batch_safe
from .exact_linalg import RatMatrix, charpoly, claw_matrix
from .exact_poly import RatPoly

DEFAULT_CAP = int(os.environ.get("BIRAMANUJAN_ENUM_CAP", 10**6))
_CHUNK = 20000


class CapExceeded(RuntimeError):
    """An enumeration would exceed the configured number of terms."""


def _check_cap(terms: int, cap: int | None) -> None:
    cap = DEFAULT_CAP if cap is None else cap
    if terms > cap:
        raise CapExceeded(f"{terms} terms exceeds the enumeration cap {cap}")


# -- ensembles --------------------------------------------------------------

def permutation_array(n: int) -> np.ndarray:
    """All permutations of ``range(n)`` as an ``[n!, n]`` array."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(permutations(range(n))), dtype=np.int64)


def signed_permutations(n: int) -> tuple[np.ndarray, np.ndarray]:
    """``(perms, signs)`` enumerating all ``2^n n!`` signed permutation matrices.

    Matrix ``b`` has entry ``signs[b, i]`` at ``(i, perms[b, i])``.
    """
    perms = permutation_array(n)
    sg = np.array(list(product((1, -1), repeat=n)), dtype=np.int64).reshape(-1, n)
    P = np.repeat(perms, len(sg), axis=0)
    S = np.tile(sg, (len(perms), 1))
    return P, S


def signed_permutation_matrices(n: int) -> np.ndarray:
    P, S = signed_permutations(n)
    out = np.zeros((len(P), n, n), dtype=np.int64)
    b = np.arange(len(P))[:, None]
    out[b, np.arange(n)[None, :], P] = S
    return out


def standard_representation(n: int) -> np.ndarray:
    """Images of all ``(n+1)!`` permutations in an orthonormal basis of ``1^⊥``.

    Float matrices ``[ (n+1)!, n, n ]``.
    """
    perms = permutation_array(n + 1)
    # orthonormal basis of the complement of the all-ones vector
    basis = np.linalg.qr(np.eye(n + 1) - 1.0 / (n + 1))[0][:, :n]
    eye = np.eye(n + 1)
    mats = eye[perms]  # row i of P_b is e_{perm[i]}
    return np.einsum("ia,bij,jc->bac", basis, mats, basis)


def stiefel_sample(s: int, r: int, seed=None, size: int | None = None) -> np.ndarray:
    """Uniform orthonormal ``r``-frame(s) in ``R^s``.

    QR of a standard Gaussian ``s x r`` matrix with the diagonal of ``R`` made
    positive. ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if s < r:
        raise ValueError(f"need s >= r, got s={s}, r={r}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    shape = (s, r) if size is None else (size, s, r)
    G = rng.standard_normal(shape)
    Q, R = np.linalg.qr(G)
    d = np.sign(np.diagonal(R, axis1=-2, axis2=-1))
    d[d == 0] = 1
    return Q * d[..., None, :]


@dataclass(frozen=True)
class PermEnsemble:
    kind: str  # permutation | signed-permutation | standard-representation | stiefel-mc
    dim: int
    frame_cols: int | None = None
    trials: int | None = None
    seed: int | None = None
    cap: int = field(default_factory=lambda: DEFAULT_CAP)

    def __post_init__(self):
        kinds = ("permutation", "signed-permutation", "standard-representation", "stiefel-mc")
        if self.kind not in kinds:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.kind == "stiefel-mc":
            if not self.trials or self.trials < 1 or self.seed is None:
                raise ValueError("stiefel-mc needs trials >= 1 and an explicit seed")
        else:
            _check_cap(self.size, self.cap)

    @property
    def cols(self) -> int:
        return self.dim if self.frame_cols is None else self.frame_cols

    @property
    def exact(self) -> bool:
        return self.kind != "stiefel-mc"

    @property
    def size(self) -> int:
        if self.kind == "permutation":
            return factorial(self.dim)
        if self.kind == "signed-permutation":
            return 2**self.dim * factorial(self.dim)
        if self.kind == "standard-representation":
            return factorial(self.dim + 1)
        return self.trials

    def matrices(self) -> np.ndarray:
        """All ensemble members (or all samples), truncated to ``frame_cols`` columns."""
        if self.kind == "permutation":
            M = np.eye(self.dim, dtype=np.int64)[permutation_array(self.dim)]
        elif self.kind == "signed-permutation":
            M = signed_permutation_matrices(self.dim)
        elif self.kind == "standard-representation":
            M = standard_representation(self.dim)
        else:
            return stiefel_sample(self.dim, self.cols, self.seed, size=self.trials)
        return M[:, :, : self.cols]


# -- helpers ----------------------------------------------------------------

def _common_denominator(*mats: RatMatrix) -> int:
    return lcm(*(x.denominator for M in mats for x in M.entries)) if mats else 1


def _int_array(M: RatMatrix, scale: int) -> np.ndarray:
    return np.array([int(x * scale) for x in M.entries], dtype=object).reshape(M.rows, M.cols)


def _average_charpolys(batches, count: int, scale: int) -> RatPoly:
    """Average of ``det(xI - X/scale)`` given integer batches of ``X``."""
    total = None
    for mats in batches:
        n = mats.shape[1]
        if int_batch_safe(n, int(np.abs(mats).max()) if mats.size else 0):
            cp = charpoly_int_batch(mats.astype(np.int64))
            s = [int(v) for v in cp.astype(object).sum(axis=0)]
        else:
            s = [0] * (n + 1)
            for X in mats:
                c = charpoly(RatMatrix.from_rows(X.tolist())).coeffs
                for i, v in enumerate(c):
                    s[i] += int(v)
        total = s if total is None else [a + b for a, b in zip(total, s)]
    n = len(total) - 1
    # det(xI - Y/D) = D^-n det(D x I - Y): coefficient i picks up D^(i-n)
    return RatPoly([Fraction(total[i], count) * Fraction(scale) ** (i - n) for i in range(n + 1)])


def _offdiag_batch(X: np.ndarray) -> np.ndarray:
    """``[[0, X], [Xᵀ, 0]]`` for a batch ``[N, m, n]``."""
    N, m, n = X.shape
    out = np.zeros((N, m + n, m + n), dtype=X.dtype)
    out[:, :m, m:] = X
    out[:, m:, :m] = np.transpose(X, (0, 2, 1))
    return out


def _chunks(total: int):
    for start in range(0, total, _CHUNK):
        yield start, min(total, start + _CHUNK)


# -- oracles ----------------------------------------------------------------

def expected_bipartite_charpoly_bruteforce(A: RatMatrix, B: RatMatrix, cap: int | None = None) -> RatPoly:
    """Exact average over all ``(P, S)`` of ``χ(offdiag(A) + (P⊕S) offdiag(B) (P⊕S)ᵀ)``."""
    if A.shape != B.shape:
        raise ValueError("A and B must have the same shape")
    m, n = A.shape
    count = factorial(m) * factorial(n)
    _check_cap(count, cap)
    D = _common_denominator(A, B)
    Ai, Bi = _int_array(A, D), _int_array(B, D)
    P, S = permutation_array(m), permutation_array(n)
    pairs = np.array(list(product(range(len(P)), range(len(S)))), dtype=np.int64)

    def batches():
        for a, b in _chunks(len(pairs)):
            pi = P[pairs[a:b, 0]]
            si = S[pairs[a:b, 1]]
            # (P B Sᵀ)[i, j] = B[pi[i], si[j]]
            X = Ai[None] + Bi[pi[:, :, None], si[:, None, :]]
            yield _offdiag_batch(X)

    return _average_charpolys(batches(), count, D)


def expected_gram_charpoly_signed(A: RatMatrix, B: RatMatrix, cap: int | None = None) -> RatPoly:
    """Exact average over signed permutations ``Q, R`` of ``χ((A + Q B Rᵀ)ᵀ(A + Q B Rᵀ))``."""
    if A.shape != B.shape:
        raise ValueError("A and B must have the same shape")
    m, n = A.shape
    count = 2**m * factorial(m) * 2**n * factorial(n)
    _check_cap(count, cap)
    D = _common_denominator(A, B)
    Ai, Bi = _int_array(A, D), _int_array(B, D)
    QP, QS = signed_permutations(m)
    RP, RS = signed_permutations(n)
    pairs = np.array(list(product(range(len(QP)), range(len(RP)))), dtype=np.int64)

    def batches():
        for a, b in _chunks(len(pairs)):
            qi, ri = pairs[a:b, 0], pairs[a:b, 1]
            sign = QS[qi][:, :, None] * RS[ri][:, None, :]
            X = Ai[None] + sign * Bi[QP[qi][:, :, None], RP[ri][:, None, :]]
            Xt = np.transpose(X, (0, 2, 1))
            yield np.einsum("bij,bjk->bik", Xt, X)

    # gram of X/D is (XᵀX)/D²
    return _average_charpolys(batches(), count, D * D)


def partial_matching_bruteforce(A: RatMatrix, k: int, l: int, t: int, cap: int | None = None) -> RatPoly:
    """Exact average over ``P ∈ P_{kℓ}, S ∈ P_ℓ`` of the bipartite characteristic
    polynomial after placing the ``ℓ`` remaining claws on the free block.

    ``A`` is ``kn x n`` with the free left vertices in rows ``0..kℓ-1`` and the
    free right vertices in columns ``0..ℓ-1``.
    """
    n = l + t
    if A.shape != (k * n, n):
        raise ValueError(f"A must be {k * n}x{n}, got {A.shape}")
    count = factorial(k * l) * factorial(l)
    _check_cap(count, cap)
    D = _common_denominator(A)
    Ai = _int_array(A, D)
    if l == 0:
        return _average_charpolys([_offdiag_batch(Ai[None])], 1, D)
    C = _int_array(claw_matrix(l, k), D)
    P, S = permutation_array(k * l), permutation_array(l)
    pairs = np.array(list(product(range(len(P)), range(len(S)))), dtype=np.int64)

    def batches():
        for a, b in _chunks(len(pairs)):
            pi = P[pairs[a:b, 0]]
            si = S[pairs[a:b, 1]]
            X = np.repeat(Ai[None], b - a, axis=0)
            X[:, : k * l, :l] += C[pi[:, :, None], si[:, None, :]]
            yield _offdiag_batch(X)

    return _average_charpolys(batches(), count, D)


@dataclass
class FrameReport:
    passed: bool
    ensemble: str
    sizes: tuple[int, int]
    expected_diag: Fraction
    max_abs_dev: float
    max_z: float | None = None
    failures: list[str] = field(default_factory=list)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        z = f", max z={self.max_z:.2f}" if self.max_z is not None else ""
        return (f"{status} {self.ensemble} sizes={self.sizes} expected 1/{1 / self.expected_diag} "
                f"max|dev|={self.max_abs_dev:.3e}{z}")


def _index_sets(dim: int, size: int) -> list[tuple[int, ...]]:
    return list(combinations(range(dim), size))


def minor_orthogonality_check(ens: PermEnsemble, sizes: tuple[int, int], sigmas: float = 3.0,
                              family: int | None = None) -> FrameReport:
    """Check ``E[[Q]_{S,T}[Q]_{U,V}] = 1{S=U}1{T=V} / C(s, |S|)`` on every index quadruple.

    Exact for enumerable ensembles. For ``stiefel-mc`` every distinct entry is
    z-tested against its target with the per-entry cutoff chosen so the whole
    family has the false-alarm rate of a single ``sigmas``-sigma test. ``family``
    overrides the family size when several calls form one family.
    """
    i, l = sizes
    s, r = ens.dim, ens.cols
    if max(i, l) > r:
        raise ValueError("minor size exceeds the number of frame columns")
    Q = ens.matrices()
    rows_i, cols_i = _index_sets(s, i), _index_sets(r, i)
    rows_l, cols_l = _index_sets(s, l), _index_sets(r, l)
    Mi = batch_minors(Q, np.array(rows_i).reshape(len(rows_i), i), np.array(cols_i).reshape(len(cols_i), i))
    Ml = batch_minors(Q, np.array(rows_l).reshape(len(rows_l), l), np.array(cols_l).reshape(len(cols_l), l))
    N = Q.shape[0]
    target_diag = Fraction(1, comb(s, i))
    failures: list[str] = []

    def target(a, b, c, e) -> Fraction:
        return target_diag if (i == l and a == c and b == e) else Fraction(0)

    if ens.exact and ens.kind != "standard-representation":
        Mi_int = np.rint(Mi).astype(np.int64)
        Ml_int = np.rint(Ml).astype(np.int64)
        sums = np.einsum("nab,ncd->abcd", Mi_int, Ml_int)
        max_dev = 0.0
        for a, b, c, e in np.ndindex(*sums.shape):
            got = Fraction(int(sums[a, b, c, e]), N)
            want = target(a, b, c, e)
            if got != want:
                max_dev = max(max_dev, abs(float(got - want)))
                if len(failures) < 10:
                    failures.append(_describe(rows_i[a], cols_i[b], rows_l[c], cols_l[e], got, want))
        return FrameReport(not failures, ens.kind, sizes, target_diag, max_dev, None, failures)

    # first and second moments without materializing per-sample products
    mean = np.einsum("nab,ncd->abcd", Mi, Ml) / N
    want = np.zeros_like(mean)
    if i == l:
        for a in range(len(rows_i)):
            for b in range(len(cols_i)):
                want[a, b, a, b] = float(target_diag)
    dev = np.abs(mean - want)
    # (S,T,U,V) and (U,V,S,T) are the same statistic when i == l
    distinct = np.ones(mean.shape, dtype=bool)
    if i == l:
        for a, b, c, e in np.ndindex(*mean.shape):
            distinct[a, b, c, e] = (a, b) <= (c, e)
    if ens.exact:
        # float ensemble enumerated in full: exact up to rounding
        bad = dev > 1e-9
        z = None
    else:
        second = np.einsum("nab,ncd->abcd", Mi * Mi, Ml * Ml) / N
        var = np.maximum(second - mean * mean, 0.0) * N / (N - 1)
        sem = np.sqrt(var / N)
        with np.errstate(divide="ignore", invalid="ignore"):
            zs = np.where(sem > 0, dev / sem, np.where(dev > 1e-12, np.inf, 0.0))
        tests = family if family is not None else int(distinct.sum())
        bad = (zs > family_threshold(sigmas, tests)) & distinct
        z = float(zs[distinct].max())
    return FrameReport(not bad.any(), ens.kind, sizes, target_diag, float(dev.max()), z, failures)


def distinct_minor_pairs(s: int, r: int, i: int, l: int) -> int:
    """Number of distinct ``(S,T,U,V)`` statistics for minor sizes ``i <= l``."""
    a, b = comb(s, i) * comb(r, i), comb(s, l) * comb(r, l)
    return a * (a + 1) // 2 if i == l else a * b


def family_threshold(sigmas: float, tests: int) -> float:
    """Per-test z cutoff giving the family the false-alarm rate of one ``sigmas`` test (Šidák)."""
    nd = NormalDist()
    alpha = 2 * (1 - nd.cdf(sigmas))
    per_test = 1 - (1 - alpha) ** (1 / max(tests, 1))
    return nd.inv_cdf(1 - per_test / 2)


def _describe(S, T, U, V, got, want) -> str:
    one = lambda X: tuple(x + 1 for x in X)  # noqa: E731
    return f"S={one(S)} T={one(T)} U={one(U)} V={one(V)}: got {got}, want {want}"


def expected_completion_mc(A: RatMatrix, s: int, r: int, k, trials: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """Monte-Carlo mean and standard error of the coefficients (low degree first) of
    ``det(xI + (A + sqrt(k)(Q⊕0))ᵀ(A + sqrt(k)(Q⊕0)))`` over uniform ``Q ∈ V_r(R^s)``."""
    Af = A.to_numpy()
    m, n = Af.shape
    Q = stiefel_sample(s, r, seed, size=trials)
    X = np.repeat(Af[None], trials, axis=0)
    X[:, :s, :r] += np.sqrt(float(k)) * Q
    G = np.einsum("bji,bjk->bik", X, X)
    # det(xI + G) has coefficients |c_i| of charpoly(-G); use eigenvalues for stability
    ev = np.linalg.eigvalsh(G)
    coeffs = np.empty((trials, n + 1))
    for b in range(trials):
        coeffs[b] = np.poly(-ev[b])[::-1]
    return coeffs.mean(axis=0), coeffs.std(axis=0, ddof=1) / np.sqrt(trials)


# -- exhaustive leaf enumeration (tiny sizes only) --------------------------

def claw_matchings(n: int, k: int) -> list[np.ndarray]:
    """Every k-claw matching as a ``kn``-vector mapping left vertex -> right vertex."""
    out = []

    def rec(left_free: tuple[int, ...], right: int, assign: dict[int, int]):
        if right == n:
            out.append(np.array([assign[v] for v in range(k * n)], dtype=np.int64))
            return
        for group in combinations(left_free, k):
            rest = tuple(v for v in left_free if v not in group)
            for v in group:
                assign[v] = right
            rec(rest, right + 1, assign)
        for v in left_free:
            assign.pop(v, None)

    rec(tuple(range(k * n)), 0, {})
    return out


def matching_matrix(assign: np.ndarray, n: int) -> np.ndarray:
    M = np.zeros((len(assign), n), dtype=np.int64)
    M[np.arange(len(assign)), assign] = 1
    return M
