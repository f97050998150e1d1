"""Batched integer/float kernels for the brute-force oracles.

Each kernel has a numba ``@njit`` version and a pure-numpy fallback. The
numba path is used when numba imports and ``BIRAMANUJAN_DISABLE_NUMBA`` is
unset (or ``0``); pass ``backend="numpy"``/``"numba"`` to force one.

The two integer characteristic-polynomial kernels deliberately use different
algorithms (Berkowitz vs Faddeev-LeVerrier) so they cross-check each other.
"""

from __future__ import annotations

import os
from math import comb, isqrt

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("BIRAMANUJAN_DISABLE_NUMBA", "") in ("", "0")

# int64 headroom kept below 2**63 for intermediate products
_INT_LIMIT = 2**52


def _resolve(backend: str | None) -> str:
    if backend is None:
        return "numba" if USE_NUMBA else "numpy"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    return backend


def charpoly_coeff_bound(n: int, max_abs: int) -> int:
    """Hadamard-type bound on |coefficients| of det(xI - M) for entries <= max_abs."""
    best = 1
    for k in range(1, n + 1):
        # |principal k-minor| <= (max_abs * sqrt(k))**k
        had = (max_abs * max_abs * k) ** k
        best = max(best, comb(n, k) * (isqrt(had) + 1))
    return best


def int_batch_safe(n: int, max_abs: int) -> bool:
    """Whether the int64 kernels are overflow-free for this size (with margin)."""
    return charpoly_coeff_bound(n, max_abs) * max(n, 1) * max(max_abs, 1) < _INT_LIMIT


# -- numpy fallbacks --------------------------------------------------------

def _charpoly_numpy(mats: np.ndarray) -> np.ndarray:
    """Faddeev-LeVerrier over the batch axis; coefficients low degree first."""
    N, n, _ = mats.shape
    out = np.zeros((N, n + 1), dtype=np.int64)
    out[:, n] = 1
    eye = np.eye(n, dtype=np.int64)
    Mk = np.zeros_like(mats)
    for k in range(1, n + 1):
        Mk = np.matmul(mats, Mk) + out[:, n - k + 1, None, None] * eye
        tr = np.trace(np.matmul(mats, Mk), axis1=1, axis2=2)
        q, r = np.divmod(-tr, k)
        if np.any(r):
            raise ArithmeticError("Faddeev-LeVerrier division was not exact")
        out[:, n - k] = q
    return out


def _minors_numpy(Q: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    if rows.shape[1] == 0:
        return np.ones((Q.shape[0], rows.shape[0], cols.shape[0]))
    sub = Q[:, rows[:, None, :, None], cols[None, :, None, :]]
    return np.linalg.det(sub)


# -- numba kernels ----------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _charpoly_numba(mats):
        """Berkowitz (division-free) per matrix; coefficients low degree first."""
        N, n, _ = mats.shape
        out = np.zeros((N, n + 1), dtype=np.int64)
        for b in range(N):
            A = mats[b]
            vec = np.zeros(n + 1, dtype=np.int64)  # highest degree first
            vec[0] = 1
            length = 1
            for r in range(n):
                q = np.zeros(r + 2, dtype=np.int64)
                q[0] = 1
                q[1] = -A[r, r]
                if r > 0:
                    # w = A[:r,:r]^j @ A[:r, r]
                    w = np.empty(r, dtype=np.int64)
                    for i in range(r):
                        w[i] = A[i, r]
                    for j in range(r):
                        s = 0
                        for i in range(r):
                            s += A[r, i] * w[i]
                        q[j + 2] = -s
                        if j + 1 < r:
                            w2 = np.zeros(r, dtype=np.int64)
                            for i in range(r):
                                acc = 0
                                for t in range(r):
                                    acc += A[i, t] * w[t]
                                w2[i] = acc
                            w = w2
                new = np.zeros(n + 1, dtype=np.int64)
                for i in range(r + 2):
                    acc = 0
                    for j in range(length):
                        if i - j >= 0:
                            acc += q[i - j] * vec[j]
                    new[i] = acc
                vec = new
                length = r + 2
            for i in range(n + 1):
                out[b, i] = vec[n - i]
        return out

    @njit(cache=True)
    def _small_det(M):
        n = M.shape[0]
        a = M.copy()
        det = 1.0
        for k in range(n):
            p = k
            best = abs(a[k, k])
            for i in range(k + 1, n):
                if abs(a[i, k]) > best:
                    best = abs(a[i, k])
                    p = i
            if best == 0.0:
                return 0.0
            if p != k:
                for j in range(n):
                    tmp = a[k, j]
                    a[k, j] = a[p, j]
                    a[p, j] = tmp
                det = -det
            det *= a[k, k]
            for i in range(k + 1, n):
                f = a[i, k] / a[k, k]
                for j in range(k, n):
                    a[i, j] -= f * a[k, j]
        return det

    @njit(cache=True)
    def _minors_numba(Q, rows, cols):
        N = Q.shape[0]
        C1, size = rows.shape
        C2 = cols.shape[0]
        out = np.ones((N, C1, C2))
        if size == 0:
            return out
        sub = np.empty((size, size))
        for b in range(N):
            for s in range(C1):
                for t in range(C2):
                    for i in range(size):
                        for j in range(size):
                            sub[i, j] = Q[b, rows[s, i], cols[t, j]]
                    out[b, s, t] = _small_det(sub)
        return out


# -- public entry points ----------------------------------------------------

def charpoly_int_batch(mats, backend: str | None = None) -> np.ndarray:
    """``det(xI - M)`` for a batch of integer matrices ``[N, n, n]``.

    Returns int64 ``[N, n+1]``, lowest degree first. Raises ``OverflowError``
    if the entries are too large for exact int64 arithmetic.
    """
    mats = np.ascontiguousarray(mats, dtype=np.int64)
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise ValueError("expected a [N, n, n] batch")
    n = mats.shape[1]
    max_abs = int(np.abs(mats).max()) if mats.size else 0
    if not int_batch_safe(n, max_abs):
        raise OverflowError(f"int64 charpoly unsafe for n={n}, max|entry|={max_abs}")
    if _resolve(backend) == "numba":
        return _charpoly_numba(mats)
    return _charpoly_numpy(mats)


def batch_minors(Q, rows, cols, backend: str | None = None) -> np.ndarray:
    """All minors ``[Q_b]_{S,T}`` for row sets ``rows[s]`` and column sets ``cols[t]``.

    ``rows``/``cols`` are 0-based ``[C, size]`` index arrays. Output ``[N, C1, C2]``.
    """
    Q = np.ascontiguousarray(Q, dtype=np.float64)
    rows = np.ascontiguousarray(rows, dtype=np.int64).reshape(len(rows), -1)
    cols = np.ascontiguousarray(cols, dtype=np.int64).reshape(len(cols), -1)
    if _resolve(backend) == "numba":
        return _minors_numba(Q, rows, cols)
    return _minors_numpy(Q, rows, cols)
