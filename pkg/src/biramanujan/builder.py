"""Greedy descent of the interlacing tree of claw-matching unions.

A node of the tree is a :class:`BuildState`: some complete k-claw matchings
plus a partially placed current matching. Its polynomial is the expected
characteristic polynomial of the final graph given the edges placed so far;
it is computed in closed form (theta table + frame expectation for the
current matching, rectangular convolutions for the future ones), and the
descent keeps the child whose largest nontrivial root is smallest.

Vertex ids are 0-based here: left vertices ``0..kn-1``, right ``0..n-1``.
"""

from __future__ import annotations

import logging
from contextlib import ExitStack
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations

import numpy as np

from .exact_linalg import RatMatrix, gram_charpoly
from .exact_poly import DEFAULT_TOL, PolyError, RatPoly, RootBracket, RootFinder, divide_out_root, poly_gcd
from .genfunc import FrameDims, expected_completion, gram_poly_from_completion, theta_hat
from .rect_conv import ConvDims, rect_conv

log = logging.getLogger(__name__)

Claw = tuple[int, tuple[int, ...]]  # (right vertex, sorted k left vertices)


class BuildError(RuntimeError):
    """Internal-consistency failure of the construction pipeline."""


@dataclass(frozen=True)
class Candidate:
    right: int
    lefts: tuple[int, ...]


@dataclass(frozen=True)
class BuildState:
    n: int
    k: int
    d: int
    completed: tuple[tuple[Claw, ...], ...] = ()
    current: tuple[Claw, ...] = ()

    def __post_init__(self):
        if min(self.n, self.k, self.d) < 1:
            raise ValueError("n, k, d must be positive")
        for claws in self.completed + (self.current,):
            lefts = [v for _, ls in claws for v in ls]
            rights = [r for r, _ in claws]
            if len(set(lefts)) != len(lefts) or len(set(rights)) != len(rights):
                raise ValueError("a matching reuses a vertex")
        for claws in self.completed:
            if len(claws) != self.n:
                raise ValueError("completed matching is not full")

    @classmethod
    def initial(cls, n: int, k: int, d: int, canonical_first: bool = True) -> "BuildState":
        """Empty graph, or with the first matching fixed to the canonical one."""
        st = cls(n, k, d)
        if canonical_first:
            first = tuple((j, tuple(j + i * n for i in range(k))) for j in range(n))
            st = replace(st, completed=(first,))
        return st

    @property
    def t(self) -> int:
        return len(self.current)

    @property
    def l(self) -> int:
        return self.n - self.t

    @property
    def done(self) -> bool:
        return len(self.completed) == self.d

    @property
    def free_left(self) -> tuple[int, ...]:
        used = {v for _, ls in self.current for v in ls}
        return tuple(v for v in range(self.k * self.n) if v not in used)

    @property
    def free_right(self) -> tuple[int, ...]:
        used = {r for r, _ in self.current}
        return tuple(v for v in range(self.n) if v not in used)

    def apply(self, cand: Candidate) -> "BuildState":
        if self.done:
            raise BuildError("all matchings already placed")
        if cand.right not in self.free_right or not set(cand.lefts) <= set(self.free_left):
            raise BuildError(f"candidate {cand} uses occupied vertices")
        cur = self.current + ((cand.right, tuple(sorted(cand.lefts))),)
        if len(cur) == self.n:
            return replace(self, completed=self.completed + (tuple(sorted(cur)),), current=())
        return replace(self, current=cur)

    def adjacency(self) -> np.ndarray:
        """``kn x n`` edge-multiplicity matrix of every claw placed so far."""
        A = np.zeros((self.k * self.n, self.n), dtype=np.int64)
        for claws in self.completed + (self.current,):
            for r, ls in claws:
                for v in ls:
                    A[v, r] += 1
        return A


def enumerate_candidates(state: BuildState) -> list[Candidate]:
    """All k-subsets of the free left vertices on the lowest free right vertex."""
    if state.done:
        raise BuildError("matching complete: no candidates")
    right = state.free_right[0]
    return [Candidate(right, c) for c in combinations(state.free_left, state.k)]


def arranged_adjacency(state: BuildState) -> RatMatrix:
    """Adjacency with free left vertices in the first ``kℓ`` rows and free right
    vertices in the first ``ℓ`` columns (each group in increasing order)."""
    A = state.adjacency()
    fl, fr = state.free_left, state.free_right
    rows = list(fl) + [v for v in range(state.k * state.n) if v not in set(fl)]
    cols = list(fr) + [v for v in range(state.n) if v not in set(fr)]
    return RatMatrix.from_numpy(A[np.ix_(rows, cols)])


def assemble_A_plus(state: BuildState, cand: Candidate | None = None, open_next: bool = False) -> RatMatrix:
    """Arranged adjacency plus ``E_ℓ = (1/ℓ) J_{kℓ x ℓ} ⊕ 0``.

    With an empty current matching ``ℓ`` is 0 unless ``open_next`` asks for the
    next matching to be treated as started with no claws (``ℓ = n``).
    """
    if cand is not None:
        state = state.apply(cand)
    A = arranged_adjacency(state)
    l = state.l if (state.current or open_next) else 0
    if l == 0:
        return A
    return A.place(RatMatrix.ones(state.k * l, l) * Fraction(1, l), 0, 0)


def future_fold(p: RatPoly, n: int, k: int, times: int) -> RatPoly:
    """``p ⊞ (x-k)^(n-1) ⊞ ... `` with ``times`` copies, in ``⊞_{kn-1, n-1}``."""
    dims = ConvDims(k * n - 1, n - 1)
    q = RatPoly.linear_power(k, n - 1)
    for _ in range(times):
        p = rect_conv(p, q, dims, check=False)
    return p


def expected_gram(state: BuildState, open_next: bool = False) -> tuple[RatPoly, int]:
    """Expected Gram polynomial of the placed matchings with the current one
    completed at random, and the number of matchings it covers.

    An empty current matching is skipped unless ``open_next`` is set, in which
    case a whole random matching is added through the same closed form.
    """
    if not state.current and not (open_next and not state.done):
        return gram_charpoly(RatMatrix.from_numpy(state.adjacency())), len(state.completed)
    n, k, l, t = state.n, state.k, state.l, state.t
    tab = theta_hat(assemble_A_plus(state, open_next=True), k, l, t)
    g_plus = expected_completion(tab, FrameDims(k * n, n, k * l - 1, l - 1), k)
    return gram_poly_from_completion(g_plus), len(state.completed) + 1


def node_gram_poly(state: BuildState, cand: Candidate | None = None) -> RatPoly:
    """Reduced (degree ``n-1``) expected Gram polynomial of the final graph at this node.

    The full expected bipartite polynomial is ``x^(kn-n) (x² - d²k) S(result)``.
    """
    if cand is not None:
        state = state.apply(cand)
    g, r = expected_gram(state)
    try:
        reduced = divide_out_root(g, r * r * state.k)
    except PolyError as exc:
        raise BuildError(f"trivial root {r * r * state.k} is not exact: {exc}") from exc
    return future_fold(reduced, state.n, state.k, state.d - r)


def full_bipartite_poly(reduced: RatPoly, n: int, k: int, d: int) -> RatPoly:
    from .rect_conv import bipartite_from_reduced

    return bipartite_from_reduced(reduced, Fraction(d * d * k), ConvDims(k * n, n))


# -- candidate selection ----------------------------------------------------

def _finder(p: RatPoly) -> RootFinder | None:
    return RootFinder(p) if p.degree >= 1 else None


def compare_max_roots(p: RatPoly, q: RatPoly, fp: RootFinder | None = None, fq: RootFinder | None = None,
                      tol=DEFAULT_TOL) -> int:
    """Exact sign of ``maxroot(p) - maxroot(q)`` (constants count as -infinity)."""
    if p.degree < 1 or q.degree < 1:
        return (p.degree >= 1) - (q.degree >= 1)
    if p == q:
        return 0
    fp = fp or RootFinder(p)
    fq = fq or RootFinder(q)
    tol = Fraction(tol)
    while True:
        bp, bq = fp.max_root(tol), fq.max_root(tol)
        # brackets are half-open (lo, hi], so touching endpoints still separate the roots
        if bp.hi <= bq.lo:
            return -1
        if bq.hi <= bp.lo:
            return 1
        lo, hi = max(bp.lo, bq.lo), min(bp.hi, bq.hi)
        g = poly_gcd(p, q)
        if g.degree >= 1 and RootFinder(g).count(lo, hi) >= 1:
            # a common root lies in both isolating brackets: it is both largest roots
            return 0
        tol /= 2**16


@dataclass
class StepResult:
    candidate: Candidate
    poly: RatPoly
    bracket: RootBracket | None
    n_candidates: int


def _evaluate(args):
    state, cand = args
    return node_gram_poly(state, cand)


def greedy_step(state: BuildState, workers: int = 1, parent: RatPoly | None = None,
                tol=DEFAULT_TOL, executor: Executor | None = None) -> StepResult:
    """Child with the smallest largest root (ties: first in lexicographic order).

    Candidates are evaluated on ``executor`` when given, else on a temporary
    pool when ``workers > 1``; results are consumed in candidate order, so the
    choice does not depend on scheduling.
    """
    cands = enumerate_candidates(state)
    jobs = [(state, c) for c in cands]
    if executor is not None and len(cands) > 1:
        polys = list(executor.map(_evaluate, jobs, chunksize=8))
    elif workers > 1 and len(cands) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            polys = list(ex.map(_evaluate, jobs, chunksize=8))
    else:
        polys = [_evaluate(j) for j in jobs]
    finders = [_finder(p) for p in polys]
    best = 0
    for i in range(1, len(cands)):
        if compare_max_roots(polys[i], polys[best], finders[i], finders[best], tol) < 0:
            best = i
    f = finders[best]
    bracket = f.max_root(tol) if f else None
    if parent is not None and parent.degree >= 1:
        pf = RootFinder(parent)
        if compare_max_roots(polys[best], parent, f, pf, tol) > 0:
            raise BuildError("no child improves on its parent: interlacing property violated")
    return StepResult(cands[best], polys[best], bracket, len(cands))


@dataclass
class TrailEntry:
    step: int
    matching: int
    right: int
    lefts: tuple[int, ...]
    n_candidates: int
    poly: RatPoly
    bracket: RootBracket | None

    def to_text(self) -> str:
        lefts = ",".join(str(v + 1) for v in self.lefts)
        if self.bracket is None:
            br = "none"
        else:
            b = self.bracket
            br = f"{b.lo.numerator}/{b.lo.denominator} {b.hi.numerator}/{b.hi.denominator} ~{float(b.mid):.12g}"
        coeffs = " ".join(f"{c.numerator}/{c.denominator}" for c in self.poly.coeffs)
        return (f"step {self.step} matching {self.matching} right {self.right + 1} lefts {lefts} "
                f"candidates {self.n_candidates} maxroot {br} poly {coeffs}")


@dataclass
class Construction:
    n: int
    k: int
    d: int
    adjacency: np.ndarray
    root_poly: RatPoly
    trail: list[TrailEntry] = field(default_factory=list)

    def trail_text(self) -> str:
        head = f"# construction trail n={self.n} k={self.k} d={self.d}\n"
        root = " ".join(f"{c.numerator}/{c.denominator}" for c in self.root_poly.coeffs)
        return head + f"root poly {root}\n" + "".join(e.to_text() + "\n" for e in self.trail)


def construct(n: int, k: int, d: int, workers: int = 1, tol=DEFAULT_TOL) -> Construction:
    """Greedy construction of an ``(n, k, d)``-graph.

    The first matching is the canonical one (every choice is isospectral to it);
    each further claw is chosen among ``C(kℓ, k)`` candidates.
    """
    state = BuildState.initial(n, k, d)
    root = node_gram_poly(state)
    parent = root
    out = Construction(n, k, d, state.adjacency(), root)
    step = 0
    with ExitStack() as stack:
        pool = stack.enter_context(ProcessPoolExecutor(max_workers=workers)) if workers > 1 else None
        while not state.done:
            res = greedy_step(state, parent=parent, tol=tol, executor=pool)
            step += 1
            matching = len(state.completed) + 1
            out.trail.append(TrailEntry(step, matching, res.candidate.right, res.candidate.lefts,
                                        res.n_candidates, res.poly, res.bracket))
            log.info("step %d (matching %d): claw %s, maxroot ~ %s", step, matching, res.candidate,
                     float(res.bracket.mid) if res.bracket else None)
            state = state.apply(res.candidate)
            parent = res.poly
    out.adjacency = state.adjacency()
    return out


# -- state files ------------------------------------------------------------

def state_to_text(state: BuildState) -> str:
    """Header ``n k d``, then ``claw <matching> <right> <left>...`` lines, 1-based."""
    lines = [f"{state.n} {state.k} {state.d}"]
    for mi, claws in enumerate(state.completed + ((state.current,) if state.current else ())):
        for r, ls in claws:
            lines.append(f"claw {mi + 1} {r + 1} " + " ".join(str(v + 1) for v in ls))
    return "\n".join(lines) + "\n"


def state_from_text(text: str) -> BuildState:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 3:
        raise ValueError("state file needs an 'n k d' header")
    n, k, d = (int(v) for v in rows[0])
    groups: dict[int, list[Claw]] = {}
    for row in rows[1:]:
        if row[0] != "claw" or len(row) != 3 + k:
            raise ValueError(f"bad claw line: {' '.join(row)}")
        mi, r, *ls = (int(v) for v in row[1:])
        if not (1 <= r <= n and all(1 <= v <= k * n for v in ls)):
            raise ValueError(f"vertex out of range: {' '.join(row)}")
        groups.setdefault(mi, []).append((r - 1, tuple(sorted(v - 1 for v in ls))))
    ordered = [tuple(sorted(groups[i])) for i in sorted(groups)]
    full = [c for c in ordered if len(c) == n]
    partial = [c for c in ordered if len(c) != n]
    if len(partial) > 1 or (partial and ordered[-1] is not partial[0]):
        raise ValueError("only the last matching may be incomplete")
    if len(full) > d:
        raise ValueError("more complete matchings than d")
    return BuildState(n, k, d, tuple(full), partial[0] if partial else ())
