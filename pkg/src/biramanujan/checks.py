"""Named oracle checks, shared by the ``oracle`` CLI subcommand and the tests.

Each check returns a :class:`CheckReport`; the first counterexample (if any)
is kept in ``counterexample``. Random instances come from
``numpy.random.default_rng(seed)`` so a report is reproducible from its seed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable

import numpy as np

from .builder import BuildState, arranged_adjacency, enumerate_candidates, expected_gram, node_gram_poly
from .enclosure import sqrt_interval
from .exact_linalg import (
    RatMatrix,
    cauchy_binet,
    charpoly_via_principal_minors,
    claw_matrix,
    det_sum_expansion,
    det_x_plus,
    determinant,
    gram_charpoly,
    minor,
)
from .exact_poly import RatPoly, has_nonnegative_roots, is_real_rooted, max_root, s_transform
from .oracles import (
    PermEnsemble,
    distinct_minor_pairs,
    family_threshold,
    expected_bipartite_charpoly_bruteforce,
    expected_gram_charpoly_signed,
    minor_orthogonality_check,
    partial_matching_bruteforce,
)
from .rect_conv import ConvDims, bipartite_from_reduced, q_transform, ramanujan_bound_squared, rect_conv


@dataclass
class CheckReport:
    name: str
    passed: bool
    cases: int = 0
    detail: str = ""
    counterexample: str | None = None
    seconds: float = 0.0
    extra: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} {self.name}: {self.cases} cases in {self.seconds:.2f}s"
        if self.detail:
            text += f"; {self.detail}"
        if self.counterexample:
            text += f"; first counterexample: {self.counterexample}"
        return text

    def to_dict(self) -> dict:
        return {
            "name": self.name, "passed": self.passed, "cases": self.cases, "detail": self.detail,
            "counterexample": self.counterexample, "seconds": round(self.seconds, 3), **self.extra,
        }


class _Tally:
    def __init__(self):
        self.cases = 0
        self.first: str | None = None

    def record(self, ok: bool, describe: Callable[[], str]) -> None:
        self.cases += 1
        if not ok and self.first is None:
            self.first = describe()


def _rand_int_matrix(rng, rows: int, cols: int, lo: int = -3, hi: int = 3) -> RatMatrix:
    return RatMatrix.from_numpy(rng.integers(lo, hi + 1, size=(rows, cols)))


def _rand_nonneg_poly(rng, degree: int) -> RatPoly:
    roots = [Fraction(int(a), int(b)) for a, b in zip(rng.integers(0, 7, degree), rng.integers(1, 4, degree))]
    return RatPoly.from_roots(roots)


def _fmt(p: RatPoly) -> str:
    return repr(p)


# -- identities of the expected characteristic polynomial -------------------

QUADRATURE_CASES = ((2, 1, 2), (4, 2, 2), (6, 2, 3), (6, 3, 2))


def check_quadrature(cap=None, seed=0, cases=QUADRATURE_CASES) -> CheckReport:
    """Permutation average of two stacked-identity blocks vs the convolution formula."""
    tally = _Tally()
    for m, n, k in cases:
        A = claw_matrix(n, k)
        brute = expected_bipartite_charpoly_bruteforce(A, A, cap)
        red = RatPoly.linear_power(k, n - 1)
        conv = rect_conv(red, red, ConvDims(m - 1, n - 1))
        formula = bipartite_from_reduced(conv, Fraction(4 * k), ConvDims(m, n))
        tally.record(brute == formula, lambda: f"(m,n,k)={(m, n, k)}: brute {_fmt(brute)} vs {_fmt(formula)}")
    return CheckReport("quadrature", tally.first is None, tally.cases, counterexample=tally.first)


CONVOLUTION_SHAPES = ((1, 1), (2, 1), (2, 2), (3, 1), (3, 2))


def check_convolution(cap=None, seed=0, shapes=CONVOLUTION_SHAPES) -> CheckReport:
    """Signed-permutation average of ``gram(A + Q B Rᵀ)`` vs ``⊞`` for every 0/1 pair."""
    tally = _Tally()
    for m, n in shapes:
        dims = ConvDims(m, n)
        mats = [RatMatrix.from_numpy(np.array(bits).reshape(m, n)) for bits in product((0, 1), repeat=m * n)]
        grams = [gram_charpoly(M) for M in mats]
        for (A, ga), (B, gb) in product(zip(mats, grams), repeat=2):
            brute = expected_gram_charpoly_signed(A, B, cap)
            conv = rect_conv(ga, gb, dims)
            tally.record(brute == conv, lambda: f"A={A.to_rows()} B={B.to_rows()}: {_fmt(brute)} vs {_fmt(conv)}")
    return CheckReport("convolution", tally.first is None, tally.cases, counterexample=tally.first)


def golden_states() -> list[BuildState]:
    """Every node of the two golden instances, as states with the current matching open."""
    one_done = BuildState.initial(3, 2, 2)
    states = [one_done.apply(c) for c in enumerate_candidates(one_done)]  # t=1, ℓ=2
    states.append(BuildState.initial(2, 2, 2, canonical_first=False))  # t=0, ℓ=2, A=0
    states.append(BuildState.initial(2, 2, 2))  # t=0, ℓ=2, one matching done
    return states


def check_golden(cap=None, seed=0) -> CheckReport:
    """Closed-form node expectation vs enumeration over placements of the open matching."""
    tally = _Tally()
    for st in golden_states():
        brute = partial_matching_bruteforce(arranged_adjacency(st), st.k, st.l, st.t, cap)
        g, _ = expected_gram(st, open_next=True)
        closed = s_transform(g).shift_degree(st.k * st.n - st.n)
        tally.record(brute == closed, lambda: f"state {st}: brute {_fmt(brute)} vs {_fmt(closed)}")
    return CheckReport("golden", tally.first is None, tally.cases, counterexample=tally.first)


ROOT_BOUND_CASES = ((2, 2, 2), (3, 2, 3), (4, 3, 2))


def check_root_bound(cap=None, seed=0, cases=ROOT_BOUND_CASES, tol=Fraction(1, 2**64)) -> CheckReport:
    """Largest root of the root-node polynomial lies below the squared bound."""
    tally = _Tally()
    rows = []
    for n, k, d in cases:
        p = node_gram_poly(BuildState.initial(n, k, d))
        br = max_root(p, tol)
        enc = ramanujan_bound_squared(k, d)
        ok = br.width <= tol and br.hi < enc.lo
        rows.append(f"(n,k,d)={(n, k, d)} maxroot~{float(br.mid):.10f} < {float(enc.lo):.10f}")
        tally.record(ok, lambda: f"(n,k,d)={(n, k, d)}: bracket ({br.lo}, {br.hi}] vs bound {enc.format()}")
    return CheckReport("root-bound", tally.first is None, tally.cases, "; ".join(rows), tally.first)


# -- appendix identities ----------------------------------------------------

def _random_shapes(rng, count: int, max_dim: int):
    for _ in range(count):
        yield int(rng.integers(1, max_dim + 1))


def check_sumdet(cap=None, seed=0, count=100, max_dim=5) -> CheckReport:
    """``det(A + B)`` from complementary minors vs the determinant."""
    rng = np.random.default_rng(seed)
    tally = _Tally()
    for dim in _random_shapes(rng, count, max_dim):
        A, B = _rand_int_matrix(rng, dim, dim), _rand_int_matrix(rng, dim, dim)
        lhs, rhs = det_sum_expansion(A, B), determinant(A + B)
        tally.record(lhs == rhs, lambda: f"A={A.to_rows()} B={B.to_rows()}: {lhs} vs {rhs}")
    return CheckReport("sumdet", tally.first is None, tally.cases, counterexample=tally.first)


def check_cauchy_binet(cap=None, seed=0, count=100, max_dim=5) -> CheckReport:
    """``[AB]_{S,T} = Σ_U [A]_{S,U}[B]_{U,T}`` on random shapes and index sets."""
    rng = np.random.default_rng(seed)
    tally = _Tally()
    for _ in range(count):
        m, p, q = (int(v) for v in rng.integers(1, max_dim + 1, 3))
        A, B = _rand_int_matrix(rng, m, p), _rand_int_matrix(rng, p, q)
        size = int(rng.integers(0, min(m, q) + 1))
        S = tuple(sorted(int(v) + 1 for v in rng.choice(m, size, replace=False)))
        T = tuple(sorted(int(v) + 1 for v in rng.choice(q, size, replace=False)))
        lhs, rhs = minor(A @ B, S, T), cauchy_binet(A, B, S, T)
        tally.record(lhs == rhs, lambda: f"A={A.to_rows()} B={B.to_rows()} S={S} T={T}: {lhs} vs {rhs}")
    return CheckReport("cauchy-binet", tally.first is None, tally.cases, counterexample=tally.first)


def check_coeff(cap=None, seed=0, count=100, max_dim=5) -> CheckReport:
    """``det(xI + M)`` coefficients are sums of principal minors."""
    rng = np.random.default_rng(seed)
    tally = _Tally()
    for dim in _random_shapes(rng, count, max_dim):
        M = _rand_int_matrix(rng, dim, dim)
        lhs, rhs = charpoly_via_principal_minors(M), det_x_plus(M)
        tally.record(lhs == rhs, lambda: f"M={M.to_rows()}: {_fmt(lhs)} vs {_fmt(rhs)}")
    return CheckReport("coeff", tally.first is None, tally.cases, counterexample=tally.first)


def check_frame_signed(cap=None, seed=0, max_dim=4) -> CheckReport:
    """Minor orthogonality, exactly, for signed permutations of every dimension up to ``max_dim``."""
    tally = _Tally()
    lines = []
    for dim in range(1, max_dim + 1):
        ens = PermEnsemble("signed-permutation", dim, **({} if cap is None else {"cap": cap}))
        for i in range(0, dim + 1):
            for l in range(0, dim + 1):
                rep = minor_orthogonality_check(ens, (i, l))
                tally.record(rep.passed, lambda: f"dim={dim} sizes={(i, l)}: {rep.failures[:1]}")
        lines.append(f"dim {dim} ok")
    return CheckReport("frame-signed", tally.first is None, tally.cases, ", ".join(lines), tally.first)


def check_frame_standard(cap=None, seed=0, max_dim=3) -> CheckReport:
    """Minor orthogonality for the standard representation (float, fully enumerated)."""
    tally = _Tally()
    for dim in range(1, max_dim + 1):
        ens = PermEnsemble("standard-representation", dim, **({} if cap is None else {"cap": cap}))
        for i in range(0, dim + 1):
            for l in range(0, dim + 1):
                rep = minor_orthogonality_check(ens, (i, l))
                tally.record(rep.passed, lambda: f"dim={dim} sizes={(i, l)}: max dev {rep.max_abs_dev}")
    return CheckReport("frame-standard", tally.first is None, tally.cases, counterexample=tally.first)


def check_frame_stiefel(cap=None, seed=0, s=5, r=3, trials=100_000, sigmas=3.0) -> CheckReport:
    """Monte-Carlo minor orthogonality for uniform r-frames in R^s."""
    ens = PermEnsemble("stiefel-mc", s, frame_cols=r, trials=trials, seed=seed)
    pairs = [(i, l) for i in range(1, r + 1) for l in range(i, r + 1)]
    family = sum(distinct_minor_pairs(s, r, i, l) for i, l in pairs)
    tally = _Tally()
    details = []
    for i, l in pairs:
        rep = minor_orthogonality_check(ens, (i, l), sigmas, family=family)
        details.append(f"{(i, l)} max z {rep.max_z:.2f}")
        tally.record(rep.passed, lambda: rep.summary())
    cutoff = family_threshold(sigmas, family)
    return CheckReport("frame-stiefel", tally.first is None, tally.cases,
                       f"s={s} r={r} trials={trials} seed={seed}, {family} statistics, "
                       f"z cutoff {cutoff:.2f}: " + ", ".join(details), tally.first)


# -- convolution properties -------------------------------------------------

def _rand_dims(rng, max_n: int = 4) -> ConvDims:
    n = int(rng.integers(1, max_n + 1))
    return ConvDims(n + int(rng.integers(0, 3)), n)


def check_conv_algebra(cap=None, seed=0, count=50) -> CheckReport:
    """Identity, bilinearity and associativity of ``⊞``, exactly."""
    rng = np.random.default_rng(seed)
    tally = _Tally()
    for _ in range(count):
        dims = _rand_dims(rng)
        p, p2, q, r = (_rand_nonneg_poly(rng, dims.n) for _ in range(4))
        a, b = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4))), Fraction(int(rng.integers(1, 6)), 2)
        if a + b == 0:
            # keep a p + b p2 at full degree
            a += 1
        ident = rect_conv(p, RatPoly.monomial(dims.n), dims)
        tally.record(ident == p, lambda: f"identity {dims}: p={_fmt(p)}")
        # a p + b p2 need not be monic or nonnegative-rooted: skip the root check
        lin = rect_conv(p * a + p2 * b, q, dims, check=False)
        sep = rect_conv(p, q, dims) * a + rect_conv(p2, q, dims) * b
        tally.record(lin == sep, lambda: f"bilinearity {dims}: p={_fmt(p)} p2={_fmt(p2)} q={_fmt(q)}")
        left = rect_conv(rect_conv(p, q, dims), r, dims)
        right = rect_conv(p, rect_conv(q, r, dims), dims)
        tally.record(left == right, lambda: f"associativity {dims}: {_fmt(p)}, {_fmt(q)}, {_fmt(r)}")
    return CheckReport("conv-algebra", tally.first is None, tally.cases, counterexample=tally.first)


def check_real_rooted(cap=None, seed=0, count=50) -> CheckReport:
    """``⊞`` of nonnegative-rooted inputs is real-rooted with nonnegative roots."""
    rng = np.random.default_rng(seed)
    tally = _Tally()
    for _ in range(count):
        dims = _rand_dims(rng, 5)
        p, q = _rand_nonneg_poly(rng, dims.n), _rand_nonneg_poly(rng, dims.n)
        out = rect_conv(p, q, dims)
        ok = is_real_rooted(out) and has_nonnegative_roots(out)
        tally.record(ok, lambda: f"{dims}: {_fmt(p)} ⊞ {_fmt(q)} = {_fmt(out)}")
    return CheckReport("real-rooted", tally.first is None, tally.cases, counterexample=tally.first)


def check_q_inequalities(cap=None, seed=0, count=50, tol=Fraction(1, 2**40)) -> CheckReport:
    """Monotonicity in ``u`` and the subadditivity inequality for ``Q``, up to bracket width.

    With ``w = u²`` as the transform parameter, for ``a = (m-n)² u²``:
    ``sqrt(Q_{p⊞q}² + a) <= sqrt(Q_p² + a) + sqrt(Q_q² + a) - (m+n) u``.
    """
    rng = np.random.default_rng(seed)
    tally = _Tally()
    bits = 96
    for _ in range(count):
        dims = _rand_dims(rng, 4)
        p, q = _rand_nonneg_poly(rng, dims.n), _rand_nonneg_poly(rng, dims.n)
        u = Fraction(int(rng.integers(0, 9)), int(rng.integers(1, 5)))
        u2 = u + Fraction(int(rng.integers(1, 5)), 4)
        pq = rect_conv(p, q, dims)
        bp, bq, bpq = (q_transform(x, dims, u * u, tol) for x in (p, q, pq))
        a = (dims.m - dims.n) ** 2 * u * u
        # largest possible left side vs smallest possible right side
        lhs = sqrt_interval(max(bpq.hi, 0) ** 2 + a, bits)
        rhs = sqrt_interval(max(bp.lo, 0) ** 2 + a, bits) + sqrt_interval(max(bq.lo, 0) ** 2 + a, bits)
        slack = 4 * tol
        ok = lhs.lo <= rhs.hi - (dims.m + dims.n) * u + slack
        tally.record(ok, lambda: f"{dims} u={u}: p={_fmt(p)} q={_fmt(q)}")
        b2 = q_transform(p, dims, u2 * u2, tol)
        tally.record(b2.hi >= bp.lo, lambda: f"monotonicity {dims} u={u}->{u2}: p={_fmt(p)}")
    return CheckReport("q-inequalities", tally.first is None, tally.cases, counterexample=tally.first)


def _tree_children(state: BuildState) -> list[BuildState]:
    return [] if state.done else [state.apply(c) for c in enumerate_candidates(state)]


def check_parent_child(cap=None, seed=0, n=2, k=2, d=2) -> CheckReport:
    """Every node polynomial equals the average of its children's, over the whole tree."""
    tally = _Tally()
    frontier = [BuildState.initial(n, k, d, canonical_first=False)]
    polys = 0
    while frontier:
        nxt = []
        for st in frontier:
            kids = _tree_children(st)
            if not kids:
                continue
            parent = node_gram_poly(st)
            child_polys = [node_gram_poly(c) for c in kids]
            avg = sum(child_polys[1:], child_polys[0]) / len(child_polys)
            tally.record(avg == parent, lambda: f"state {st}: parent {_fmt(parent)} vs average {_fmt(avg)}")
            ok = all(is_real_rooted(p) and has_nonnegative_roots(p) for p in child_polys if p.degree >= 1)
            tally.record(ok, lambda: f"state {st}: a child polynomial is not nonnegative-rooted")
            polys += len(child_polys)
            nxt.extend(kids)
        frontier = nxt
    return CheckReport("parent-child", tally.first is None, tally.cases,
                       f"(n,k,d)={(n, k, d)}, {polys} child polynomials", tally.first)


CHECKS: dict[str, Callable[..., CheckReport]] = {
    "quadrature": check_quadrature,
    "convolution": check_convolution,
    "golden": check_golden,
    "root-bound": check_root_bound,
    "sumdet": check_sumdet,
    "cauchy-binet": check_cauchy_binet,
    "coeff": check_coeff,
    "frame-signed": check_frame_signed,
    "frame-standard": check_frame_standard,
    "frame-stiefel": check_frame_stiefel,
    "conv-algebra": check_conv_algebra,
    "real-rooted": check_real_rooted,
    "q-inequalities": check_q_inequalities,
    "parent-child": check_parent_child,
}


def run_check(name: str, cap=None, seed=0) -> CheckReport:
    if name not in CHECKS:
        raise KeyError(f"unknown check {name!r}; choose from {', '.join(CHECKS)}")
    t0 = time.perf_counter()
    rep = CHECKS[name](cap=cap, seed=seed)
    rep.seconds = time.perf_counter() - t0
    return rep
