from fractions import Fraction
from math import comb

import numpy as np
import pytest

from biramanujan.builder import (
    BuildError,
    BuildState,
    Candidate,
    assemble_A_plus,
    compare_max_roots,
    construct,
    enumerate_candidates,
    future_fold,
    greedy_step,
    node_gram_poly,
    state_from_text,
    state_to_text,
)
from biramanujan.exact_linalg import RatMatrix, gram_charpoly
from biramanujan.exact_poly import RatPoly, divide_out_root
from biramanujan.oracles import partial_matching_bruteforce
from biramanujan.verify import check_biregular, lambda2_numeric


def test_initial_state_is_canonical_matching():
    st = BuildState.initial(2, 2, 2)
    assert st.completed == (((0, (0, 2)), (1, (1, 3))),)
    assert check_biregular(st.adjacency(), 2, 2, 1)
    assert BuildState.initial(2, 2, 2, canonical_first=False).completed == ()


def test_state_validation():
    with pytest.raises(ValueError):
        BuildState(2, 2, 2, current=((0, (0, 1)), (1, (1, 2))))
    with pytest.raises(ValueError):
        BuildState(2, 2, 2, completed=(((0, (0, 1)),),))
    with pytest.raises(ValueError):
        BuildState(0, 2, 2)


@pytest.mark.parametrize("n, k, want", [(3, 2, 15), (4, 1, 4), (1, 3, 1)])
def test_candidate_counts(n, k, want):
    st = BuildState.initial(n, k, 2)
    assert len(enumerate_candidates(st)) == want == comb(k * st.n, k)


def test_apply_rejects_occupied_vertices():
    st = BuildState.initial(3, 2, 2)
    st = st.apply(Candidate(0, (0, 1)))
    with pytest.raises(BuildError):
        st.apply(Candidate(1, (1, 2)))
    assert st.free_right == (1, 2) and st.free_left == (2, 3, 4, 5)


def test_assemble_A_plus_layout():
    st = BuildState.initial(2, 2, 2).apply(Candidate(0, (0, 1)))
    A = assemble_A_plus(st)
    # free left rows 2,3 first, free right column 1 first
    want = [[1, 1], [2, 0], [0, 2], [1, 1]]
    assert A == RatMatrix.from_rows(want)
    empty = BuildState.initial(2, 2, 2)
    assert assemble_A_plus(empty) == RatMatrix.from_numpy(empty.adjacency())
    opened = assemble_A_plus(empty, open_next=True)
    assert opened == RatMatrix.from_numpy(empty.adjacency()) + RatMatrix.ones(4, 2) * Fraction(1, 2)


def test_node_poly_matches_bruteforce_midway():
    st = BuildState.initial(3, 2, 2).apply(Candidate(0, (0, 4)))
    for cand in enumerate_candidates(st)[:4]:
        child = st.apply(cand)
        brute = partial_matching_bruteforce(_arranged(child), 2, child.l, child.t)
        node = node_gram_poly(child)
        g = divide_out_root(_gram_from_bipartite(brute, 6, 3), 4 * 2)
        assert node == g


def _arranged(state):
    from biramanujan.builder import arranged_adjacency
    return arranged_adjacency(state)


def _gram_from_bipartite(p: RatPoly, m: int, n: int) -> RatPoly:
    coeffs = p.coeffs[m - n:]
    return RatPoly(coeffs[::2])


def test_completed_leaf_is_exact_gram_poly():
    st = BuildState.initial(2, 2, 2)
    st = st.apply(Candidate(0, (0, 1))).apply(Candidate(1, (2, 3)))
    assert st.done
    g = gram_charpoly(RatMatrix.from_numpy(st.adjacency()))
    assert node_gram_poly(st) == divide_out_root(g, 8)


def test_root_node_is_fold_of_claw_polynomials():
    n, k, d = 3, 2, 3
    root = node_gram_poly(BuildState.initial(n, k, d))
    claw = RatPoly.linear_power(k, n - 1)
    assert root == future_fold(claw, n, k, d - 1)
    assert future_fold(claw, n, k, 0) == claw


def test_compare_max_roots():
    p = RatPoly.from_roots([1, 2])
    q = RatPoly.from_roots([Fraction(1, 2), 3])
    assert compare_max_roots(p, q) == -1
    assert compare_max_roots(q, p) == 1
    assert compare_max_roots(p, RatPoly.from_roots([0, 2])) == 0
    assert compare_max_roots(RatPoly([5]), p) == -1
    # equal largest roots with irrational values
    r2 = RatPoly([-2, 0, 1])
    assert compare_max_roots(r2 * RatPoly.from_roots([0]), r2 * RatPoly.from_roots([1])) == 0


def test_greedy_step_picks_minimum_and_never_exceeds_parent():
    st = BuildState.initial(3, 2, 2)
    parent = node_gram_poly(st)
    res = greedy_step(st, parent=parent)
    others = [node_gram_poly(st, c) for c in enumerate_candidates(st)]
    assert res.n_candidates == 15
    assert all(compare_max_roots(res.poly, o) <= 0 for o in others)
    assert compare_max_roots(res.poly, parent) <= 0
    first_best = next(i for i, o in enumerate(others) if compare_max_roots(o, res.poly) == 0)
    assert enumerate_candidates(st)[first_best] == res.candidate


def test_k1_is_an_ordinary_bipartite_graph():
    res = construct(2, 1, 2)
    A = res.adjacency
    assert check_biregular(A, 2, 1, 2)
    assert lambda2_numeric(A) <= 2 + 1e-12


@pytest.mark.parametrize("n, k, d", [(2, 2, 2), (3, 2, 2), (2, 3, 2)])
def test_construction_is_biregular_with_trail(n, k, d):
    res = construct(n, k, d)
    assert check_biregular(res.adjacency, n, k, d)
    assert len(res.trail) == (d - 1) * n
    text = res.trail_text()
    assert text.startswith(f"# construction trail n={n}")
    assert text.count("\nstep ") == (d - 1) * n


def test_construction_independent_of_worker_count():
    a = construct(3, 2, 2, workers=1)
    b = construct(3, 2, 2, workers=2)
    assert np.array_equal(a.adjacency, b.adjacency)
    assert a.trail_text() == b.trail_text()


def test_state_file_round_trip():
    st = BuildState.initial(3, 2, 3).apply(Candidate(0, (1, 5)))
    text = state_to_text(st)
    assert text.splitlines()[0] == "3 2 3"
    assert state_from_text(text) == st


@pytest.mark.parametrize("text", ["", "3 2\n", "2 2 2\nclaw 1 1 1\n", "2 2 2\nclaw 1 5 1 2\n",
                                  "2 2 2\nclaw 1 1 1 2\nclaw 2 1 3 4\nclaw 2 2 1 2\n"])
def test_state_file_errors(text):
    with pytest.raises(ValueError):
        state_from_text(text)
