import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize_scalar

from biramanujan.exact_linalg import RatMatrix, claw_matrix
from biramanujan.exact_poly import PolyError, RatPoly, has_nonnegative_roots, is_real_rooted, max_root
from biramanujan.oracles import expected_bipartite_charpoly_bruteforce, expected_gram_charpoly_signed
from biramanujan.rect_conv import (
    BoundParams,
    ConvDims,
    DomainError,
    better_than_ramanujan_check,
    bipartite_from_reduced,
    cor_ok_bound,
    expected_union_gram,
    q_transform,
    qd_poly,
    r_bound,
    ramanujan_bound,
    rect_conv,
    rect_conv_iter,
    shifted_bound,
    shifted_bound_alt,
    u_star,
)

from conftest import nonneg_rooted

dims_strategy = st.integers(1, 4).flatmap(lambda n: st.integers(n, n + 3).map(lambda m: ConvDims(m, n)))


def lin(root, power=1):
    return RatPoly.linear_power(root, power)


def test_conv_examples():
    assert rect_conv(lin(1, 2), lin(1, 2), ConvDims(2, 2)) == RatPoly([3, -4, 1])
    assert rect_conv(lin(2), lin(2), ConvDims(3, 1)) == RatPoly([-4, 1])


def test_conv_example_against_signed_oracle():
    I2 = RatMatrix.identity(2)
    assert expected_gram_charpoly_signed(I2, I2) == rect_conv(lin(1, 2), lin(1, 2), ConvDims(2, 2))


def test_conv_example_against_quadrature_oracle():
    # m=4, n=2 instance of the stacked-identity quadrature, nontrivial factor (x - 4)
    A = claw_matrix(2, 2)
    brute = expected_bipartite_charpoly_bruteforce(A, A)
    red = rect_conv(lin(2), lin(2), ConvDims(3, 1))
    assert red == lin(4)
    assert brute == bipartite_from_reduced(red, Fraction(8), ConvDims(4, 2))
    assert brute == RatPoly([0, 0, 32, 0, -12, 0, 1])


def test_conv_rejects_wrong_degree():
    with pytest.raises(PolyError):
        rect_conv(lin(1, 2), lin(1, 3), ConvDims(3, 2))
    with pytest.raises(DomainError):
        ConvDims(1, 2)


def test_conv_checked_mode_rejects_negative_roots():
    with pytest.raises(PolyError):
        rect_conv(lin(-1, 2), lin(1, 2), ConvDims(2, 2), check=True)


def test_conv_iter_examples():
    p = lin(2)
    dims = ConvDims(3, 1)
    assert rect_conv_iter(p, 1, dims) == p
    assert rect_conv_iter(p, 2, dims) == rect_conv(p, p, dims)
    three = rect_conv_iter(p, 3, dims)
    assert three == rect_conv(rect_conv(p, p, dims), p, dims)
    with pytest.raises(DomainError):
        rect_conv_iter(p, 0, dims)


@given(dims_strategy, st.data())
def test_first_coefficient_is_additive(dims, data):
    p, q = data.draw(nonneg_rooted(dims.n)), data.draw(nonneg_rooted(dims.n))
    # the x^(n-1) coefficient of a monic degree-n polynomial is minus its root sum
    out = rect_conv(p, q, dims)
    assert out.coeff(dims.n - 1) == p.coeff(dims.n - 1) + q.coeff(dims.n - 1)


def test_expected_union_gram_examples():
    dims = ConvDims(4, 2)
    p = lin(2)
    assert expected_union_gram([p], [2], dims) == (p, Fraction(2))
    red, trivial = expected_union_gram([p, p], [2, 2], dims)
    A = claw_matrix(2, 2)
    assert bipartite_from_reduced(red, trivial, dims) == expected_bipartite_charpoly_bruteforce(A, A)
    x = RatPoly.monomial(1)
    assert expected_union_gram([x, x, x], [1, 1, 1], dims)[0] == x
    with pytest.raises(PolyError):
        expected_union_gram([lin(1, 2)], [1], dims)


@given(dims_strategy, st.data())
def test_identity(dims, data):
    p = data.draw(nonneg_rooted(dims.n))
    assert rect_conv(p, RatPoly.monomial(dims.n), dims) == p


@given(dims_strategy, st.data(), st.fractions(-3, 3, max_denominator=3), st.fractions(1, 3, max_denominator=3))
def test_bilinearity(dims, data, a, b):
    p1, p2, q = (data.draw(nonneg_rooted(dims.n)) for _ in range(3))
    if a + b == 0:
        a += 1
    lhs = rect_conv(p1 * a + p2 * b, q, dims, check=False)
    assert lhs == rect_conv(p1, q, dims) * a + rect_conv(p2, q, dims) * b


@given(dims_strategy, st.data())
def test_associativity(dims, data):
    p, q, r = (data.draw(nonneg_rooted(dims.n)) for _ in range(3))
    assert rect_conv(rect_conv(p, q, dims), r, dims) == rect_conv(p, rect_conv(q, r, dims), dims)


@given(dims_strategy, st.data())
def test_outputs_are_real_rooted_and_nonnegative(dims, data):
    p, q = data.draw(nonneg_rooted(dims.n)), data.draw(nonneg_rooted(dims.n))
    out = rect_conv(p, q, dims)
    assert is_real_rooted(out) and has_nonnegative_roots(out)


def test_q_transform_at_zero_is_sqrt_of_max_root():
    p = RatPoly.from_roots([1, 4, 9])
    b = q_transform(p, ConvDims(5, 3), 0)
    assert b.lo < 3 <= b.hi


def test_q_transform_t1_relation():
    th, m, n, u = 2, 4, 2, Fraction(1, 2)
    b = q_transform(lin(th, n), ConvDims(m, n), u * u, Fraction(1, 2**60))
    lhs = math.sqrt(float(b.mid) ** 2 + (m - n) ** 2 * float(u) ** 2)
    assert lhs == pytest.approx(n * float(u) + math.sqrt(th + m * m * float(u) ** 2), abs=1e-12)


@given(dims_strategy, st.data(), st.fractions(0, 3, max_denominator=4), st.fractions(Fraction(1, 8), 2, max_denominator=8))
def test_q_transform_is_monotone(dims, data, u, du):
    p = data.draw(nonneg_rooted(dims.n))
    lo = q_transform(p, dims, u * u, Fraction(1, 2**40))
    hi = q_transform(p, dims, (u + du) ** 2, Fraction(1, 2**40))
    assert hi.hi >= lo.lo


def test_q_subadditivity_samples():
    dims = ConvDims(5, 3)
    p, q = RatPoly.from_roots([0, 1, 5]), RatPoly.from_roots([2, 2, 3])
    pq = rect_conv(p, q, dims)
    for u in (Fraction(0), Fraction(1, 3), Fraction(1), Fraction(5, 2)):
        Q = {name: float(q_transform(x, dims, u * u).mid) for name, x in (("p", p), ("q", q), ("pq", pq))}
        a = (dims.m - dims.n) ** 2 * float(u) ** 2
        lhs = math.sqrt(Q["pq"] ** 2 + a)
        rhs = math.sqrt(Q["p"] ** 2 + a) + math.sqrt(Q["q"] ** 2 + a) - (dims.m + dims.n) * float(u)
        assert lhs <= rhs + 1e-12


def test_q_transform_rejects_negative_u():
    with pytest.raises(DomainError):
        q_transform(lin(1), ConvDims(1, 1), -1)


def test_r_bound_examples():
    dims = ConvDims(4, 2)
    assert 4 * 3 in r_bound(BoundParams(Fraction(3), 2, dims, Fraction(0)))
    assert r_bound(BoundParams(Fraction(4), 2, dims, Fraction(0))).lo == 4 * 4
    th, d, n, u = Fraction(2), 3, 2, Fraction(1, 3)
    got = r_bound(BoundParams(th, d, ConvDims(n, n), u))
    want = (d * mpmath.sqrt(th + n * n * u * u) - d * n * u + 2 * n * u) ** 2
    assert abs(float(got.mid) - float(want)) < 1e-12


def test_r_bound_high_precision_value():
    mpmath.mp.prec = 200
    th, m, n, d, u = 2, 4, 2, 2, mpmath.mpf(1) / 4
    ref = (d * mpmath.sqrt(th + m * m * u * u) - d * m * u + (m + n) * u) ** 2 - (m - n) ** 2 * u * u
    got = r_bound(BoundParams(Fraction(2), 2, ConvDims(4, 2), Fraction(1, 4)), bits=190)
    assert got.lo <= Fraction(mpmath.nstr(ref, 55)) + Fraction(1, 10**50)
    assert got.hi >= Fraction(mpmath.nstr(ref, 55)) - Fraction(1, 10**50)


@pytest.mark.parametrize("theta, m, n, d", [(2, 4, 2, 2), (2, 6, 3, 3), (3, 4, 2, 3), (4, 3, 3, 2)])
def test_r_bound_dominates_convolution_root(theta, m, n, d):
    # the bound is on the largest root of the d-fold convolution, a squared singular value
    top = max_root(rect_conv_iter(lin(theta, n), d, ConvDims(m, n))).hi
    for u in (0, Fraction(1, 10), Fraction(1, 2), 1, 3):
        assert top <= r_bound(BoundParams(Fraction(theta), d, ConvDims(m, n), Fraction(u))).hi


def test_u_star_matches_numeric_minimizer():
    for theta, m, n, d in [(2, 2, 2, 2), (3, 2, 2, 2), (2, 6, 3, 3), (5, 4, 2, 4)]:
        f = lambda u: float(r_bound(BoundParams(Fraction(theta), d, ConvDims(m, n), Fraction(u)), 64).mid)  # noqa: E731
        res = minimize_scalar(f, bounds=(0, 5), method="bounded", options={"xatol": 1e-10})
        assert float(u_star(theta, m, n, d).mid) == pytest.approx(res.x, abs=1e-5)


def test_u_star_grid_and_degenerate():
    theta, m, n, d = 2, 6, 3, 3
    u0 = u_star(theta, m, n, d).mid
    best = r_bound(BoundParams(Fraction(theta), d, ConvDims(m, n), u0)).lo
    for i in range(100):
        u = Fraction(i, 99)
        assert best <= r_bound(BoundParams(Fraction(theta), d, ConvDims(m, n), u)).hi + Fraction(1, 10**30)
    # d = 2, m = n gives v = 1
    assert u_star(2, 3, 3, 2).is_exact and u_star(2, 3, 3, 2).lo == 0
    with pytest.raises(DomainError):
        u_star(Fraction(3, 2), 4, 2, 2)


@pytest.mark.parametrize("theta, m, n, d", [(2, 2, 1, 2), (2, 4, 2, 3), (3, 6, 3, 2), (4, 3, 3, 3), (2, 6, 2, 2)])
def test_r_at_u_star_equals_cor_ok_squared(theta, m, n, d):
    r = r_bound(BoundParams(Fraction(theta), d, ConvDims(m, n), u_star(theta, m, n, d, 200).mid), 200)
    c = cor_ok_bound(theta, m, n, d, 200)
    assert abs(float(r.mid) - float(c.mid) ** 2) < 1e-12


def test_cor_ok_and_ramanujan_examples():
    assert float(ramanujan_bound(2, 3).mid) == pytest.approx(math.sqrt(2) + math.sqrt(5), abs=1e-15)
    assert ramanujan_bound(2, 3).format(6).startswith("3.65028")
    for k, n, d in [(2, 3, 3), (3, 2, 2), (4, 1, 5)]:
        a, b = cor_ok_bound(k, k * n, n, d), ramanujan_bound(k, d)
        assert abs(a.mid - b.mid) < Fraction(1, 2**100)
    for d in (2, 3, 7):
        assert abs(float(ramanujan_bound(1, d).mid) - 2 * math.sqrt(d - 1)) < 1e-14


@pytest.mark.parametrize("theta", [2, 3, 4])
@pytest.mark.parametrize("m, n, d", [(2, 1, 2), (4, 2, 2), (3, 3, 3), (6, 3, 2), (5, 2, 3)])
def test_qd_max_root_below_cor_ok(theta, m, n, d):
    assert max_root(qd_poly(theta, m, n, d)).hi <= cor_ok_bound(theta, m, n, d).lo


def test_better_than_ramanujan():
    assert better_than_ramanujan_check(2, 2, 2)
    for d in range(2, 6):
        assert better_than_ramanujan_check(1, d, 3)
    for k in range(1, 5):
        for d in range(2, 6):
            for n in range(2, 7):
                assert better_than_ramanujan_check(k, d, n)


@pytest.mark.parametrize("k, d, n", [(2, 2, 2), (3, 4, 5), (1, 3, 4)])
def test_shifted_bound_forms_agree(k, d, n):
    assert abs(shifted_bound(k, d, n).mid - shifted_bound_alt(k, d, n).mid) < Fraction(1, 2**100)
