from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from biramanujan.enclosure import Interval, sqrt_interval, sqrt_lower, sqrt_upper


@given(st.fractions(min_value=0, max_value=10**6, max_denominator=10**4), st.integers(16, 200))
def test_sqrt_bounds_bracket_true_value(x, bits):
    lo, hi = sqrt_lower(x, bits), sqrt_upper(x, bits)
    assert lo * lo <= x <= hi * hi
    assert hi - lo <= Fraction(2, 2**bits)


def test_exact_squares_are_points():
    assert sqrt_interval(Fraction(9, 4)).is_exact
    assert sqrt_interval(Fraction(9, 4)).lo == Fraction(3, 2)
    assert not sqrt_interval(2).is_exact


def test_interval_arithmetic_contains_products():
    a, b = Interval(Fraction(-1), Fraction(2)), Interval(Fraction(3), Fraction(4))
    assert (a * b).lo == -4 and (a * b).hi == 8
    assert a.square().lo == 0 and a.square().hi == 4
    with pytest.raises(ZeroDivisionError):
        b / a


def test_format_against_mpmath():
    mpmath.mp.prec = 200
    iv = sqrt_interval(2, 128) + sqrt_interval(5, 128)
    ref = mpmath.sqrt(2) + mpmath.sqrt(5)
    assert iv.lo <= Fraction(str(mpmath.nstr(ref, 60))) + Fraction(1, 10**50)
    assert abs(float(iv.mid) - float(ref)) < 1e-15
    assert iv.format(10).startswith("3.65028153")
