import os

# precondition checks on in tests (set before the package is imported)
os.environ.setdefault("BIRAMANUJAN_CHECK_INPUTS", "1")
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from biramanujan.exact_poly import RatPoly

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

small_fractions = st.fractions(min_value=-6, max_value=6, max_denominator=4)
nonneg_roots = st.fractions(min_value=0, max_value=6, max_denominator=3)


@st.composite
def rat_polys(draw, max_degree=5):
    coeffs = draw(st.lists(small_fractions, min_size=1, max_size=max_degree + 1))
    return RatPoly(coeffs)


@st.composite
def nonneg_rooted(draw, degree):
    return RatPoly.from_roots(draw(st.lists(nonneg_roots, min_size=degree, max_size=degree)))


@pytest.fixture
def x():
    return RatPoly.x()


def F(a, b=1):
    return Fraction(a, b)


# -- acceptance summary -----------------------------------------------------

ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[num])
