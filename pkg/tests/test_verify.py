from fractions import Fraction

import numpy as np
import pytest

from biramanujan.builder import construct
from biramanujan.verify import (
    GraphFormatError,
    SpectralCertificate,
    StructureError,
    certify_ramanujan,
    check_biregular,
    graph_from_text,
    graph_to_text,
    lambda2_numeric,
    reduced_gram_poly,
)


def claw_graph(n, k, d):
    A = np.zeros((k * n, n), dtype=np.int64)
    for j in range(n):
        for i in range(k):
            A[j + i * n, j] = d
    return A


def test_biregular_examples():
    assert check_biregular(np.ones((4, 2), dtype=int), 2, 2, 2)
    assert check_biregular(claw_graph(3, 2, 2), 3, 2, 2)
    A = claw_graph(2, 2, 2)
    A[0, 0] -= 1
    A[0, 1] += 1
    assert check_biregular(A, 2, 2, 2) is False
    assert not check_biregular(np.ones((3, 2)), 2, 2, 2)


def test_lambda2_examples():
    assert lambda2_numeric(np.ones((4, 2))) == pytest.approx(0, abs=1e-12)
    assert lambda2_numeric(np.ones((2, 2))) == pytest.approx(0, abs=1e-12)
    assert lambda2_numeric(claw_graph(2, 1, 2)) == pytest.approx(2)


def test_certificate_for_complete_graph():
    cert = certify_ramanujan(np.ones((4, 2), dtype=np.int64), 2, 2, 2)
    assert cert.valid and cert.roots_above_bound == 0
    assert cert.gram_poly.degree == 1


def test_disconnected_graph_fails():
    cert = certify_ramanujan(claw_graph(2, 2, 2), 2, 2, 2)
    assert not cert.valid and cert.roots_above_bound == 1


def test_single_matching_fails_when_disconnected():
    A = construct(2, 2, 1).adjacency
    assert not certify_ramanujan(A, 2, 2, 1).valid
    assert certify_ramanujan(np.ones((3, 1), dtype=np.int64), 1, 3, 1).valid


def test_rejects_non_biregular():
    with pytest.raises(StructureError):
        certify_ramanujan(np.ones((4, 2), dtype=np.int64), 2, 2, 3)


def test_trivial_root_is_stripped_exactly():
    A = construct(3, 2, 2).adjacency
    red = reduced_gram_poly(A, 3, 2, 2)
    assert red.degree == 2
    full = reduced_gram_poly(np.ones((4, 2), dtype=np.int64), 2, 2, 2)
    assert full.coeffs == (Fraction(0), Fraction(1))


def test_certificate_text_round_trip():
    cert = certify_ramanujan(construct(3, 2, 2).adjacency, 3, 2, 2)
    back = SpectralCertificate.from_text(cert.to_text())
    assert back == cert
    assert "valid 1" in cert.to_text()
    assert cert.to_dict()["valid"] is True


def test_certificate_stable_under_precision():
    A = construct(3, 2, 3).adjacency
    verdicts = {certify_ramanujan(A, 3, 2, 3, bits).valid for bits in (8, 32, 128, 512)}
    assert verdicts == {True}


def test_graph_file_round_trip():
    A = construct(3, 2, 2).adjacency
    text = graph_to_text(A, 3, 2, 2)
    B, n, k, d = graph_from_text(text)
    assert (n, k, d) == (3, 2, 2)
    assert np.array_equal(A, B)


@pytest.mark.parametrize("text", ["", "1 2\n", "2 2 2\n1 x 1\n", "2 2 2\n0 1 1\n", "2 2 2\n1 1 -1\n"])
def test_graph_file_errors(text):
    with pytest.raises(GraphFormatError):
        graph_from_text(text)
