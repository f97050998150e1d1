import numpy as np
import pytest

from biramanujan import _kernels
from biramanujan._kernels import batch_minors, charpoly_int_batch, int_batch_safe

backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])


@pytest.mark.parametrize("backend", backends)
def test_charpoly_batch_matches_numpy_poly(backend):
    rng = np.random.default_rng(0)
    mats = rng.integers(-3, 4, size=(200, 5, 5))
    got = charpoly_int_batch(mats, backend=backend)
    want = np.rint(np.array([np.poly(M)[::-1] for M in mats])).astype(np.int64)
    assert np.array_equal(got, want)


def test_backends_agree():
    if not _kernels.HAVE_NUMBA:
        pytest.skip("numba not installed")
    rng = np.random.default_rng(1)
    mats = rng.integers(-2, 3, size=(500, 6, 6))
    assert np.array_equal(charpoly_int_batch(mats, "numpy"), charpoly_int_batch(mats, "numba"))
    Q = rng.normal(size=(50, 5, 3))
    rows = np.array([[0, 1], [1, 3], [2, 4]])
    cols = np.array([[0, 1], [0, 2], [1, 2]])
    assert np.allclose(batch_minors(Q, rows, cols, "numpy"), batch_minors(Q, rows, cols, "numba"))


@pytest.mark.parametrize("backend", backends)
def test_minors_against_direct_determinants(backend):
    rng = np.random.default_rng(2)
    Q = rng.normal(size=(10, 4, 4))
    rows, cols = np.array([[0, 2, 3]]), np.array([[1, 2, 3]])
    got = batch_minors(Q, rows, cols, backend)[:, 0, 0]
    assert np.allclose(got, np.linalg.det(Q[:, [0, 2, 3]][:, :, [1, 2, 3]]))
    empty = batch_minors(Q, np.zeros((1, 0)), np.zeros((1, 0)), backend)
    assert np.all(empty == 1)


def test_overflow_guard():
    assert int_batch_safe(6, 3)
    assert not int_batch_safe(12, 10**4)
    with pytest.raises(OverflowError):
        charpoly_int_batch(np.full((1, 12, 12), 10**4))


def test_unknown_backend():
    with pytest.raises(ValueError):
        charpoly_int_batch(np.zeros((1, 2, 2), dtype=np.int64), backend="cuda")
