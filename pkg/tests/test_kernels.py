import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from horseshoe import _pykernels, kernels

compiled = pytest.importorskip("horseshoe._kernels")


def _walk(rng, n):
    return np.ascontiguousarray(np.cumsum(rng.normal(0, 0.1, (n, 2)), axis=0))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 400), st.integers(2, 400), st.sampled_from([4, 16, 64]))
def test_segment_crossings_parity(seed, na, nb, chunk):
    rng = np.random.default_rng(seed)
    A, B = _walk(rng, na), _walk(rng, nb)
    ra = [np.asarray(v) for v in compiled.segment_crossings(A, B, chunk)]
    rb = [np.asarray(v) for v in _pykernels.segment_crossings(A, B, chunk)]
    # same crossings; the order within one segment of A may differ
    oa, ob = np.lexsort((ra[1], ra[0])), np.lexsort((rb[1], rb[0]))
    ra, rb = [v[oa] for v in ra], [v[ob] for v in rb]
    np.testing.assert_array_equal(ra[0], rb[0])
    np.testing.assert_array_equal(ra[1], rb[1])
    np.testing.assert_allclose(ra[2], rb[2], rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(ra[3], rb[3], rtol=1e-12, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.booleans(), st.integers(0, 12))
def test_iterate_orbits_parity(seed, inverse, n):
    rng = np.random.default_rng(seed)
    x, y = rng.uniform(-1, 1, 50), rng.uniform(-1, 1, 50)
    a, b = rng.uniform(1.0, 2.5), rng.uniform(0.1, 0.5)
    x1, y1, x2, y2 = x.copy(), y.copy(), x.copy(), y.copy()
    compiled.iterate_orbits(x1, y1, a, b, n, inverse)
    _pykernels.iterate_orbits(x2, y2, a, b, n, inverse)
    # escaping orbits amplify last-bit differences; compare the bounded ones
    ok = (np.abs(x2) < 1e6) & (np.abs(y2) < 1e6)
    np.testing.assert_allclose(x1[ok], x2[ok], rtol=1e-9, atol=1e-9)
    np.testing.assert_allclose(y1[ok], y2[ok], rtol=1e-9, atol=1e-9)
    np.testing.assert_array_equal(np.isfinite(x1), np.isfinite(x2))


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


def test_simple_crossing():
    A = np.array([[0.0, 0.0], [1.0, 1.0]])
    B = np.array([[0.0, 1.0], [1.0, 0.0]])
    i, j, t, u = kernels.segment_crossings(A, B)
    assert list(i) == [0] and list(j) == [0]
    assert t[0] == pytest.approx(0.5) and u[0] == pytest.approx(0.5)
