import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import circulant, kolda_unfold

from l1pk.errors import ShapeError, StructureError
from l1pk.tensor import (circ, circ_inv, circ_pow, fold, fro_norm, hadamard, horizontal_slice,
                         inf_norm, inner, l1_norm, mode_k_product, slab, unfold)

dims_st = st.lists(st.integers(1, 6), min_size=2, max_size=5).map(tuple)
finite = st.floats(-1e3, 1e3, allow_nan=False)


def test_hadamard_examples(rng):
    A = rng.standard_normal((3, 2, 4))
    np.testing.assert_array_equal(hadamard(A, np.zeros_like(A)), 0)
    np.testing.assert_array_equal(hadamard(A, np.ones_like(A)), A)
    got = hadamard(np.array([[1, 2], [3, 4]]), np.array([[2, 0], [1, -1]]))
    np.testing.assert_array_equal(got, [[2, 0], [3, -4]])
    with pytest.raises(ShapeError):
        hadamard(A, A[:2])


def test_norms():
    Z = np.zeros((2, 3))
    assert l1_norm(Z) == fro_norm(Z) == inf_norm(Z) == 0
    v = np.array([3.0, -4.0])
    assert (l1_norm(v), fro_norm(v), inf_norm(v)) == (7.0, 5.0, 4.0)
    with pytest.raises(ShapeError):
        inner(v, np.ones(3))


def test_inner_conjugate_symmetry(rng):
    A = rng.standard_normal((2, 3, 4)) + 1j * rng.standard_normal((2, 3, 4))
    B = rng.standard_normal((2, 3, 4)) + 1j * rng.standard_normal((2, 3, 4))
    assert np.isclose(inner(A, B), np.conj(inner(B, A)))
    assert np.isclose(inner(A, A).real, fro_norm(A) ** 2, rtol=1e-12)
    assert isinstance(inner(A.real, B.real), float)


def test_slices():
    A = np.zeros((3, 2, 2, 2))
    A[0, 0, 0, 0] = 1
    s = horizontal_slice(A, 0)
    assert s.shape == (1, 2, 2, 2) and np.count_nonzero(s) == 1
    np.testing.assert_array_equal(slab(A, range(3)), A)
    with pytest.raises(IndexError):
        horizontal_slice(A, 3)
    for bad in ([], [1, 0], [0, 0], [0, 5]):
        with pytest.raises(IndexError):
            slab(A, bad)


def test_slab_partition_reassembles(rng):
    A = rng.standard_normal((7, 2, 3))
    parts = [[0, 3], [1, 5, 6], [2, 4]]
    stacked = np.concatenate([slab(A, t) for t in parts])
    order = np.concatenate(parts)
    np.testing.assert_array_equal(stacked[np.argsort(order)], A)


def test_unfold_stacks_frontal_slices():
    A = np.arange(8.0).reshape((2, 2, 2), order="F")
    np.testing.assert_array_equal(unfold(A), np.vstack([A[:, :, 0], A[:, :, 1]]))
    with pytest.raises(ShapeError):
        fold(unfold(A), (2, 2, 3))


def test_circ_examples():
    A = np.random.default_rng(0).standard_normal((2, 3, 1))
    np.testing.assert_array_equal(circ(A), A[:, :, 0])
    a, b, c = 1.0, 2.0, 3.0
    got = circ(np.array([a, b, c]).reshape(1, 1, 3))
    np.testing.assert_array_equal(got, [[a, c, b], [b, a, c], [c, b, a]])
    np.testing.assert_array_equal(circ(np.array([a, b, c])), circulant([a, b, c]))


def test_circ_inv_rejects_non_circulant(rng):
    C = circ(rng.standard_normal((2, 2, 3)))
    C[0, -1] += 1e-6
    with pytest.raises(StructureError):
        circ_inv(C, 3)
    with pytest.raises(ShapeError):
        circ_inv(C, 4)


def test_circ_pow(rng):
    A = rng.standard_normal((2, 2, 3, 2))
    C2 = circ_pow(A, 2)
    assert C2.shape == (2 * 2 * 3, 2 * 2 * 3)
    np.testing.assert_array_equal(circ_pow(C2, -2, n_last=[3, 2]), A)
    np.testing.assert_array_equal(circ_pow(A, 0), A)


def test_mode_k_product(rng):
    A = rng.standard_normal((2, 3, 4))
    np.testing.assert_allclose(mode_k_product(A, np.eye(4), 2), A)
    U = rng.standard_normal((4, 4))
    back = mode_k_product(mode_k_product(A, U, 2), np.linalg.inv(U), 2)
    np.testing.assert_allclose(back, A, atol=1e-10)
    B = rng.standard_normal((2, 2, 2))
    V = rng.standard_normal((2, 2))
    got = mode_k_product(B, V, 2)
    np.testing.assert_allclose(kolda_unfold(got, 2), V @ kolda_unfold(B, 2))
    with pytest.raises(ShapeError):
        mode_k_product(A, U, 1)


@settings(max_examples=60, deadline=None)
@given(dims_st.flatmap(lambda d: arrays(np.float64, d, elements=finite)))
def test_fold_circ_roundtrips_bitwise(A):
    np.testing.assert_array_equal(fold(unfold(A), A.shape), A)
    back = circ_inv(circ(A), A.shape[-1])
    if A.ndim == 2:
        # a matrix and an (n1, 1, n2) tensor share the same circ
        back = back[:, 0]
    np.testing.assert_array_equal(back, A)
