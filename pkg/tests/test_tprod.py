import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import circulant

from l1pk.errors import ShapeError
from l1pk.tensor import circ, fro_norm, inner
from l1pk.tprod import (bdiag, classical_tprod, conj_transpose, facewise, identity_tensor,
                        reconstruct, to_slices, tprod, tsvd, tsvd_rank, tsvt)
from l1pk.transforms import make_dct, make_dft, make_identity, make_transform

KINDS = ["identity", "dft", "dft-unitary", "dct"]


def test_facewise_and_bdiag(rng):
    A = rng.standard_normal((2, 3, 2, 2))
    eye = np.broadcast_to(np.eye(3)[:, :, None, None], (3, 3, 2, 2))
    np.testing.assert_allclose(facewise(A, eye), A)
    B = rng.standard_normal((2, 2, 2))
    D = bdiag(B)
    np.testing.assert_array_equal(D, np.block([[B[:, :, 0], np.zeros((2, 2))],
                                               [np.zeros((2, 2)), B[:, :, 1]]]))
    with pytest.raises(ShapeError):
        facewise(A, rng.standard_normal((2, 3, 2, 2)))


@pytest.mark.parametrize("kind", KINDS)
def test_identity_tensor(rng, kind):
    L = make_transform(kind, (3, 2))
    J = identity_tensor(4, (3, 2), L)
    X = rng.standard_normal((4, 2, 3, 2))
    np.testing.assert_allclose(tprod(J, X, L), X, atol=1e-12)
    np.testing.assert_allclose(tprod(J, J, L), J, atol=1e-12)
    np.testing.assert_allclose(conj_transpose(J, L), J, atol=1e-12)


def test_identity_tensor_spatial_forms():
    J = identity_tensor(3, (2, 2), make_identity((2, 2)))
    for s in to_slices(J):
        np.testing.assert_array_equal(s, np.eye(3))
    J = identity_tensor(1, (2,), make_dft((2,)))
    np.testing.assert_allclose(J.ravel(), [1.0, 0.0])


def test_circular_convolution_order3(rng):
    a, x = rng.standard_normal(3), rng.standard_normal(3)
    got = tprod(a.reshape(1, 1, 3), x.reshape(1, 1, 3), make_dft((3,)))
    np.testing.assert_allclose(got.ravel(), circ(a) @ x)


@pytest.mark.parametrize("kind", KINDS)
def test_conj_transpose(rng, kind):
    L = make_transform(kind, (3, 2))
    A = rng.standard_normal((2, 4, 3, 2))
    X = rng.standard_normal((4, 3, 3, 2))
    Y = rng.standard_normal((2, 3, 3, 2))
    np.testing.assert_allclose(conj_transpose(conj_transpose(A, L), L), A, atol=1e-12)
    lhs = inner(tprod(A, X, L), Y)
    rhs = inner(X, tprod(conj_transpose(A, L), Y, L))
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


def test_tprod_shape_errors(rng):
    L = make_dft((3,))
    with pytest.raises(ShapeError):
        tprod(rng.standard_normal((2, 3, 3)), rng.standard_normal((2, 2, 3)), L)
    with pytest.raises(ShapeError):
        tprod(rng.standard_normal((2, 3, 4)), rng.standard_normal((3, 2, 4)), L)


@pytest.mark.parametrize("kind", KINDS)
def test_sqrt_rho_bound(rng, kind):
    L = make_transform(kind, (4, 3))
    for _ in range(50):
        A = rng.standard_normal((3, 2, 4, 3))
        X = rng.standard_normal((2, 5, 4, 3))
        assert fro_norm(tprod(A, X, L)) <= np.sqrt(L.rho) * fro_norm(A) * fro_norm(X) * (1 + 1e-12)


def test_classical_matches_dft(rng):
    for _ in range(20):
        dims = tuple(int(v) for v in rng.integers(1, 5, size=2))
        A = rng.standard_normal((3, 2) + dims)
        X = rng.standard_normal((2, 4) + dims)
        np.testing.assert_allclose(classical_tprod(A, X), tprod(A, X, make_dft(dims)), atol=1e-10)


def test_classical_reductions(rng):
    A, X = rng.standard_normal((3, 2, 1, 1)), rng.standard_normal((2, 4, 1, 1))
    np.testing.assert_allclose(classical_tprod(A, X)[:, :, 0, 0], A[:, :, 0, 0] @ X[:, :, 0, 0])
    A, X = rng.standard_normal((1, 3, 5)), rng.standard_normal((3, 1, 5))
    expected = sum(circulant(A[0, j]) @ X[j, 0] for j in range(3))
    np.testing.assert_allclose(classical_tprod(A, X).ravel(), expected)


def test_tsvd_trivial_cases():
    L = make_dft((3, 2))
    f = tsvd(np.zeros((2, 3, 3, 2)), L)
    np.testing.assert_array_equal(f.S, 0)
    assert tsvd_rank(f) == 0
    J = identity_tensor(3, (3, 2), L)
    f = tsvd(J, L)
    np.testing.assert_allclose(f.S, J, atol=1e-12)
    np.testing.assert_allclose(f.singular_values, 1.0)
    assert tsvd_rank(f) == 3


@pytest.mark.parametrize("kind", KINDS)
def test_tsvd_factors(rng, kind):
    L = make_transform(kind, (4, 3))
    X = rng.standard_normal((5, 3, 4, 3))
    f = tsvd(X, L)
    np.testing.assert_allclose(reconstruct(f.U, f.S, f.V, L), X, atol=1e-10)
    for Q, n in ((f.U, 5), (f.V, 3)):
        np.testing.assert_allclose(tprod(conj_transpose(Q, L), Q, L),
                                   identity_tensor(n, (4, 3), L), atol=1e-10)
    assert np.all(np.diff(f.singular_values, axis=1) <= 0)
    SL = to_slices(L.forward(f.S))
    assert np.count_nonzero(SL[:, ~np.eye(5, 3, dtype=bool)]) == 0
    for Q in (f.U, f.V):
        assert not np.iscomplexobj(Q)


def test_tsvd_gauge(rng):
    L = make_dft((4,))
    f = tsvd(rng.standard_normal((3, 3, 4)), L)
    UL = to_slices(L.forward(f.U))
    for s in UL:
        for col in s.T:
            lead = col[np.argmax(np.abs(col) > 1e-12 * np.abs(col).max())]
            assert abs(lead.imag) < 1e-12 and lead.real >= 0


def test_tsvd_rank_of_rank2_product(rng):
    L = make_dft((3, 2))
    U0 = rng.standard_normal((5, 2, 3, 2))
    V0 = rng.standard_normal((2, 4, 3, 2))
    assert tsvd_rank(tsvd(tprod(U0, V0, L), L), tol=1e-8) == 2


def test_tsvd_rejects_non_finite():
    X = np.zeros((2, 2, 2))
    X[0, 0, 0] = np.nan
    with pytest.raises(np.linalg.LinAlgError):
        tsvd(X, make_dft((2,)))


def test_tsvt_examples(rng):
    L = make_dft((3, 2))
    Z = rng.standard_normal((3, 4, 3, 2))
    np.testing.assert_allclose(tsvt(Z, 0.0, L), Z, atol=1e-8)
    smax = tsvd(Z, L).singular_values.max()
    np.testing.assert_allclose(tsvt(Z, smax, L), 0, atol=1e-12)
    D = np.diag([3.0, 1.0])[:, :, None]
    np.testing.assert_allclose(tsvt(D, 1.0, make_identity((1,))), np.diag([2.0, 0.0])[:, :, None],
                               atol=1e-12)


@pytest.mark.parametrize("kind", KINDS)
def test_tsvt_matches_slicewise_svt(rng, kind):
    L = make_transform(kind, (3, 2))
    Z = rng.standard_normal((4, 3, 3, 2))
    lam = 0.7
    ZL = to_slices(L.forward(Z))
    expected = []
    for s in ZL:
        u, sv, vh = np.linalg.svd(s, full_matrices=False)
        expected.append((u * np.maximum(sv - lam, 0)) @ vh)
    got = to_slices(L.forward(tsvt(Z, lam, L)))
    np.testing.assert_allclose(got, np.array(expected), atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.integers(1, 4),
       st.integers(1, 3), st.sampled_from(KINDS), st.integers(0, 2 ** 32 - 1))
def test_separability_properties(n1, n2, l, n3, n4, kind, seed):
    rng = np.random.default_rng(seed)
    L = make_transform(kind, (n3, n4))
    A = rng.standard_normal((n1, n2, n3, n4))
    X = rng.standard_normal((n2, l, n3, n4))
    C = tprod(A, X, L)
    tol = 1e-9 * max(1.0, fro_norm(C))
    S = sum(tprod(A[:, j:j + 1], X[j:j + 1], L) for j in range(n2))
    assert fro_norm(S - C) <= tol
    for i in range(n1):
        assert fro_norm(tprod(A[i:i + 1], X, L) - C[i:i + 1]) <= tol
    CL = to_slices(L.forward(C))
    assert np.abs(CL - to_slices(L.forward(A)) @ to_slices(L.forward(X))).max() <= tol
