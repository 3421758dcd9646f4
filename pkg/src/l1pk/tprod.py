"""Transform-based t-product algebra and the t-SVD.

``A *_L X = L^{-1}(L(A) Δ L(X))`` where ``Δ`` multiplies matching frontal
slices.  Frontal slices are numbered with the first higher index fastest.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ShapeError
from .tensor import circ, fold, unfold
from .transforms import LinearTransform, realify_array

GAUGE_TOL = 1e-12


def to_slices(T):
    """``(n1, n2, n3, ..., nm) -> (J, n1, n2)`` batch of frontal slices."""
    T = np.asarray(T)
    n1, n2 = T.shape[:2]
    return np.moveaxis(T.reshape((n1, n2, -1), order="F"), 2, 0)


def from_slices(S, higher):
    """Inverse of :func:`to_slices` for higher dims ``higher``."""
    S = np.asarray(S)
    _, a, b = S.shape
    return np.moveaxis(S, 0, 2).reshape((a, b) + tuple(higher), order="F")


def _finish(out, real_inputs, L):
    if real_inputs and L.preserves_real:
        return realify_array(out)
    return out


def bdiag(A):
    """Block-diagonal matrix with the frontal slices of ``A`` on its diagonal."""
    return scipy.linalg.block_diag(*to_slices(A))


def facewise(A, B):
    """Slice-by-slice matrix product of two tensors with equal higher dims."""
    A, B = np.asarray(A), np.asarray(B)
    if A.ndim != B.ndim or A.shape[1] != B.shape[0] or A.shape[2:] != B.shape[2:]:
        raise ShapeError(f"incompatible frontal shapes {A.shape} and {B.shape}")
    C = np.matmul(np.moveaxis(A, (0, 1), (-2, -1)), np.moveaxis(B, (0, 1), (-2, -1)))
    return np.moveaxis(C, (-2, -1), (0, 1))


def _check_product(A, X):
    if A.ndim < 2 or A.ndim != X.ndim or A.shape[1] != X.shape[0] or A.shape[2:] != X.shape[2:]:
        raise ShapeError(f"cannot form t-product of {A.shape} and {X.shape}")


def tprod(A, X, L: LinearTransform):
    """``A *_L X`` for ``A`` of shape ``(n1, n2, ...)`` and ``X`` of shape ``(n2, l, ...)``."""
    A, X = np.asarray(A), np.asarray(X)
    _check_product(A, X)
    C = facewise(L.forward(A), L.forward(X))
    real = not (np.iscomplexobj(A) or np.iscomplexobj(X))
    return _finish(L.inverse(C), real, L)


def conj_transpose(A, L: LinearTransform):
    """Tensor whose transformed frontal slices are the conjugate transposes of those of ``A``."""
    A = np.asarray(A)
    AL = L.forward(A)
    AhL = np.swapaxes(AL, 0, 1).conj()
    return _finish(L.inverse(AhL), not np.iscomplexobj(A), L)


def identity_tensor(n, higher_dims, L: LinearTransform):
    """Tensor whose transformed frontal slices are all ``I_n``."""
    higher = tuple(higher_dims)
    JL = np.broadcast_to(np.eye(n).reshape((n, n) + (1,) * len(higher)), (n, n) + higher)
    return _finish(L.inverse(np.array(JL)), True, L)


@dataclass(frozen=True, eq=False)
class TsvdFactors:
    """Factors of ``X = U *_L S *_L V*``.

    ``singular_values`` holds the transform-domain singular values as a
    ``(J, min(n1, n2))`` array, descending within each slice.
    """

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray
    transform: LinearTransform
    singular_values: np.ndarray


def _fix_gauge(U, V):
    # rotate each left singular vector so its first nonzero entry is real >= 0
    k = min(U.shape[-1], V.shape[-1])
    mags = np.abs(U)
    thresh = GAUGE_TOL * np.max(mags, axis=-2, keepdims=True)
    first = np.argmax(mags > thresh, axis=-2)  # (J, n1)
    lead = np.take_along_axis(U, first[:, None, :], axis=-2)[:, 0, :]
    absl = np.abs(lead)
    phase = np.where(absl > 0, lead / np.where(absl > 0, absl, 1), 1)
    U = U * phase.conj()[:, None, :]
    V = V.copy()
    V[..., :k] = V[..., :k] * phase.conj()[:, None, :k]
    return U, V


def slice_svd(XL, L, real_input, full_matrices=True):
    """Batched SVD of the transformed frontal slices of ``XL``.

    Returns ``(U, s, V)`` with ``U`` of shape ``(J, n1, n1)`` (or reduced),
    ``s`` of shape ``(J, k)`` and ``V`` of shape ``(J, n2, n2)`` such that
    each slice equals ``U diag(s) V^H``.  For real inputs under a DFT the
    factors of conjugate-paired slices are conjugates of each other, so the
    spatial factors come out real.
    """
    slices = to_slices(XL)
    pairs = L.conjugate_pairs() if real_input else None
    J, n1, n2 = slices.shape
    if pairs is None:
        return _svd(slices, full_matrices)
    j = np.arange(J)
    selfp = j == pairs
    lead = j < pairs
    k = min(n1, n2)
    ku, kv = (n1, n2) if full_matrices else (k, k)
    U = np.empty((J, n1, ku), dtype=complex)
    V = np.empty((J, n2, kv), dtype=complex)
    s = np.empty((J, k))
    # self-conjugate slices are real, so keep their factors real
    U[selfp], s[selfp], V[selfp] = _svd(slices[selfp].real, full_matrices)
    if np.any(lead):
        U[lead], s[lead], V[lead] = _svd(slices[lead], full_matrices)
        follow = j > pairs
        U[follow] = U[pairs[follow]].conj()
        V[follow] = V[pairs[follow]].conj()
        s[follow] = s[pairs[follow]]
    return U, s, V


def _svd(slices, full_matrices):
    U, s, Vh = np.linalg.svd(slices, full_matrices=full_matrices)
    V = np.swapaxes(Vh, -1, -2).conj()
    U, V = _fix_gauge(U, V)
    return U, s, V


def tsvd(X, L: LinearTransform):
    """Full t-SVD ``X = U *_L S *_L V*`` with slice-wise descending singular values."""
    X = np.asarray(X)
    if X.ndim < 2:
        raise ShapeError("tsvd needs a tensor of order >= 2")
    if not np.all(np.isfinite(X)):
        raise np.linalg.LinAlgError("tsvd of a tensor with non-finite entries")
    higher = X.shape[2:]
    real = not np.iscomplexobj(X)
    n1, n2 = X.shape[:2]
    U, s, V = slice_svd(L.forward(X), L, real)
    k = s.shape[1]
    SL = np.zeros((s.shape[0], n1, n2), dtype=s.dtype)
    SL[:, np.arange(k), np.arange(k)] = s
    Ut = _finish(L.inverse(from_slices(U, higher)), real, L)
    St = _finish(L.inverse(from_slices(SL, higher)), real, L)
    Vt = _finish(L.inverse(from_slices(V, higher)), real, L)
    return TsvdFactors(Ut, St, Vt, L, s)


def tsvd_rank(factors: TsvdFactors, tol=1e-8):
    """Number of diagonal tubes ``S(i, i, :, ..., :)`` with norm above ``tol``."""
    S = factors.S
    k = min(S.shape[:2])
    tubes = S[np.arange(k), np.arange(k)]
    norms = np.linalg.norm(tubes.reshape(k, -1), axis=1)
    return int(np.sum(norms > tol))


def reconstruct(U, S, V, L):
    """``U *_L S *_L V*``."""
    return tprod(tprod(U, S, L), conj_transpose(V, L), L)


def tsvt(Z, lam, L: LinearTransform):
    """Soft-threshold the transform-domain singular values of ``Z`` by ``lam``."""
    if lam < 0:
        raise ValueError("threshold must be nonnegative")
    Z = np.asarray(Z)
    real = not np.iscomplexobj(Z)
    U, s, V = slice_svd(L.forward(Z), L, real, full_matrices=False)
    shrunk = np.maximum(s - lam, 0.0)
    XL = np.matmul(U * shrunk[:, None, :], np.swapaxes(V, -1, -2).conj())
    return _finish(L.inverse(from_slices(XL, Z.shape[2:])), real, L)


def classical_tprod(A, X):
    """Circulant t-product ``fold(circ(A) * unfold(X))`` applied recursively.

    Order-2 operands reduce to a matrix product.  This route never touches
    a Fourier transform, so it can check :func:`tprod` under the
    unnormalized DFT.
    """
    A, X = np.asarray(A), np.asarray(X)
    _check_product(A, X)
    if A.ndim == 2:
        return A @ X
    C = classical_tprod(circ(A), unfold(X))
    return fold(C, (A.shape[0], X.shape[1]) + A.shape[2:])
