"""Dense order-m tensor helpers.

Tensors are plain :class:`numpy.ndarray` objects of shape
``(n1, n2, ..., nm)``.  Mode indices are 0-based, so the "last mode" is
axis ``-1`` and the transform modes are axes ``2 .. m-1``.  Whenever a
multi-index has to be flattened (frontal-slice numbering, ``unfold``,
``circ``, the HOT1 payload) the first index varies fastest.
"""

import numpy as np

from .errors import ShapeError, StructureError

CIRC_TOL = 1e-12


def _check_same_shape(A, B):
    if A.shape != B.shape:
        raise ShapeError(f"shape mismatch: {A.shape} vs {B.shape}")


def hadamard(A, B):
    """Elementwise product of two tensors of identical shape."""
    A, B = np.asarray(A), np.asarray(B)
    _check_same_shape(A, B)
    return A * B


def l1_norm(A):
    return float(np.sum(np.abs(A)))


def fro_norm(A):
    return float(np.linalg.norm(np.ravel(A)))


def inf_norm(A):
    A = np.asarray(A)
    return float(np.max(np.abs(A))) if A.size else 0.0


def inner(A, B):
    """Inner product ``sum(a * conj(b))``.

    Returns a float when both operands are real and a complex number
    otherwise.
    """
    A, B = np.asarray(A), np.asarray(B)
    _check_same_shape(A, B)
    val = np.vdot(B.ravel(), A.ravel())
    if np.iscomplexobj(A) or np.iscomplexobj(B):
        return complex(val)
    return float(val.real)


def horizontal_slice(A, i):
    """Return ``A(i, :, ..., :)`` keeping the leading singleton axis."""
    A = np.asarray(A)
    if not 0 <= i < A.shape[0]:
        raise IndexError(f"row {i} out of range for n1={A.shape[0]}")
    return A[i:i + 1]


def slab(A, tau):
    """Return the horizontal slab ``A(tau, :, ..., :)``.

    ``tau`` must be a non-empty, strictly increasing sequence of row
    indices.
    """
    A = np.asarray(A)
    tau = np.asarray(tau, dtype=np.intp).ravel()
    if tau.size == 0:
        raise IndexError("empty index set")
    if np.any(np.diff(tau) <= 0):
        raise IndexError("index set must be strictly increasing")
    if tau[0] < 0 or tau[-1] >= A.shape[0]:
        raise IndexError(f"index set out of range for n1={A.shape[0]}")
    return A[tau]


def unfold(A):
    """Stack the last-mode slices ``A[..., k]`` along mode 1.

    An ``n1 x n2 x ... x nm`` tensor becomes ``(n1*nm) x n2 x ... x n(m-1)``
    with row ``k*n1 + i`` holding ``A[i, ..., k]``.
    """
    A = np.asarray(A)
    if A.ndim < 2:
        raise ShapeError("unfold needs a tensor of order >= 2")
    nm = A.shape[-1]
    return np.moveaxis(A, -1, 0).reshape((nm * A.shape[0],) + A.shape[1:-1])


def fold(X, dims):
    """Inverse of :func:`unfold` for a target shape ``dims``."""
    X = np.asarray(X)
    dims = tuple(int(d) for d in dims)
    if len(dims) < 2:
        raise ShapeError("fold target must have order >= 2")
    n1, nm = dims[0], dims[-1]
    expected = (n1 * nm,) + dims[1:-1]
    if X.shape != expected:
        raise ShapeError(f"cannot fold {X.shape} into {dims}; expected input {expected}")
    return np.moveaxis(X.reshape((nm, n1) + dims[1:-1]), 0, -1)


def _slice_shape(shape):
    # last-mode slices of an order-1 or order-2 tensor are padded to matrices
    s = tuple(shape[:-1])
    return s + (1,) * max(0, 2 - len(s))


def circ(A):
    """Block-circulant arrangement of the last-mode slices.

    Block ``(r, c)`` of the result is the slice ``A[..., (r - c) % nm]``, so
    the first block column lists the slices in order and every further
    column is shifted down by one.  The result has shape
    ``(n1*nm, n2*nm, n3, ..., n(m-1))``.  Order-1 and order-2 inputs are
    treated as having trailing singleton slice axes, so a vector becomes
    an ordinary circulant matrix.
    """
    A = np.asarray(A)
    if A.ndim < 1:
        raise ShapeError("circ needs a tensor of order >= 1")
    nm = A.shape[-1]
    s = _slice_shape(A.shape)
    slices = np.moveaxis(A, -1, 0).reshape((nm,) + s)
    r = np.arange(nm)
    blocks = slices[(r[:, None] - r[None, :]) % nm]  # (r, c, s0, s1, ...)
    blocks = np.moveaxis(blocks, 2, 1)  # (r, s0, c, s1, ...)
    return blocks.reshape((nm * s[0], nm * s[1]) + s[2:])


def circ_inv(C, n_last, tol=CIRC_TOL):
    """Recover ``A`` from ``circ(A)`` given the number of blocks ``n_last``.

    Raises :class:`StructureError` when some block differs from the cyclic
    shift of the first block column by more than ``tol``.  Order-2 inputs
    come back as ``(n1, 1, n_last)``.
    """
    C = np.asarray(C)
    if C.ndim < 2:
        raise ShapeError("circ_inv needs a tensor of order >= 2")
    nm = int(n_last)
    if nm < 1 or C.shape[0] % nm or C.shape[1] % nm:
        raise ShapeError(f"shape {C.shape} is not divisible into {nm} x {nm} blocks")
    s0, s1 = C.shape[0] // nm, C.shape[1] // nm
    rest = C.shape[2:]
    blocks = C.reshape((nm, s0, nm, s1) + rest)
    blocks = np.moveaxis(blocks, 1, 2)  # (r, c, s0, s1, ...)
    first = blocks[:, 0]
    r = np.arange(nm)
    expected = first[(r[:, None] - r[None, :]) % nm]
    if nm > 1 and np.max(np.abs(blocks - expected)) > tol:
        raise StructureError("tensor is not block circulant within tolerance")
    return np.moveaxis(first, 0, -1)


def circ_pow(A, k, n_last=None):
    """Apply :func:`circ` ``k`` times, or :func:`circ_inv` ``-k`` times.

    For negative ``k`` the block counts must be supplied in ``n_last``
    (one per application, outermost first).
    """
    out = np.asarray(A)
    if k >= 0:
        for _ in range(k):
            out = circ(out)
        return out
    if n_last is None or len(n_last) != -k:
        raise ValueError("circ_pow with negative k needs one block count per inversion")
    for nm in n_last:
        out = circ_inv(out, nm)
    return out


def mode_k_product(A, U, axis):
    """Mode product ``A x_axis U`` with a square matrix ``U``.

    ``(A x_k U)[..., i, ...] = sum_j U[i, j] A[..., j, ...]`` along ``axis``
    (0-based).
    """
    A, U = np.asarray(A), np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1] or U.shape[1] != A.shape[axis]:
        raise ShapeError(
            f"matrix of shape {U.shape} does not match mode {axis} of extent {A.shape[axis]}"
        )
    return np.moveaxis(np.tensordot(U, A, axes=(1, axis)), 0, axis)
