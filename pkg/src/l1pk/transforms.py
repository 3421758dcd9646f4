"""Invertible linear transforms applied along modes 3..m.

A transform is a list of square matrices ``U_k``, one per mode from the
third onward.  Every matrix must be a scaled unitary, ``U U* = rho_k I``,
and the transform constant is ``rho = prod(rho_k)``.  The per-mode condition
implies the Kronecker-product condition on the whole transform.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from .errors import RealifyError, ShapeError, TransformError
from .tensor import mode_k_product

RHO_TOL = 1e-10
REALIFY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class LinearTransform:
    """Transform ``A -> A x_3 U_3 x_4 ... x_m U_m`` with constant ``rho``.

    Construct through :func:`make_identity`, :func:`make_dft`,
    :func:`make_dct` or :func:`make_custom` rather than directly.
    """

    mode_matrices: tuple
    mode_inverses: tuple
    rho: float
    kind: str = "custom"
    mode_rhos: tuple = field(default=())

    @property
    def dims(self):
        return tuple(U.shape[0] for U in self.mode_matrices)

    @property
    def preserves_real(self):
        """True when real tensors have real images under ``inverse(forward(.) op)``.

        Holds for the built-in families; custom transforms qualify only
        when all their matrices are real.
        """
        if self.kind in ("identity", "dft", "dft-unitary", "dct"):
            return True
        return not any(np.iscomplexobj(U) for U in self.mode_matrices)

    @property
    def n_slices(self):
        return int(np.prod(self.dims, dtype=np.int64)) if self.dims else 1

    def _check(self, A):
        if tuple(A.shape[2:]) != self.dims:
            raise ShapeError(
                f"tensor higher dims {tuple(A.shape[2:])} do not match transform dims {self.dims}"
            )

    def forward(self, A, fast=True):
        """Apply all mode products with the transform matrices."""
        A = np.asarray(A)
        self._check(A)
        if not self.dims or self.kind == "identity":
            return A
        axes = tuple(range(2, A.ndim))
        if fast and self.kind == "dft":
            return np.fft.fftn(A, axes=axes)
        if fast and self.kind == "dft-unitary":
            return np.fft.fftn(A, axes=axes, norm="ortho")
        out = A
        for ax, U in zip(axes, self.mode_matrices):
            out = mode_k_product(out, U, ax)
        return out

    def inverse(self, A, realify=False, fast=True):
        """Apply all mode products with the inverse matrices.

        With ``realify`` the imaginary part is dropped when its Frobenius
        norm is at most ``1e-8`` times that of the result; otherwise
        :class:`RealifyError` is raised.
        """
        A = np.asarray(A)
        self._check(A)
        if not self.dims or self.kind == "identity":
            out = A
        else:
            axes = tuple(range(2, A.ndim))
            if fast and self.kind == "dft":
                out = np.fft.ifftn(A, axes=axes)
            elif fast and self.kind == "dft-unitary":
                out = np.fft.ifftn(A, axes=axes, norm="ortho")
            else:
                out = A
                for ax, Uinv in zip(axes, self.mode_inverses):
                    out = mode_k_product(out, Uinv, ax)
        return realify_array(out) if realify else out

    def conjugate_pairs(self):
        """Frontal-slice permutation ``j -> conj partner`` for DFT transforms.

        For a real tensor transformed by a DFT, slice ``j`` of the image is
        the complex conjugate of slice ``pairs[j]``.  Slices are numbered
        with the first higher index fastest.  Returns None for other kinds.
        """
        if self.kind not in ("dft", "dft-unitary"):
            return None
        if not self.dims:
            return np.zeros(1, dtype=np.intp)
        grids = np.meshgrid(*[np.arange(n) for n in self.dims], indexing="ij")
        neg = [(-g) % n for g, n in zip(grids, self.dims)]
        flat = np.ravel_multi_index(neg, self.dims, order="F")
        return flat.ravel(order="F")


def realify_array(X, tol=REALIFY_TOL):
    """Drop a negligible imaginary part, raising :class:`RealifyError` otherwise."""
    X = np.asarray(X)
    if not np.iscomplexobj(X):
        return X
    imag = np.linalg.norm(X.imag.ravel())
    total = np.linalg.norm(X.ravel())
    if imag <= tol * total:
        return np.ascontiguousarray(X.real)
    raise RealifyError(f"imaginary residue {imag:.3e} exceeds {tol:g} x {total:.3e}")


def _mode_rho(U, tol=RHO_TOL):
    n = U.shape[0]
    G = U @ U.conj().T
    rho_k = float(np.real(np.trace(G))) / n
    if not rho_k > 0:
        raise TransformError("transform matrix is zero")
    if np.max(np.abs(G - rho_k * np.eye(n))) > tol * max(1.0, rho_k):
        raise TransformError("transform matrix is not a scaled unitary (U U* != rho I)")
    return rho_k


def _validate_matrix(U):
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1] or U.shape[0] < 1:
        raise TransformError(f"transform matrix must be square, got shape {U.shape}")
    if not np.all(np.isfinite(U)):
        raise TransformError("transform matrix has non-finite entries")
    if np.linalg.matrix_rank(U) < U.shape[0]:
        raise TransformError("transform matrix is singular")
    return U


def _build(matrices, kind):
    mats = tuple(_validate_matrix(U) for U in matrices)
    rhos = tuple(_mode_rho(U) for U in mats)
    invs = tuple(U.conj().T / r for U, r in zip(mats, rhos))
    rho = float(np.prod(rhos)) if rhos else 1.0
    return LinearTransform(mats, invs, rho, kind, rhos)


def _check_dims(dims):
    dims = tuple(int(n) for n in dims)
    if any(n < 1 for n in dims):
        raise ValueError(f"transform dims must be positive, got {dims}")
    return dims


def dft_matrix(n, normalized=False):
    k = np.arange(n)
    F = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return F / np.sqrt(n) if normalized else F


def dct_matrix(n):
    """Orthogonal DCT-II matrix (``C @ x == scipy.fft.dct(x, norm='ortho')``)."""
    return scipy.fft.dct(np.eye(n), type=2, norm="ortho", axis=0)


def make_identity(dims):
    dims = _check_dims(dims)
    return _build([np.eye(n) for n in dims], "identity")


def make_dft(dims, normalized=False):
    """DFT along every higher mode; ``rho = prod(dims)`` unless ``normalized``."""
    dims = _check_dims(dims)
    kind = "dft-unitary" if normalized else "dft"
    return _build([dft_matrix(n, normalized) for n in dims], kind)


def make_dct(dims):
    dims = _check_dims(dims)
    return _build([dct_matrix(n) for n in dims], "dct")


def make_custom(matrices):
    """Transform from user matrices, validated as invertible scaled unitaries."""
    return _build(list(matrices), "custom")


def verify_rho(L, tol=RHO_TOL):
    """Recompute ``rho`` from the per-mode conditions, raising if any fails."""
    rho = 1.0
    for U in L.mode_matrices:
        rho *= _mode_rho(U, tol)
    return rho


def make_transform(selector, dims, loader=None):
    """Build a transform from a selector string.

    Selectors are ``identity``, ``dft``, ``dft-unitary``, ``dct`` and
    ``custom:<path>[,<path>...]`` with one HOT1 matrix file per mode.
    ``loader`` reads a path into an array (defaults to the HOT1 reader).
    """
    if selector == "identity":
        return make_identity(dims)
    if selector == "dft":
        return make_dft(dims)
    if selector == "dft-unitary":
        return make_dft(dims, normalized=True)
    if selector == "dct":
        return make_dct(dims)
    if selector.startswith("custom:"):
        if loader is None:
            from .io import read_hot1 as loader
        paths = [p for p in selector[len("custom:"):].split(",") if p]
        L = make_custom([loader(p) for p in paths])
        if L.dims != tuple(dims):
            raise ShapeError(f"custom transform dims {L.dims} do not match {tuple(dims)}")
        return L
    raise ValueError(f"unknown transform selector {selector!r}")


def warn_step_size(t, rho):
    """Warn when the step size violates ``t < 2 / rho``."""
    if t >= 2.0 / rho:
        warnings.warn(
            f"step size t={t:g} is not below 2/rho={2.0 / rho:g}; "
            "convergence guarantees do not apply",
            stacklevel=3,
        )
        return True
    return False
