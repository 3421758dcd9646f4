"""Problem generators, imaging operators and recovery metrics."""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .solvers import RecoveryProblem
from .tensor import circ_inv, fro_norm, inf_norm
from .tprod import identity_tensor, tprod
from .transforms import make_identity


@dataclass(frozen=True)
class SyntheticSpec:
    """Shape and structure of a random consistent problem.

    ``a_dims`` is ``(n1, n2, n3, ..., nm)`` and ``l`` the second dimension
    of the unknown ``X`` (shape ``(n2, l, n3, ..., nm)``).
    """

    a_dims: tuple
    l: int
    density: float = 1.0
    rank: int = 1
    seed: int = 0

    def __post_init__(self):
        if len(self.a_dims) < 2 or any(d < 1 for d in self.a_dims):
            raise ValueError(f"invalid operator dims {self.a_dims}")
        if not 0 < self.density <= 1:
            raise ValueError("density must lie in (0, 1]")
        if not 1 <= self.rank <= min(self.a_dims[1], self.l):
            raise ValueError("rank must lie in [1, min(n2, l)]")

    @property
    def x_dims(self):
        return (self.a_dims[1], self.l) + tuple(self.a_dims[2:])


def gen_sparse_problem(spec: SyntheticSpec, L):
    """Gaussian ``A`` and a ground truth whose entries survive with probability ``density``."""
    rng = np.random.default_rng(spec.seed)
    A = rng.standard_normal(spec.a_dims)
    X = rng.standard_normal(spec.x_dims)
    X = X * (rng.random(spec.x_dims) < spec.density)
    return RecoveryProblem(A, tprod(A, X, L), L, "sparse", X)


def gen_lowrank_problem(spec: SyntheticSpec, L):
    """Ground truth ``G1 *_L G2`` with inner dimension ``rank``."""
    rng = np.random.default_rng(spec.seed)
    A = rng.standard_normal(spec.a_dims)
    n2, l = spec.x_dims[:2]
    higher = tuple(spec.a_dims[2:])
    G1 = rng.standard_normal((n2, spec.rank) + higher)
    G2 = rng.standard_normal((spec.rank, l) + higher)
    X = tprod(G1, G2, L)
    return RecoveryProblem(A, tprod(A, X, L), L, "lowrank", X)


def lowrank_stack(dims, rank, L, seed=0):
    """Random image stack of shape ``dims`` with t-SVD rank at most ``rank``."""
    rng = np.random.default_rng(seed)
    G1 = rng.standard_normal((dims[0], rank) + tuple(dims[2:]))
    G2 = rng.standard_normal((rank, dims[1]) + tuple(dims[2:]))
    return tprod(G1, G2, L)


def stripe_rows(n_rows, period):
    """0-based indices of rows whose 1-based number is a multiple of ``period``."""
    if period < 2:
        raise ValueError("stripe period must be at least 2")
    if period > n_rows:
        warnings.warn(f"stripe period {period} exceeds row count {n_rows}; no stripes")
    return np.arange(period - 1, n_rows, period)


def build_destripe_operator(image_dims, stripe_period, attenuation=0.01, L=None):
    """Facewise-diagonal operator attenuating every ``stripe_period``-th row.

    ``image_dims`` is the shape of the image stack ``(rows, cols, n3, ...)``.
    The operator is ``diag(d) x_1 J`` where ``J`` is the identity tensor of
    ``L``, so ``A *_L X`` scales row ``i`` of every frontal slice of ``X`` by
    ``d[i]``.  Every frontal slice of the result is diagonal.
    """
    if not 0 < attenuation <= 1:
        raise ValueError("attenuation must lie in (0, 1]")
    rows = int(image_dims[0])
    higher = tuple(image_dims[2:])
    if L is None:
        L = make_identity(higher)
    d = np.ones(rows)
    d[stripe_rows(rows, stripe_period)] = attenuation
    J = identity_tensor(rows, higher, L)
    return d.reshape((rows, 1) + (1,) * len(higher)) * J


def destripe_problem(X, stripe_period=5, attenuation=0.01, L=None):
    """Recovery problem for a striped observation of the stack ``X``."""
    X = np.asarray(X)
    if L is None:
        L = make_identity(X.shape[2:])
    A = build_destripe_operator(X.shape, stripe_period, attenuation, L)
    return RecoveryProblem(A, tprod(A, X, L), L, "lowrank", X)


@dataclass(frozen=True, eq=False)
class Psf:
    """2-D point spread function ``H`` of shape ``(m2, n2)``."""

    H: np.ndarray

    def __post_init__(self):
        H = np.asarray(self.H, dtype=float)
        if H.ndim != 2 or not np.all(np.isfinite(H)) or not np.any(H):
            raise ValueError("PSF must be a finite, nonzero 2-D array")
        object.__setattr__(self, "H", H)

    def padded_sizes(self, n1, m1):
        """Full-convolution sizes ``(n, m) = (n1 + n2 - 1, m1 + m2 - 1)``."""
        m2, n2 = self.H.shape
        return n1 + n2 - 1, m1 + m2 - 1


def psf_gaussian(size=5, sigma=1.0):
    """Centered Gaussian kernel ``exp(-(x^2 + y^2) / (2 sigma^2))`` summing to one."""
    if size < 1 or size % 2 == 0:
        raise ValueError("Gaussian kernel size must be odd and positive")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    x = np.arange(size) - size // 2
    H = np.exp(-(x[:, None] ** 2 + x[None, :] ** 2) / (2.0 * sigma ** 2))
    return Psf(H / H.sum())


def pad_video(X, m):
    """Zero-pad mode 3 of a video ``(n1, p, m1, q)`` to extent ``m``."""
    X = np.asarray(X)
    if X.ndim != 4 or m < X.shape[2]:
        raise ShapeError(f"cannot pad video of shape {X.shape} to {m} columns")
    out = np.zeros(X.shape[:2] + (m,) + X.shape[3:], dtype=X.dtype)
    out[:, :, :X.shape[2]] = X
    return out


def frame_operator(psf: Psf, n1, m1):
    """Third-order operator ``(n, n1, m)`` with ``A * X`` = full 2-D convolution.

    Frontal slice ``s`` is the Toeplitz matrix convolving mode 1 with column
    ``s`` of the kernel; mode 3 is handled by the circulant structure of the
    t-product on zero-padded data.
    """
    H = psf.H
    m2, n2 = H.shape
    n, m = psf.padded_sizes(n1, m1)
    A = np.zeros((n, n1, m))
    for s in range(m2):
        for c in range(n1):
            A[c:c + n2, c, s] = H[s]
    return A


def build_conv_operator(psf: Psf, video_dims):
    """Fourth-order operator for frame-wise convolution of a video.

    ``video_dims = (n1, p, m1, q)``.  Builds the doubly block-circulant
    third-order tensor of shape ``(n*q, n1*q, m)`` (no coupling between
    frames), then returns its ``circ^{-1}`` of shape ``(n, n1, m, q)``.
    Multiply with the classical t-product on the video zero-padded by
    :func:`pad_video`.
    """
    n1, p, m1, q = (int(d) for d in video_dims)
    n, m = psf.padded_sizes(n1, m1)
    A3 = frame_operator(psf, n1, m1)
    Ahat = np.zeros((n * q, n1 * q, m))
    for f in range(q):
        Ahat[f * n:(f + 1) * n, f * n1:(f + 1) * n1] = A3
    return circ_inv(Ahat, q)


def deconv_problem(X, psf: Psf, L=None):
    """Low-rank recovery problem for a blurred video ``X`` of shape ``(n1, p, m1, q)``.

    ``L`` defaults to the unnormalized DFT, under which the transform
    t-product equals the classical circulant one.
    """
    from .transforms import make_dft

    X = np.asarray(X)
    A = build_conv_operator(psf, X.shape)
    Xp = pad_video(X, A.shape[2])
    if L is None:
        L = make_dft(A.shape[2:])
    return RecoveryProblem(A, tprod(A, Xp, L), L, "lowrank", Xp)


def metric_re(X, Xhat):
    """``||Xhat - X||_F / ||Xhat||_F`` with ``Xhat`` the reference."""
    X, Xhat = np.asarray(X), np.asarray(Xhat)
    if X.shape != Xhat.shape:
        raise ShapeError(f"shape mismatch: {X.shape} vs {Xhat.shape}")
    ref = fro_norm(Xhat)
    if ref == 0:
        raise ZeroDivisionError("relative error against a zero reference")
    return fro_norm(Xhat - X) / ref


def metric_psnr(X, Xhat):
    """``10 log10(N ||X||_inf^2 / ||Xhat - X||_F^2)`` with ``X`` the original.

    Returns ``inf`` for identical tensors.
    """
    X, Xhat = np.asarray(X), np.asarray(Xhat)
    if X.shape != Xhat.shape:
        raise ShapeError(f"shape mismatch: {X.shape} vs {Xhat.shape}")
    err = fro_norm(Xhat - X) ** 2
    if err == 0:
        return float("inf")
    return float(10.0 * np.log10(X.size * inf_norm(X) ** 2 / err))
