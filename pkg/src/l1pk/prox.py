"""Closed-form proximal operators of ``lam * ||X||_1^p`` and related objectives.

For ``p >= 2`` the shrinkage threshold is ``p * lam * g^(p-1)`` where ``g``
is the nonnegative root of ``p*n*lam*g^(p-1) + g - ||Z||_1 = 0``.  That root
equals ``||prox(Z)||_1`` only while no entry is clamped to zero; once
clamping happens the formula is no longer the exact minimizer.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .tensor import fro_norm, l1_norm
from .tprod import conj_transpose, tprod, tsvd, tsvt
from .transforms import LinearTransform

SUPPORTED_P = (1, 2, 3, 4)


@dataclass(frozen=True)
class ProxParams:
    lam: float
    p: int
    n: int

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if self.p not in SUPPORTED_P:
            raise ValueError(
                f"p={self.p} is not supported; closed forms exist only for p in {SUPPORTED_P}"
            )
        if self.n < 1:
            raise ValueError(f"entry count must be positive, got {self.n}")


def g_p(z1, params: ProxParams):
    """Nonnegative root of ``p*n*lam*g^(p-1) + g - z1 = 0``.

    The ``p = 3`` root is evaluated as ``2 z1 / (1 + sqrt(1 + 12 n lam z1))``
    and the ``p = 4`` Cardano root as ``b / (s^2 + s w + w^2)`` with the two
    cube roots ``s`` and ``-w``; both are algebraically the printed closed
    forms but avoid cancellation for tiny and huge ``z1``.
    """
    if z1 < 0:
        raise ValueError("z1 must be nonnegative")
    lam, p, n = params.lam, params.p, params.n
    nl = n * lam
    if p == 1:
        return 1.0
    if p == 2:
        return z1 / (2.0 * nl + 1.0)
    if p == 3:
        return 2.0 * z1 / (1.0 + np.sqrt(1.0 + 12.0 * nl * z1))
    # g^3 + a g - b = 0
    if z1 == 0:
        return 0.0
    a = 1.0 / (4.0 * nl)
    b = z1 / (4.0 * nl)
    s = np.cbrt(b / 2.0 + np.sqrt(b * b / 4.0 + a ** 3 / 27.0))
    w = a / (3.0 * s)
    return float(b / (s * s + s * w + w * w))


def threshold(z1, params: ProxParams):
    """Shrinkage amount ``p * lam * g_p(z1)^(p-1)``."""
    return params.p * params.lam * g_p(z1, params) ** (params.p - 1)


def prox_l1p(Z, lam, p, n=None):
    """``sign(Z) * max(|Z| - p*lam*g_p(||Z||_1)^(p-1), 0)``.

    ``n`` defaults to the number of entries of ``Z``.
    """
    Z = np.asarray(Z)
    if np.iscomplexobj(Z):
        raise TypeError("prox_l1p is defined for real tensors only")
    params = ProxParams(lam, p, Z.size if n is None else n)
    c = threshold(l1_norm(Z), params)
    mag = np.maximum(np.abs(Z) - c, 0.0)
    # adding +0.0 turns the -0.0 of clamped negative entries into +0.0
    return np.sign(Z) * mag + 0.0


def core_entry_count(shape, convention="all"):
    """Entry count used for the core tensor of a t-SVD of shape ``shape``.

    ``"all"`` counts every entry of the core, ``"diagonal"`` only the
    diagonal tubes.
    """
    higher = int(np.prod(shape[2:], dtype=np.int64)) if len(shape) > 2 else 1
    if convention == "all":
        return int(shape[0]) * int(shape[1]) * higher
    if convention == "diagonal":
        return min(shape[0], shape[1]) * higher
    raise ValueError(f"unknown entry-count convention {convention!r}")


def prox_nl1p(Z, lam, p, L: LinearTransform, n=None, convention="all"):
    """Proximal operator of ``lam * ||S||_1^p`` on the t-SVD core ``S``.

    Computes ``U *_L prox_l1p(S) *_L V*``.  ``p = 1`` dispatches to
    :func:`~l1pk.tprod.tsvt`.
    """
    Z = np.asarray(Z)
    if p == 1:
        ProxParams(lam, p, 1)
        return tsvt(Z, lam, L)
    f = tsvd(Z, L)
    if n is None:
        n = core_entry_count(f.S.shape, convention)
    D = prox_l1p(f.S, lam, p, n)
    return tprod(tprod(f.U, D, L), conj_transpose(f.V, L), L)


@dataclass(frozen=True, eq=False)
class Objective:
    """``lam * R(X) + 0.5 ||X||_F^2`` with ``R = ||X||_1^p`` or the nuclear variant."""

    lam: float
    p: int
    mode: str = "sparse"
    transform: LinearTransform = None
    convention: str = "all"

    def __post_init__(self):
        if self.mode not in ("sparse", "lowrank"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "lowrank" and self.transform is None:
            raise ValueError("low-rank objective needs a transform")
        if self.p not in SUPPORTED_P:
            raise ValueError(f"p={self.p} is not supported")
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")

    def regularizer(self, X):
        if self.lam == 0:
            return 0.0
        S = X if self.mode == "sparse" else tsvd(X, self.transform).S
        with np.errstate(over="ignore"):
            return float(self.lam * np.float64(l1_norm(S)) ** self.p)


def objective_value(X, obj: Objective):
    return obj.regularizer(X) + 0.5 * fro_norm(X) ** 2


def gradient_conjugate(Z, obj: Objective):
    """``grad f*(Z)``, which is the proximal operator of the regularizer."""
    Z = np.asarray(Z)
    if obj.lam == 0:
        return Z.copy()
    if obj.mode == "sparse":
        return prox_l1p(Z, obj.lam, obj.p)
    return prox_nl1p(Z, obj.lam, obj.p, obj.transform, convention=obj.convention)


def bregman_distance(X, Zsub, Y, obj: Objective):
    """``f(Y) - f(X) - <Zsub, Y - X>``.

    Evaluated as ``0.5||Y-X||^2 + R(Y) - R(X) - <Zsub - X, Y - X>`` which is
    the same quantity with less cancellation near ``Y = X``.
    """
    X, Zsub, Y = np.asarray(X), np.asarray(Zsub), np.asarray(Y)
    if not X.shape == Zsub.shape == Y.shape:
        raise ShapeError("Bregman distance operands must share a shape")
    D = Y - X
    cross = np.vdot(D.ravel(), (Zsub - X).ravel()).real
    return 0.5 * fro_norm(D) ** 2 + obj.regularizer(Y) - obj.regularizer(X) - float(cross)
