"""Regularized Kaczmarz solvers for ``A *_L X = B``.

All variants share one loop.  The dual iterate ``Z`` takes a Kaczmarz step
on the selected row or block of rows, and the primal iterate is recovered
as ``X = grad f*(Z)``, i.e. the proximal operator of the regularizer
(``||X||_1^p`` in sparse mode, ``||S||_1^p`` of the t-SVD core in low-rank
mode).  Row mode samples rows with probability proportional to their
squared norms; block mode samples blocks uniformly.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, RealifyError, ShapeError
from .prox import Objective, bregman_distance, gradient_conjugate, objective_value
from .tensor import fro_norm
from .tprod import conj_transpose, facewise, tprod
from .transforms import LinearTransform, realify_array, warn_step_size


@dataclass(eq=False)
class RecoveryProblem:
    """Consistent system ``A *_L X = B`` with optional ground truth."""

    A: np.ndarray
    B: np.ndarray
    transform: LinearTransform
    mode: str = "sparse"
    ground_truth: np.ndarray = None

    def __post_init__(self):
        self.A = np.asarray(self.A)
        self.B = np.asarray(self.B)
        A, B = self.A, self.B
        if self.mode not in ("sparse", "lowrank"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if A.ndim < 2 or B.ndim != A.ndim or B.shape[0] != A.shape[0] or B.shape[2:] != A.shape[2:]:
            raise ShapeError(f"A {A.shape} and B {B.shape} do not conform")
        if tuple(A.shape[2:]) != self.transform.dims:
            raise ShapeError(f"transform dims {self.transform.dims} do not match A {A.shape}")
        if self.ground_truth is not None:
            self.ground_truth = np.asarray(self.ground_truth)
            if self.ground_truth.shape != self.x_shape:
                raise ShapeError(
                    f"ground truth {self.ground_truth.shape} should have shape {self.x_shape}"
                )
        norms = self.row_norms()
        if np.any(norms == 0):
            raise ValueError(f"rows {np.flatnonzero(norms == 0).tolist()} of A are identically zero")

    @property
    def n1(self):
        return self.A.shape[0]

    @property
    def x_shape(self):
        return (self.A.shape[1], self.B.shape[1]) + self.A.shape[2:]

    def row_norms(self):
        """Squared Frobenius norms of the horizontal slices of ``A``."""
        return np.sum(np.abs(self.A.reshape(self.n1, -1)) ** 2, axis=1)


@dataclass
class SolverConfig:
    """Tunables of the row, block and accelerated solvers.

    ``blocks=None`` runs the row solver (one horizontal slice per step);
    an integer ``M`` partitions the rows into ``M`` blocks.  ``momentum``
    is ``"nesterov"`` (the gamma recursion) or ``"k/(k+3)"``.
    """

    t: float = 1.0
    lam: float = 1e-3
    p: int = 2
    max_iters: int = 1000
    tol: float = 1e-6
    selection: str = "cyclic"
    blocks: int = None
    partition: str = "contiguous"
    accelerated: bool = False
    momentum: str = "nesterov"
    seed: int = 0
    trace_every: int = 1
    convention: str = "all"
    record_objective: bool = True

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError("step size must be positive")
        if self.selection not in ("cyclic", "random"):
            raise ValueError(f"unknown selection {self.selection!r}")
        if self.partition not in ("contiguous", "shuffled"):
            raise ValueError(f"unknown partition rule {self.partition!r}")
        if self.momentum not in ("nesterov", "k/(k+3)"):
            raise ValueError(f"unknown momentum rule {self.momentum!r}")
        if self.trace_every < 1 or self.max_iters < 0:
            raise ValueError("trace_every must be >= 1 and max_iters >= 0")


@dataclass
class TraceRecord:
    iteration: int
    re: float
    rel_change: float
    objective: float
    bregman: float
    elapsed_ms: float
    block: tuple


@dataclass
class SolveTrace:
    records: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0

    def column(self, name):
        return np.array([np.nan if getattr(r, name) is None else getattr(r, name)
                         for r in self.records], dtype=float)

    @property
    def re(self):
        return self.column("re")

    @property
    def bregman(self):
        return self.column("bregman")

    @property
    def iteration(self):
        return np.array([r.iteration for r in self.records], dtype=int)


def partition_rows(n1, M, rule="contiguous", seed=0):
    """Split ``range(n1)`` into ``M`` disjoint blocks of near-equal size."""
    if not 1 <= M <= n1:
        raise ValueError(f"number of blocks must lie in [1, {n1}], got {M}")
    if rule == "contiguous":
        order = np.arange(n1)
    elif rule == "shuffled":
        order = np.random.default_rng([seed, 1]).permutation(n1)
    else:
        raise ValueError(f"unknown partition rule {rule!r}")
    return [np.sort(chunk) for chunk in np.array_split(order, M)]


def select_row(k, selection, norms, rng=None):
    """Row for iteration ``k``: cyclic sweep or norm-weighted sampling."""
    if selection == "cyclic":
        return k % len(norms)
    probs = np.asarray(norms, dtype=float)
    return int(rng.choice(len(probs), p=probs / probs.sum()))


def kaczmarz_step(Z, X, A_slab, B_slab, t, L):
    """``Z + t * A_slab* *_L (B_slab - A_slab *_L X) / ||A_slab||_F^2``."""
    norm2 = fro_norm(A_slab) ** 2
    if norm2 == 0:
        raise ZeroDivisionError("selected slab of A is identically zero")
    R = B_slab - tprod(A_slab, X, L)
    return Z + t * tprod(conj_transpose(A_slab, L), R, L) / norm2


class _SlabOperator:
    # transform-domain copies of one slab, reused at every visit
    def __init__(self, A, B, rows, L):
        self.rows = rows
        self.L = L
        As = A[rows]
        self.AL = L.forward(As)
        self.AhL = np.swapaxes(self.AL, 0, 1).conj()
        self.BL = L.forward(B[rows])
        self.norm2 = fro_norm(As) ** 2

    def direction(self, XL):
        RL = self.BL - facewise(self.AL, XL)
        return realify_array(self.L.inverse(facewise(self.AhL, RL))) / self.norm2


def _block_label(rows):
    return tuple(int(i) for i in rows)


def solve(problem: RecoveryProblem, config: SolverConfig, callback=None):
    """Run the regularized Kaczmarz iteration.

    Parameters
    ----------
    problem : RecoveryProblem
    config : SolverConfig
    callback : callable, optional
        Called as ``callback(k, Z, X)`` after initialization (``k = 0``)
        and after every iteration.

    Returns
    -------
    X : ndarray
        Final primal iterate.
    trace : SolveTrace
    """
    L = problem.transform
    if not L.preserves_real:
        raise ValueError("solver requires a transform that maps real tensors to real products")
    if np.iscomplexobj(problem.A) or np.iscomplexobj(problem.B):
        raise ValueError("solver requires real A and B")
    warn_step_size(config.t, L.rho)

    obj = Objective(config.lam, config.p, problem.mode, L, config.convention)
    n1 = problem.n1
    if config.blocks is None:
        blocks = [np.array([i]) for i in range(n1)]
        row_mode = True
    else:
        blocks = partition_rows(n1, config.blocks, config.partition, config.seed)
        row_mode = False
    ops = [_SlabOperator(problem.A, problem.B, rows, L) for rows in blocks]
    norms = problem.row_norms()
    rng = np.random.default_rng(config.seed)
    truth = problem.ground_truth
    truth_norm = fro_norm(truth) if truth is not None else None
    t = float(config.t)

    Z = np.zeros(problem.x_shape)
    X = gradient_conjugate(Z, obj)
    trace = SolveTrace()
    start = time.perf_counter()

    def record(k, rel, label):
        re = breg = None
        if truth is not None:
            re = fro_norm(truth - X) / truth_norm if truth_norm > 0 else fro_norm(X)
            breg = bregman_distance(X, Z, truth, obj)
        objective = objective_value(X, obj) if config.record_objective else None
        elapsed = 1e3 * (time.perf_counter() - start)
        trace.records.append(TraceRecord(k, re, rel, objective, breg, elapsed, label))

    record(0, None, None)
    if callback is not None:
        callback(0, Z, X)

    gamma = 1.0
    Zhat_prev = Z
    for k in range(config.max_iters):
        if row_mode:
            b = select_row(k, config.selection, norms, rng)
        elif config.selection == "cyclic":
            b = k % len(ops)
        else:
            b = int(rng.integers(len(ops)))
        op = ops[b]
        try:
            step = op.direction(L.forward(X))
        except RealifyError:
            if not np.all(np.isfinite(X)):
                raise DivergenceError(k + 1) from None
            raise
        if config.accelerated:
            if config.momentum == "nesterov":
                gamma_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * gamma * gamma))
                eta = (1.0 - gamma) / gamma_next
                gamma = gamma_next
            else:
                eta = -k / (k + 3.0)
        # overflow is caught by the finiteness check below
        with np.errstate(over="ignore", invalid="ignore"):
            if config.accelerated:
                Zhat = Z + t * step
                Z = (1.0 - eta) * Zhat + eta * Zhat_prev
                Zhat_prev = Zhat
            else:
                Z = Z + t * step
        if not np.all(np.isfinite(Z)):
            raise DivergenceError(k + 1)
        X_new = gradient_conjugate(Z, obj)
        if not np.all(np.isfinite(X_new)):
            raise DivergenceError(k + 1)
        xnorm = fro_norm(X)
        rel = fro_norm(X_new - X) / xnorm if xnorm > 0 else None
        X = X_new
        done = rel is not None and rel < config.tol
        last = done or k + 1 == config.max_iters
        if (k + 1) % config.trace_every == 0 or last:
            record(k + 1, rel, _block_label(op.rows))
        if callback is not None:
            callback(k + 1, Z, X)
        trace.iterations = k + 1
        if done:
            trace.converged = True
            break
    return X, trace
