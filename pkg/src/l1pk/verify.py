"""Invariant suite behind ``l1pk verify``.

Each group draws random desk-scale instances and returns how many checks
failed.  ``quick`` shrinks the sample counts; the checks are the same.
"""

import time
from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d

from .experiments import (SyntheticSpec, build_conv_operator, build_destripe_operator,
                          gen_sparse_problem, pad_video, psf_gaussian)
from .prox import ProxParams, g_p, prox_l1p
from .solvers import SolverConfig, solve
from .tensor import circ, circ_inv, fold, fro_norm, inner, unfold
from .tprod import (bdiag, classical_tprod, conj_transpose, to_slices, tprod, tsvd,
                    reconstruct)
from .transforms import make_dct, make_dft, make_identity


@dataclass
class GroupResult:
    name: str
    checks: int
    failures: int
    seconds: float
    detail: str = ""

    @property
    def passed(self):
        return self.failures == 0


def _rand_dims(rng, order=4, hi=5):
    return tuple(int(d) for d in rng.integers(1, hi + 1, size=order))


def _transforms(dims):
    return [make_identity(dims), make_dft(dims), make_dft(dims, normalized=True), make_dct(dims)]


def _rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


def group_tensor(rng, n):
    fails = 0
    for _ in range(n):
        A = rng.standard_normal(_rand_dims(rng))
        fails += not np.array_equal(fold(unfold(A), A.shape), A)
        fails += not np.allclose(circ_inv(circ(A), A.shape[-1]), A, rtol=0, atol=1e-14)
        B = rng.standard_normal(A.shape) + 1j * rng.standard_normal(A.shape)
        fails += _rel(inner(A, B), np.conj(inner(B, A))) > 1e-12
    return 3 * n, fails, ""


def group_transforms(rng, n):
    fails = checks = 0
    for _ in range(n):
        dims = _rand_dims(rng)
        A = rng.standard_normal(dims)
        B = rng.standard_normal(dims)
        for L in _transforms(dims[2:]):
            AL, BL = L.forward(A), L.forward(B)
            checks += 4
            fails += not np.allclose(L.inverse(AL), A, atol=1e-10)
            fails += not np.allclose(AL, L.forward(A, fast=False), atol=1e-9)
            lhs = inner(A, B)
            rhs = np.vdot(bdiag(BL), bdiag(AL)) / L.rho
            fails += abs(lhs - rhs) > 1e-9 * max(1.0, abs(lhs))
            fails += _rel(fro_norm(A) ** 2, fro_norm(AL) ** 2 / L.rho) > 1e-9
    return checks, fails, ""


def group_tprod(rng, n):
    fails = checks = 0
    for _ in range(n):
        n1, n2, l = (int(v) for v in rng.integers(1, 5, size=3))
        higher = _rand_dims(rng, 2, 4)
        A = rng.standard_normal((n1, n2) + higher)
        X = rng.standard_normal((n2, l) + higher)
        Y = rng.standard_normal((n1, l) + higher)
        for L in _transforms(higher):
            C = tprod(A, X, L)
            checks += 3
            fails += fro_norm(C) > np.sqrt(L.rho) * fro_norm(A) * fro_norm(X) * (1 + 1e-9)
            a, b = inner(C, Y), inner(X, tprod(conj_transpose(A, L), Y, L))
            fails += abs(a - b) > 1e-9 * max(1.0, abs(a))
            S = sum(tprod(A[:, j:j + 1], X[j:j + 1], L) for j in range(n2))
            fails += not np.allclose(S, C, atol=1e-9 * max(1.0, fro_norm(C)))
        checks += 1
        C = tprod(A, X, make_dft(higher))
        fails += fro_norm(C - classical_tprod(A, X)) > 1e-8 * max(1.0, fro_norm(C))
    return checks, fails, ""


def group_tsvd(rng, n):
    fails = 0
    for _ in range(n):
        dims = _rand_dims(rng, 4, 5)
        X = rng.standard_normal(dims)
        L = [make_dft(dims[2:]), make_dct(dims[2:])][int(rng.integers(2))]
        f = tsvd(X, L)
        fails += fro_norm(reconstruct(f.U, f.S, f.V, L) - X) > 1e-8 * max(1.0, fro_norm(X))
        UL = to_slices(L.forward(f.U))
        eye = np.eye(dims[0])
        fails += np.max(np.abs(UL.conj().transpose(0, 2, 1) @ UL - eye)) > 1e-8
        SL = to_slices(L.forward(f.S))
        k = min(dims[:2])
        off = SL.copy()
        off[:, np.arange(k), np.arange(k)] = 0
        fails += np.max(np.abs(off), initial=0) > 1e-8 * max(1.0, fro_norm(X))
    return 3 * n, fails, ""


def group_prox(rng, n):
    fails = checks = 0
    for _ in range(n):
        p = int(rng.integers(1, 5))
        lam = 10.0 ** rng.uniform(-4, 0)
        Z = rng.standard_normal((int(rng.integers(1, 9)), 1)) * 10.0 ** rng.uniform(-3, 3)
        P = prox_l1p(Z, lam, p)
        order = np.argsort(np.abs(Z).ravel(), kind="stable")
        checks += 3
        fails += bool(np.any(P * Z < 0))
        fails += bool(np.any(np.diff(np.abs(P).ravel()[order]) < 0))
        fails += fro_norm(P) > fro_norm(Z)
        if p > 1:
            params = ProxParams(lam, p, Z.size)
            z1 = float(np.abs(Z).sum())
            g = g_p(z1, params)
            checks += 1
            fails += abs(p * Z.size * lam * g ** (p - 1) + g - z1) > 1e-10 * (1 + z1)
    return checks, fails, ""


def group_solver(rng, n):
    fails = checks = 0
    for s in range(max(1, n // 10)):
        spec = SyntheticSpec((8, 2, 4, 3), l=4, density=0.8, seed=int(rng.integers(2 ** 31)))
        prob = gen_sparse_problem(spec, make_dft(spec.a_dims[2:], normalized=True))
        cfg = SolverConfig(t=1.0, lam=1e-3, p=2, max_iters=300, tol=0.0)
        X1, tr = solve(prob, cfg)
        X2, _ = solve(prob, cfg)
        b = tr.bregman
        checks += 2
        fails += not np.array_equal(X1, X2)
        fails += bool(np.any(np.diff(b) > 1e-10 * max(1.0, b[0])))
    return checks, fails, ""


def group_imaging(rng, n):
    fails = checks = 0
    kernels = [psf_gaussian(5, 1.0)] + [psf_gaussian(3, 0.5 + rng.random()) for _ in range(2)]
    for psf in kernels:
        X = rng.standard_normal((8, 3, 8, 2))
        A = build_conv_operator(psf, X.shape)
        Y = classical_tprod(A, pad_video(X, A.shape[2]))
        for c in range(3):
            for f in range(2):
                ref = convolve2d(X[:, c, :, f], psf.H.T, mode="full")
                checks += 1
                fails += np.max(np.abs(Y[:, c, :, f] - ref)) > 1e-8
    L = make_dft((4, 3))
    A = build_destripe_operator((10, 6, 4, 3), 5, 0.01, L)
    AL = to_slices(L.forward(A))
    off = AL - AL * np.eye(10)
    checks += 1
    fails += np.max(np.abs(off)) > 1e-12
    return checks, fails, ""


GROUPS = [
    ("tensor-core", group_tensor),
    ("transforms", group_transforms),
    ("t-product", group_tprod),
    ("t-svd", group_tsvd),
    ("prox", group_prox),
    ("solver", group_solver),
    ("imaging", group_imaging),
]


def run_suite(quick=True, seed=0):
    """Run every group and return a list of :class:`GroupResult`."""
    n = 20 if quick else 200
    rng = np.random.default_rng(seed)
    results = []
    for name, fn in GROUPS:
        start = time.perf_counter()
        checks, fails, detail = fn(rng, n)
        results.append(GroupResult(name, checks, int(fails), time.perf_counter() - start, detail))
    return results


def format_table(results):
    lines = [f"{'group':<12} {'checks':>7} {'fails':>6} {'sec':>7}  status"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:<12} {r.checks:>7} {r.failures:>6} {r.seconds:>7.2f}  {status}")
    return "\n".join(lines)
