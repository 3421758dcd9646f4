"""Recover a sparse fourth-order tensor for each p with the row solver.

Run: python3 demos/sparse_recovery.py
"""
import warnings

import numpy as np

from l1pk.experiments import SyntheticSpec, gen_sparse_problem
from l1pk.solvers import SolverConfig, solve
from l1pk.transforms import make_dft

# t=1 sits above 2/rho; it converges here in practice, so skip the warning
warnings.simplefilter("ignore", UserWarning)

spec = SyntheticSpec((20, 2, 8, 8), l=20, density=0.8, seed=0)
prob = gen_sparse_problem(spec, make_dft(spec.a_dims[2:]))

for p in (1, 2, 3, 4):
    X, trace = solve(prob, SolverConfig(t=1.0, lam=1e-3, p=p, max_iters=3000, tol=0.0))
    re = np.asarray(trace.re)
    hit = int(np.argmax(re < 1e-2)) if np.any(re < 1e-2) else None
    print(f"p={p}  final RE {re[-1]:.2e}  first below 1e-2 at iter {hit}")
