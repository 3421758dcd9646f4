"""Low-rank recovery through the t-nuclear prox, row vs block solver.

Run: python3 demos/lowrank_recovery.py
"""
from l1pk.experiments import SyntheticSpec, gen_lowrank_problem
from l1pk.solvers import SolverConfig, solve
from l1pk.transforms import make_dft

L = make_dft((4, 3))
prob = gen_lowrank_problem(SyntheticSpec((12, 6, 4, 3), l=6, rank=2, seed=1), L)

for blocks in (None, 3):
    cfg = SolverConfig(t=1.0 / L.rho, lam=1e-3, p=2, blocks=blocks, max_iters=2000, tol=1e-9)
    X, trace = solve(prob, cfg)
    print(f"blocks={blocks}: {len(trace.re) - 1} iterations, RE {trace.re[-1]:.2e}")
