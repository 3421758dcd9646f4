"""Plain vs accelerated block updates at a fixed iteration budget.

Run: python3 demos/accelerated.py
"""
from l1pk.experiments import SyntheticSpec, gen_sparse_problem
from l1pk.solvers import SolverConfig, solve
from l1pk.transforms import make_dft

spec = SyntheticSpec((20, 2, 8, 8), l=20, density=0.8, seed=3)
prob = gen_sparse_problem(spec, make_dft(spec.a_dims[2:]))

for accelerated in (False, True):
    cfg = SolverConfig(t=1.0 / 64, lam=1e-3, p=2, blocks=4, accelerated=accelerated,
                       max_iters=200, tol=0.0)
    _, trace = solve(prob, cfg)
    print(f"accelerated={accelerated}: RE after 200 iterations {trace.re[-1]:.2e}")
